// Copyright 2026 The riskscene Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "riskscene/bowtie.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace riskscene {

namespace {

constexpr std::array<std::pair<DetectorFlag, std::string_view>, 6> kFlagNames{{
    {DetectorFlag::kBlurLeft, "blur_left"},
    {DetectorFlag::kBlurCenter, "blur_center"},
    {DetectorFlag::kBlurRight, "blur_right"},
    {DetectorFlag::kOcclusionLeft, "occlusion_left"},
    {DetectorFlag::kOcclusionCenter, "occlusion_center"},
    {DetectorFlag::kOcclusionRight, "occlusion_right"},
}};

double clip_probability(double p) {
  if (std::isnan(p)) throw std::domain_error("probability evaluated to NaN");
  return std::clamp(p, 0.0, 1.0);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

void validate_barrier(const BarrierSpec& b) {
  auto fail = [&](const std::string& what) { throw std::invalid_argument("barrier '" + b.id + "': " + what); };
  if (const auto* lec = std::get_if<LecSigmoidBarrier>(&b.form)) {
    if (!(lec->normalizer > 0.0)) fail("normalizer must be positive");
    if (!is_probability(lec->sensor_failure_rate)) fail("sensor_failure_rate must lie in [0, 1]");
    if (!std::isfinite(lec->slope) || !std::isfinite(lec->midpoint)) fail("sigmoid parameters must be finite");
    for (const auto& [flag, p] : lec->detector_probability) {
      if (!is_probability(p)) fail("P(x|" + std::string(to_string(flag)) + ") must lie in [0, 1]");
    }
    return;
  }
  const auto& env = std::get<EnvLutBarrier>(b.form);
  if (env.edges.size() < 2) fail("env_lut needs at least one bin");
  if (env.edges.front() != 0.0 || env.edges.back() != 100.0) fail("env_lut bins must partition [0, 100]");
  for (std::size_t i = 1; i < env.edges.size(); ++i) {
    if (!(env.edges[i] > env.edges[i - 1])) fail("env_lut edges must be strictly increasing");
  }
  const std::size_t bins = env.edges.size() - 1;
  if (env.radar_ok.size() != bins || env.radar_failed.size() != bins) {
    fail("env_lut needs " + std::to_string(bins) + " values for each radar state");
  }
  for (double p : env.radar_ok) {
    if (!is_probability(p)) fail("env_lut probabilities must lie in [0, 1]");
  }
  for (double p : env.radar_failed) {
    if (!is_probability(p)) fail("env_lut probabilities must lie in [0, 1]");
  }
}

}  // namespace

std::string_view to_string(DetectorFlag flag) {
  for (const auto& [f, name] : kFlagNames) {
    if (f == flag) return name;
  }
  return "blur_left";
}

std::optional<DetectorFlag> parse_detector_flag(std::string_view text) {
  for (const auto& [f, name] : kFlagNames) {
    if (name == text) return f;
  }
  return std::nullopt;
}

bool DetectorState::active(DetectorFlag flag) const {
  switch (flag) {
    case DetectorFlag::kBlurLeft:
      return blur[0];
    case DetectorFlag::kBlurCenter:
      return blur[1];
    case DetectorFlag::kBlurRight:
      return blur[2];
    case DetectorFlag::kOcclusionLeft:
      return occlusion[0];
    case DetectorFlag::kOcclusionCenter:
      return occlusion[1];
    case DetectorFlag::kOcclusionRight:
      return occlusion[2];
  }
  return false;
}

void DetectorState::validate() const {
  if (!(martingale >= 0.0) || !std::isfinite(martingale)) {
    throw std::invalid_argument("martingale must be a finite non-negative value");
  }
  if (!(precipitation >= 0.0 && precipitation <= 100.0)) {
    throw std::invalid_argument("precipitation must lie in [0, 100]");
  }
  if (road_segment < 0) throw std::invalid_argument("road segment must be non-negative");
}

void BowTieModel::validate() const {
  if (threats.empty()) throw std::invalid_argument("bow-tie model needs at least one threat");
  if (preventive.empty()) throw std::invalid_argument("bow-tie model needs at least one preventive barrier");
  if (mitigation.empty()) throw std::invalid_argument("bow-tie model needs at least one mitigation barrier");
  const std::size_t segments = segment_count();
  if (segments == 0) throw std::invalid_argument("threat LUTs must cover at least one road segment");
  for (const auto& t : threats) {
    if (t.rate_by_segment.size() != segments) {
      throw std::invalid_argument("threat '" + t.id + "' does not cover every road segment");
    }
    for (double r : t.rate_by_segment) {
      if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("threat '" + t.id + "' has a negative rate");
    }
  }
  for (const auto& b : preventive) validate_barrier(b);
  for (const auto& b : mitigation) validate_barrier(b);
  const auto& w = infraction_weights;
  if (w.stop_sign < 0.0 || w.red_light < 0.0 || w.route_deviation < 0.0) {
    throw std::invalid_argument("infraction weights must be non-negative");
  }
}

double sigmoid_lec(double martingale, double slope, double midpoint) {
  return 1.0 / (1.0 + std::exp(-slope * (martingale - midpoint)));
}

double barrier_success_prob(const BarrierSpec& barrier, const DetectorState& state) {
  if (const auto* lec = std::get_if<LecSigmoidBarrier>(&barrier.form)) {
    double p = 1.0 - sigmoid_lec(state.martingale, lec->slope, lec->midpoint);
    for (const auto& [flag, p_detect] : lec->detector_probability) {
      if (state.active(flag)) p *= p_detect / lec->normalizer * lec->sensor_failure_rate;
    }
    return clip_probability(p);
  }
  const auto& env = std::get<EnvLutBarrier>(barrier.form);
  const auto it = std::upper_bound(env.edges.begin() + 1, env.edges.end() - 1, state.precipitation);
  const auto bin = static_cast<std::size_t>(it - (env.edges.begin() + 1));
  const double p = state.radar_ok ? env.radar_ok.at(bin) : env.radar_failed.at(bin);
  return clip_probability(p);
}

double threat_frequency(const Threat& threat, const DetectorState& state) {
  if (state.road_segment < 0 || static_cast<std::size_t>(state.road_segment) >= threat.rate_by_segment.size()) {
    throw std::out_of_range("road segment " + std::to_string(state.road_segment) + " outside the LUT of threat '" +
                            threat.id + "'");
  }
  return threat.rate_by_segment[static_cast<std::size_t>(state.road_segment)];
}

double hazard_rate(const BowTieModel& model, const DetectorState& state) {
  double escape = 1.0;
  for (const auto& b : model.preventive) escape *= 1.0 - barrier_success_prob(b, state);
  for (const auto& b : model.mitigation) escape *= 1.0 - barrier_success_prob(b, state);
  double lambda = 0.0;
  for (const auto& t : model.threats) lambda += threat_frequency(t, state) * escape;
  assert(lambda >= 0.0);
  return lambda;
}

double hazard_likelihood(double lambda, double duration) {
  if (!(lambda >= 0.0) || !(duration >= 0.0)) {
    throw std::invalid_argument("hazard likelihood needs a non-negative rate and duration");
  }
  return -std::expm1(-lambda * duration);
}

double resonate_score(std::span<const TimedRate> trace, double t1, double t2) {
  if (trace.empty()) throw std::invalid_argument("empty hazard-rate trace");
  if (!(t2 > t1)) throw std::invalid_argument("scene end time must exceed its start time");
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace[i].time < t1 || trace[i].time > t2) throw std::invalid_argument("trace timestamp outside [T1, T2]");
    if (i > 0 && trace[i].time < trace[i - 1].time) throw std::invalid_argument("trace timestamps not sorted");
  }
  double area = trace.front().lambda * (trace.front().time - t1);
  for (std::size_t i = 1; i < trace.size(); ++i) {
    area += 0.5 * (trace[i].lambda + trace[i - 1].lambda) * (trace[i].time - trace[i - 1].time);
  }
  area += trace.back().lambda * (t2 - trace.back().time);
  return area / (t2 - t1);
}

double infraction_score(const InfractionRecord& infractions, const InfractionWeights& weights) {
  return weights.stop_sign * infractions.stop_sign + weights.red_light * infractions.red_light +
         weights.route_deviation * infractions.route_deviation;
}

double risk_score(double rs, double is, double w1, double w2) { return w1 * rs + w2 * is; }

double calibrate_threshold(std::span<const double> calibration_risks) {
  const std::size_t n = calibration_risks.size();
  if (n < kMinCalibrationSamples) {
    throw std::invalid_argument("threshold calibration needs at least " + std::to_string(kMinCalibrationSamples) +
                                " risks, got " + std::to_string(n));
  }
  std::vector<double> sorted(calibration_risks.begin(), calibration_risks.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t rank = (95 * n + 99) / 100;  // ceil(0.95 n), exact in integers
  return sorted[rank - 1];
}

RiskBreakdown score_scene(const BowTieModel& model, std::span<const DetectorState> trace,
                          const InfractionRecord& infractions, RiskWeights weights, double delta, double t1,
                          double t2) {
  if (trace.empty()) throw std::invalid_argument("empty detector trace");
  RiskBreakdown out;
  out.lambda_trace.reserve(trace.size());
  const double step = trace.size() > 1 ? (t2 - t1) / static_cast<double>(trace.size() - 1) : 0.0;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double t = i + 1 == trace.size() && trace.size() > 1 ? t2 : t1 + step * static_cast<double>(i);
    out.lambda_trace.push_back({t, hazard_rate(model, trace[i])});
  }
  out.rs = resonate_score(out.lambda_trace, t1, t2);
  out.is = infraction_score(infractions, model.infraction_weights);
  out.s_risk = risk_score(out.rs, out.is, weights.w1, weights.w2);
  out.high_risk = is_high_risk(out.s_risk, delta);
  return out;
}

}  // namespace riskscene
