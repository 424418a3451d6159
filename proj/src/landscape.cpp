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

#include "riskscene/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "riskscene/lexer.hpp"
#include "riskscene/rng.hpp"

namespace riskscene {

namespace {

constexpr std::size_t kMaxTraceLength = 100000;

// Evaluator streams are keyed by iteration; stream 1 belongs to the sampler.
constexpr std::uint64_t kEvaluatorStreamBase = 0x10000;

class LandscapeParser {
 public:
  explicit LandscapeParser(std::string_view text) : cur_(tokenize(text)) {}

  Landscape parse() {
    Landscape l;
    cur_.expect_keyword("landscape");
    l.name = cur_.expect_ident("landscape name");
    const SourcePos pos = cur_.peek().pos;
    cur_.expect_punct('{');
    std::set<std::string> seen;
    while (!cur_.is_punct('}')) {
      const Token key = cur_.peek();
      const std::string word = cur_.expect_ident("landscape statement");
      if (word == "bump") {
        l.bumps.push_back(parse_bump());
        continue;
      }
      if (word == "fault") {
        l.faults.push_back(parse_fault());
        continue;
      }
      if (word == "infractions") {
        if (!seen.insert(word).second) cur_.fail(key, "'infractions' given twice");
        l.infractions = parse_thresholds();
        continue;
      }
      if (!seen.insert(word).second) cur_.fail(key, "'" + word + "' given twice");
      cur_.expect_punct('=');
      if (word == "precipitation" || word == "road_segment") {
        (word == "precipitation" ? l.precipitation_variable : l.road_segment_variable) = cur_.expect_ident("variable");
      } else {
        const Token at = cur_.peek();
        const double v = cur_.expect_number();
        if (word == "base_martingale") {
          l.base_martingale = v;
        } else if (word == "martingale_gain") {
          l.martingale_gain = v;
        } else if (word == "noise_sigma") {
          l.noise_sigma = v;
        } else if (word == "radar_cutoff") {
          l.radar_cutoff = v;
        } else if (word == "trace_length") {
          if (v < 0.0 || std::floor(v) != v || v > static_cast<double>(kMaxTraceLength)) {
            cur_.fail(at, "trace_length must be an integer between 2 and " + std::to_string(kMaxTraceLength));
          }
          l.trace_length = static_cast<std::size_t>(v);
        } else {
          cur_.fail(key, "unknown keyword '" + word + "'");
        }
      }
      cur_.expect_punct(';');
    }
    cur_.expect_punct('}');
    if (!cur_.at_end()) cur_.fail_here("unexpected " + describe(cur_.peek()) + " after the landscape block");
    try {
      l.validate();
    } catch (const std::invalid_argument& e) {
      throw ParseError(pos, e.what());
    }
    return l;
  }

 private:
  Bump parse_bump() {
    Bump b;
    const SourcePos pos = cur_.peek().pos;
    cur_.expect_punct('{');
    bool has_center = false;
    while (!cur_.is_punct('}')) {
      const Token key = cur_.peek();
      const std::string word = cur_.expect_ident("bump field");
      if (word == "center") {
        if (has_center) cur_.fail(key, "'center' given twice");
        has_center = true;
        cur_.expect_punct('{');
        while (!cur_.is_punct('}')) {
          const Token at = cur_.peek();
          const std::string var = cur_.expect_ident("variable");
          cur_.expect_punct('=');
          const double c = cur_.expect_number("coordinate");
          cur_.expect_punct(';');
          if (!b.center.emplace(var, c).second) cur_.fail(at, "coordinate of '" + var + "' given twice");
        }
        cur_.expect_punct('}');
      } else if (word == "width" || word == "amplitude") {
        cur_.expect_punct('=');
        (word == "width" ? b.width : b.amplitude) = cur_.expect_number();
        cur_.expect_punct(';');
      } else {
        cur_.fail(key, "unknown bump field '" + word + "'");
      }
    }
    cur_.expect_punct('}');
    if (!has_center) throw ParseError(pos, "bump has no center");
    return b;
  }

  FaultBinding parse_fault() {
    FaultBinding f;
    f.variable = cur_.expect_ident("fault variable");
    cur_.expect_punct('{');
    while (!cur_.is_punct('}')) {
      const Token key = cur_.peek();
      const std::string word = cur_.expect_ident("fault field");
      cur_.expect_punct('=');
      if (word == "flags") {
        const Token at = cur_.peek();
        const std::string effect = cur_.expect_ident("fault effect");
        if (effect == "blur") {
          f.effect = FaultEffect::kBlur;
        } else if (effect == "occlusion") {
          f.effect = FaultEffect::kOcclusion;
        } else {
          cur_.fail(at, "unknown fault effect '" + effect + "' (expected blur or occlusion)");
        }
      } else if (word == "boost") {
        f.boost = cur_.expect_number();
      } else {
        cur_.fail(key, "unknown fault field '" + word + "'");
      }
      cur_.expect_punct(';');
    }
    cur_.expect_punct('}');
    return f;
  }

  InfractionThresholds parse_thresholds() {
    InfractionThresholds t;
    cur_.expect_punct('{');
    while (!cur_.is_punct('}')) {
      const Token key = cur_.peek();
      const std::string word = cur_.expect_ident("infraction threshold");
      cur_.expect_punct('=');
      const double v = cur_.expect_number();
      cur_.expect_punct(';');
      if (word == "stop") {
        t.stop = v;
      } else if (word == "red_light") {
        t.red_light = v;
      } else if (word == "deviation") {
        t.deviation = v;
      } else if (word == "ramp") {
        t.ramp = v;
      } else {
        cur_.fail(key, "unknown infraction threshold '" + word + "'");
      }
    }
    cur_.expect_punct('}');
    return t;
  }

  TokenCursor cur_;
};

double ramp_probability(double intensity, double threshold, double ramp) {
  return std::clamp((intensity - threshold) / ramp, 0.0, 1.0);
}

constexpr std::string_view kDefaultLandscape = R"(# Two high-risk regions over precipitation and time of day.
landscape two_bump {
  base_martingale = 2;
  martingale_gain = 80;
  noise_sigma = 1;
  radar_cutoff = 0.5;
  trace_length = 60;
  precipitation = P;
  road_segment = RS;

  infractions { stop = 0.5; red_light = 0.6; deviation = 0.7; ramp = 0.3; }

  bump { center { P = 0.2; T = 0.8; } width = 0.15; amplitude = 0.9; }
  bump { center { P = 0.8; T = 0.3; } width = 0.15; amplitude = 0.7; }

  fault F1 { flags = blur; boost = 0.2; }
  fault F2 { flags = occlusion; boost = 0.2; }
}
)";

}  // namespace

void Landscape::validate() const {
  if (bumps.empty() && faults.empty()) throw std::invalid_argument("landscape has no bumps and no faults");
  for (const auto& b : bumps) {
    if (b.center.empty()) throw std::invalid_argument("bump center names no variable");
    for (const auto& [var, c] : b.center) {
      if (!(c >= 0.0 && c <= 1.0)) throw std::invalid_argument("bump center for '" + var + "' is outside [0, 1]");
    }
    if (!(b.width > 0.0) || !std::isfinite(b.width)) throw std::invalid_argument("bump width must be positive");
    if (!(b.amplitude > 0.0 && b.amplitude <= 1.0)) throw std::invalid_argument("bump amplitude must be in (0, 1]");
  }
  std::set<std::string> fault_vars;
  for (const auto& f : faults) {
    if (!fault_vars.insert(f.variable).second) throw std::invalid_argument("fault '" + f.variable + "' bound twice");
    if (!(f.boost >= 0.0) || !std::isfinite(f.boost)) throw std::invalid_argument("fault boost must be non-negative");
  }
  if (!(base_martingale >= 0.0) || !std::isfinite(base_martingale)) {
    throw std::invalid_argument("base_martingale must be non-negative");
  }
  if (!(martingale_gain > 0.0) || !std::isfinite(martingale_gain)) {
    throw std::invalid_argument("martingale_gain must be positive");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw std::invalid_argument("noise_sigma must be non-negative");
  if (!std::isfinite(radar_cutoff)) throw std::invalid_argument("radar_cutoff must be finite");
  if (trace_length < 2) throw std::invalid_argument("trace_length must be at least 2");
  const auto& t = infractions;
  if (!std::isfinite(t.stop) || !std::isfinite(t.red_light) || !std::isfinite(t.deviation)) {
    throw std::invalid_argument("infraction thresholds must be finite");
  }
  if (!(t.ramp > 0.0) || !std::isfinite(t.ramp)) throw std::invalid_argument("infraction ramp must be positive");
}

Landscape parse_landscape(std::string_view text) { return LandscapeParser(text).parse(); }

std::string_view default_landscape_text() { return kDefaultLandscape; }

const Landscape& default_landscape() {
  static const Landscape l = parse_landscape(kDefaultLandscape);
  return l;
}

std::uint64_t scene_seed(std::uint64_t campaign_seed, std::size_t iteration) {
  return derive_seed(campaign_seed, kEvaluatorStreamBase + iteration);
}

SyntheticEvaluator::SyntheticEvaluator(Landscape landscape, SceneSpace space)
    : landscape_(std::move(landscape)), space_(std::move(space)) {
  landscape_.validate();
  auto lookup = [&](const std::string& name) {
    const auto idx = space_.index_of(name);
    if (!idx) throw std::invalid_argument("landscape refers to undeclared variable '" + name + "'");
    return *idx;
  };
  for (const auto& b : landscape_.bumps) {
    BoundBump bb{{}, 1.0 / (2.0 * b.width * b.width), b.amplitude};
    for (const auto& [name, c] : b.center) {
      const std::size_t i = lookup(name);
      if (space_[i].kind == VariableKind::kFault) {
        throw std::invalid_argument("bump center uses fault variable '" + name + "'");
      }
      bb.center.emplace_back(i, c);
    }
    bumps_.push_back(std::move(bb));
  }
  for (const auto& f : landscape_.faults) {
    const std::size_t i = lookup(f.variable);
    if (space_[i].kind != VariableKind::kFault) {
      throw std::invalid_argument("variable '" + f.variable + "' is bound as a fault but is not of kind fault");
    }
    faults_.push_back({i, f.effect, f.boost});
  }
  if (landscape_.precipitation_variable) {
    const std::size_t i = lookup(*landscape_.precipitation_variable);
    if (space_[i].lower < 0.0 || space_[i].upper > 100.0) {
      throw std::invalid_argument("precipitation variable '" + space_[i].name + "' must range within [0, 100]");
    }
    precipitation_ = i;
  }
  if (landscape_.road_segment_variable) {
    const std::size_t i = lookup(*landscape_.road_segment_variable);
    if (space_[i].kind != VariableKind::kStructural || space_[i].lower < 0.0) {
      throw std::invalid_argument("road segment variable '" + space_[i].name +
                                  "' must be structural and non-negative");
    }
    road_segment_ = i;
  }
}

double SyntheticEvaluator::intensity(std::span<const double> point) const {
  if (point.size() != space_.size()) throw std::invalid_argument("point dimension does not match the scene space");
  double sum = 0.0;
  for (const auto& b : bumps_) {
    double d2 = 0.0;
    for (const auto& [i, c] : b.center) d2 += (point[i] - c) * (point[i] - c);
    sum += b.amplitude * std::exp(-d2 * b.inv_two_width_sq);
  }
  for (const auto& f : faults_) {
    if (point[f.index] >= 0.5) sum += f.boost;
  }
  return sum;
}

EvaluationOutcome SyntheticEvaluator::evaluate(const Scene& scene, std::uint64_t seed) const {
  require_valid(scene, space_);
  const double level = intensity(normalize(scene, space_));

  DetectorState base;
  for (const auto& f : faults_) {
    if (scene.values[f.index] < 0.5) continue;
    auto& flags = f.effect == FaultEffect::kBlur ? base.blur : base.occlusion;
    flags.fill(true);
  }
  base.radar_ok = level <= landscape_.radar_cutoff;
  if (precipitation_) base.precipitation = scene.values[*precipitation_];
  if (road_segment_) base.road_segment = static_cast<int>(scene.values[*road_segment_]);

  // Uniforms for the infraction draws come first, then one normal per
  // timestep, so the stream layout does not depend on the landscape values.
  Rng rng(seed);
  const double u_stop = rng.uniform();
  const double u_red = rng.uniform();
  const auto& th = landscape_.infractions;

  EvaluationOutcome out;
  out.infractions.stop_sign = u_stop < ramp_probability(level, th.stop, th.ramp) ? 1 : 0;
  out.infractions.red_light = u_red < ramp_probability(level, th.red_light, th.ramp) ? 1 : 0;
  out.infractions.route_deviation = ramp_probability(level, th.deviation, th.ramp);

  const double mean = landscape_.base_martingale + landscape_.martingale_gain * level;
  out.trace.reserve(landscape_.trace_length);
  for (std::size_t t = 0; t < landscape_.trace_length; ++t) {
    DetectorState s = base;
    const double noise = rng.normal();
    s.martingale = std::max(0.0, mean + landscape_.noise_sigma * noise);
    out.trace.push_back(s);
  }
  return out;
}

}  // namespace riskscene
