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

// Dynamic risk from an augmented bow-tie model.
//
// Threats feed a top event through preventive barriers; mitigation barriers
// sit between the top event and the consequence. Barrier success
// probabilities are conditioned on the runtime detector state, threat
// frequencies on the road segment. The hazard rate of the consequence is
//
//   lambda = sum_threats f(t) * prod_preventive (1 - p_b) * prod_mitigation (1 - p_b)
//
// and a scene's risk is the time-average of lambda plus a weighted
// infraction count.

#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace riskscene {

enum class DetectorFlag {
  kBlurLeft,
  kBlurCenter,
  kBlurRight,
  kOcclusionLeft,
  kOcclusionCenter,
  kOcclusionRight,
};

std::string_view to_string(DetectorFlag flag);
std::optional<DetectorFlag> parse_detector_flag(std::string_view text);

/// Runtime state the barrier probabilities are conditioned on.
struct DetectorState {
  double martingale = 0.0;  // OOD monitor output, >= 0
  std::array<bool, 3> blur{};       // left, center, right camera
  std::array<bool, 3> occlusion{};  // left, center, right camera
  bool radar_ok = true;
  double precipitation = 0.0;  // percent
  int road_segment = 0;

  bool operator==(const DetectorState&) const = default;

  bool active(DetectorFlag flag) const;
  /// Throws std::invalid_argument when the state is out of its domain.
  void validate() const;
};

/// Barrier whose success depends on the LEC's OOD martingale through a
/// sigmoid, degraded by each active anomaly-detector flag.
struct LecSigmoidBarrier {
  double slope = 0.049;
  double midpoint = 5.754;
  double normalizer = 0.4;
  double sensor_failure_rate = 1.0;
  std::map<DetectorFlag, double> detector_probability;  // P(x|d)

  bool operator==(const LecSigmoidBarrier&) const = default;
};

/// Barrier whose success is tabulated over precipitation bins and radar state.
struct EnvLutBarrier {
  std::vector<double> edges;  // bin edges over [0, 100], strictly increasing
  std::vector<double> radar_ok;
  std::vector<double> radar_failed;

  bool operator==(const EnvLutBarrier&) const = default;
};

struct BarrierSpec {
  std::string id;
  std::variant<LecSigmoidBarrier, EnvLutBarrier> form;

  bool operator==(const BarrierSpec&) const = default;
};

struct Threat {
  std::string id;
  std::string description;
  std::vector<double> rate_by_segment;  // total over road segments 0..n-1

  bool operator==(const Threat&) const = default;
};

struct InfractionWeights {
  double stop_sign = 0.7;
  double red_light = 0.8;
  double route_deviation = 1.0;

  bool operator==(const InfractionWeights&) const = default;
};

struct BowTieModel {
  std::string name;
  std::string top_event;
  std::string consequence;
  std::vector<Threat> threats;
  std::vector<BarrierSpec> preventive;
  std::vector<BarrierSpec> mitigation;
  InfractionWeights infraction_weights;

  bool operator==(const BowTieModel&) const = default;

  /// Number of road segments every threat LUT covers.
  std::size_t segment_count() const { return threats.empty() ? 0 : threats.front().rate_by_segment.size(); }
  /// Throws std::invalid_argument when a model invariant is violated.
  void validate() const;
};

struct InfractionRecord {
  unsigned stop_sign = 0;
  unsigned red_light = 0;
  double route_deviation = 0.0;  // in [0, 1]

  bool operator==(const InfractionRecord&) const = default;
};

struct TimedRate {
  double time = 0.0;
  double lambda = 0.0;

  bool operator==(const TimedRate&) const = default;
};

struct RiskBreakdown {
  std::vector<TimedRate> lambda_trace;
  double rs = 0.0;
  double is = 0.0;
  double s_risk = 0.0;
  bool high_risk = false;
};

struct RiskWeights {
  double w1 = 1.0;
  double w2 = 1.0;
};

/// P(x | LEC) = 1 / (1 + exp(-slope * (m - midpoint))).
double sigmoid_lec(double martingale, double slope = 0.049, double midpoint = 5.754);

double barrier_success_prob(const BarrierSpec& barrier, const DetectorState& state);

/// Rate of `threat` on the state's road segment. Throws std::out_of_range for
/// a segment outside the LUT.
double threat_frequency(const Threat& threat, const DetectorState& state);

double hazard_rate(const BowTieModel& model, const DetectorState& state);

/// 1 - exp(-lambda * t).
double hazard_likelihood(double lambda, double duration);

/// Trapezoidal time-average of lambda over [t1, t2]. The trace must be sorted
/// by time inside [t1, t2]; it is held constant beyond its first and last
/// samples. Throws std::invalid_argument on an empty trace or t2 <= t1.
double resonate_score(std::span<const TimedRate> trace, double t1 = 0.0, double t2 = 1.0);

double infraction_score(const InfractionRecord& infractions, const InfractionWeights& weights = {});

double risk_score(double rs, double is, double w1 = 1.0, double w2 = 1.0);

/// Strict: a scene exactly at the threshold is not high-risk.
inline bool is_high_risk(double s_risk, double delta) { return s_risk - delta > 0.0; }

inline constexpr std::size_t kMinCalibrationSamples = 20;

/// 95th percentile by nearest rank (the ceil(0.95 n)-th order statistic).
/// Throws std::invalid_argument with fewer than 20 samples.
double calibrate_threshold(std::span<const double> calibration_risks);

/// Scores a detector trace sampled uniformly over [t1, t2].
RiskBreakdown score_scene(const BowTieModel& model, std::span<const DetectorState> trace,
                          const InfractionRecord& infractions, RiskWeights weights, double delta,
                          double t1 = 0.0, double t2 = 1.0);

/// Parses a bow-tie model document. Throws ParseError.
BowTieModel parse_bowtie_model(std::string_view text);

/// Model used when a campaign names no model file (same content as
/// config/roadway_obstruction.bowtie).
const BowTieModel& default_bowtie_model();
std::string_view default_bowtie_model_text();

}  // namespace riskscene
