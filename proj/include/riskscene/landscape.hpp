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

// Synthetic evaluator: a ground-truth intensity field over the normalized
// scene space, turned into a detector-state trace and an infraction record.
//
// Landscape documents:
//
//   landscape NAME {
//     base_martingale = NUM; martingale_gain = NUM; noise_sigma = NUM;
//     radar_cutoff = NUM; trace_length = INT;
//     precipitation = VAR; road_segment = VAR;
//     infractions { stop = NUM; red_light = NUM; deviation = NUM; ramp = NUM; }
//     bump { center { VAR = NUM; ... } width = NUM; amplitude = NUM; }
//     fault VAR { flags = blur | occlusion; boost = NUM; }
//   }
//
// Bump centers name a subset of the non-fault variables; unnamed dimensions
// do not enter the distance.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riskscene/bowtie.hpp"
#include "riskscene/scene_model.hpp"

namespace riskscene {

struct Bump {
  std::map<std::string, double> center;  // normalized coordinate per variable
  double width = 0.15;
  double amplitude = 1.0;

  bool operator==(const Bump&) const = default;
};

enum class FaultEffect { kBlur, kOcclusion };

struct FaultBinding {
  std::string variable;
  FaultEffect effect = FaultEffect::kBlur;
  double boost = 0.0;  // additive intensity while the fault is active

  bool operator==(const FaultBinding&) const = default;
};

/// Intensity thresholds for the infraction draws. An infraction has
/// probability clamp((intensity - threshold) / ramp, 0, 1).
struct InfractionThresholds {
  double stop = 0.6;
  double red_light = 0.7;
  double deviation = 0.8;
  double ramp = 0.2;

  bool operator==(const InfractionThresholds&) const = default;
};

struct Landscape {
  std::string name;
  std::vector<Bump> bumps;
  std::vector<FaultBinding> faults;
  double base_martingale = 2.0;
  double martingale_gain = 80.0;
  double noise_sigma = 0.0;
  double radar_cutoff = 0.6;  // radar fails above this intensity
  std::size_t trace_length = 60;
  std::optional<std::string> precipitation_variable;
  std::optional<std::string> road_segment_variable;
  InfractionThresholds infractions;

  bool operator==(const Landscape&) const = default;

  /// Throws std::invalid_argument when a field is out of its domain.
  void validate() const;
};

/// Parses and validates a landscape document. Throws ParseError.
Landscape parse_landscape(std::string_view text);

/// Landscape used when a campaign names no evaluator file (same content as
/// config/two_bump.landscape).
const Landscape& default_landscape();
std::string_view default_landscape_text();

struct EvaluationOutcome {
  std::vector<DetectorState> trace;
  InfractionRecord infractions;

  bool operator==(const EvaluationOutcome&) const = default;
};

/// Anything that maps a scene to a detector trace and infractions.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual EvaluationOutcome evaluate(const Scene& scene, std::uint64_t scene_seed) const = 0;
};

/// Seed of the evaluator stream for one iteration of a campaign.
std::uint64_t scene_seed(std::uint64_t campaign_seed, std::size_t iteration);

/// A landscape bound to a concrete scene space.
class SyntheticEvaluator final : public Evaluator {
 public:
  /// Throws std::invalid_argument when the landscape names unknown
  /// variables, binds a non-fault variable as a fault, or uses a
  /// precipitation/road-segment variable whose range does not fit.
  SyntheticEvaluator(Landscape landscape, SceneSpace space);

  /// Sum of the bump contributions at a unit-cube point plus the boosts of
  /// the active faults (fault coordinates >= 0.5).
  double intensity(std::span<const double> point) const;

  /// Throws std::invalid_argument for an invalid scene.
  EvaluationOutcome evaluate(const Scene& scene, std::uint64_t scene_seed) const override;

  const Landscape& landscape() const { return landscape_; }
  const SceneSpace& space() const { return space_; }

 private:
  struct BoundBump {
    std::vector<std::pair<std::size_t, double>> center;
    double inv_two_width_sq;
    double amplitude;
  };
  struct BoundFault {
    std::size_t index;
    FaultEffect effect;
    double boost;
  };

  Landscape landscape_;
  SceneSpace space_;
  std::vector<BoundBump> bumps_;
  std::vector<BoundFault> faults_;
  std::optional<std::size_t> precipitation_;
  std::optional<std::size_t> road_segment_;
};

}  // namespace riskscene
