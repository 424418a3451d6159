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

// Scene-variable search space, per-variable sampling constraints and the
// bounded neighbourhood region used by the active samplers.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "riskscene/rng.hpp"

namespace riskscene {

enum class VariableKind { kStructural, kEnvironmental, kFault };

std::string_view to_string(VariableKind kind);
std::optional<VariableKind> parse_variable_kind(std::string_view text);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double v) const { return v >= lo && v <= hi; }
  bool empty() const { return lo > hi; }
  Interval intersect(const Interval& other) const;

  bool operator==(const Interval&) const = default;
};

/// While the governing variable lies in `when`, the dependent variable is
/// restricted to `allowed`.
struct DependencyRule {
  Interval when;
  Interval allowed;

  bool operator==(const DependencyRule&) const = default;
};

struct Dependency {
  std::string governing;
  std::vector<DependencyRule> rules;  // kept sorted by `when`

  bool operator==(const Dependency&) const = default;
};

struct VariableSpec {
  std::string name;
  VariableKind kind = VariableKind::kEnvironmental;
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> grid_step;
  std::optional<double> delta;  // max change between consecutive scenes
  std::optional<Dependency> dependency;

  bool operator==(const VariableSpec&) const = default;

  bool degenerate() const { return lower == upper; }
  /// Structural (road-segment class) and fault variables take integer values.
  bool integer_valued() const { return kind != VariableKind::kEnvironmental; }
  Interval range() const { return {lower, upper}; }
};

/// Checks the single-variable invariants. Throws std::invalid_argument.
void check_variable_spec(const VariableSpec& variable);

/// Validated, immutable list of scene variables. Declaration order is the
/// canonical dimension order of every vector representation.
class SceneSpace {
 public:
  /// Throws std::invalid_argument when a variable invariant is violated.
  explicit SceneSpace(std::vector<VariableSpec> variables);

  std::size_t size() const { return variables_.size(); }
  const std::vector<VariableSpec>& variables() const { return variables_; }
  const VariableSpec& operator[](std::size_t i) const { return variables_[i]; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  /// Index of the governing variable of `var`, if it has a dependency.
  std::optional<std::size_t> governing_index(std::size_t var) const { return governing_[var]; }

  /// Range of `var` admissible given the (already assigned) governing value.
  Interval admissible(std::size_t var, std::span<const double> values) const;

  /// Variables without a dependency first, then dependent ones.
  const std::vector<std::size_t>& sampling_order() const { return order_; }

  bool operator==(const SceneSpace& other) const { return variables_ == other.variables_; }

 private:
  std::vector<VariableSpec> variables_;
  std::vector<std::optional<std::size_t>> governing_;
  std::vector<std::size_t> order_;
};

/// One sampler iteration's configuration; values in declaration order.
struct Scene {
  std::size_t iteration = 0;
  std::vector<double> values;

  bool operator==(const Scene&) const = default;
};

/// Builds a scene from a name-keyed assignment. Throws std::invalid_argument
/// on an unknown or missing variable name.
Scene make_scene(const SceneSpace& space, const std::map<std::string, double, std::less<>>& values,
                 std::size_t iteration = 0);

enum class RuleKind { kShape, kRange, kKind, kDependency };

struct Violation {
  std::string variable;
  RuleKind rule = RuleKind::kRange;
  std::string message;
};

struct ValidationResult {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

ValidationResult validate_scene(const Scene& scene, const SceneSpace& space);

/// Throws std::invalid_argument listing the violations if the scene is invalid.
void require_valid(const Scene& scene, const SceneSpace& space);

struct BoundedRegion {
  std::vector<Interval> intervals;  // one per variable, declaration order
};

/// Whole search space as a region.
BoundedRegion full_region(const SceneSpace& space);

/// Box of +/- delta around `anchor`, clipped to each range; fault variables and
/// variables without a delta keep their full range.
BoundedRegion bounded_region(const Scene& anchor, const SceneSpace& space);

using Point = std::vector<double>;

/// Maps values into the unit cube; degenerate variables map to 0.
Point normalize(const Scene& scene, const SceneSpace& space);
Point normalize(std::span<const double> values, const SceneSpace& space);
std::vector<double> denormalize(std::span<const double> point, const SceneSpace& space);

/// Draws a scene uniformly inside `region`. Fault variables are Bernoulli(1/2),
/// structural ones uniform over the integers in their interval, and dependent
/// variables are drawn inside the dependency-restricted interval. When the
/// restriction leaves nothing inside the region the governing variables are
/// redrawn, and finally reset to `anchor` (which is admissible by validity).
Scene sample_in_region(Rng& rng, const BoundedRegion& region, const SceneSpace& space,
                       std::size_t iteration, std::span<const double> anchor = {});

/// Per-variable |next - anchor| <= delta (up to `tolerance`) for every variable
/// carrying a delta.
bool within_step_constraints(const Scene& anchor, const Scene& next, const SceneSpace& space,
                             double tolerance = 1e-9);

}  // namespace riskscene
