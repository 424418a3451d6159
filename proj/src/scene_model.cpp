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

#include "riskscene/scene_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "riskscene/lexer.hpp"

namespace riskscene {

namespace {

constexpr int kGoverningRedraws = 32;

bool is_integral(double v) { return std::floor(v) == v; }

std::string bracket(const Interval& iv) {
  return "[" + format_number(iv.lo) + ", " + format_number(iv.hi) + "]";
}

}  // namespace

void check_variable_spec(const VariableSpec& v) {
  auto fail = [&](const std::string& what) {
    throw std::invalid_argument("variable '" + v.name + "': " + what);
  };
  if (v.name.empty()) throw std::invalid_argument("variable with empty name");
  if (!std::isfinite(v.lower) || !std::isfinite(v.upper)) fail("range bounds must be finite");
  if (v.lower > v.upper) fail("range lower exceeds upper");
  if (v.kind == VariableKind::kFault && (v.lower != 0.0 || v.upper != 1.0)) {
    fail("fault variables must have range [0, 1]");
  }
  if (v.kind == VariableKind::kStructural && (!is_integral(v.lower) || !is_integral(v.upper))) {
    fail("structural variables must have integer bounds");
  }
  if (v.grid_step) {
    if (!(*v.grid_step > 0.0)) fail("step must be positive");
    if (!v.degenerate() && *v.grid_step > v.upper - v.lower) fail("step exceeds the range width");
  }
  if (v.delta && !(*v.delta >= 0.0)) fail("delta must be non-negative");
  if (v.dependency) {
    for (const auto& rule : v.dependency->rules) {
      if (rule.when.lo > rule.when.hi) fail("dependency interval lower exceeds upper");
      if (rule.allowed.lo > rule.allowed.hi) fail("restricted range lower exceeds upper");
      if (rule.allowed.lo < v.lower || rule.allowed.hi > v.upper) {
        fail("restricted range " + bracket(rule.allowed) + " lies outside " + bracket(v.range()));
      }
    }
    if (v.dependency->rules.empty()) fail("dependency without rules");
  }
}

std::string_view to_string(VariableKind kind) {
  switch (kind) {
    case VariableKind::kStructural:
      return "structural";
    case VariableKind::kEnvironmental:
      return "environmental";
    case VariableKind::kFault:
      return "fault";
  }
  return "environmental";
}

std::optional<VariableKind> parse_variable_kind(std::string_view text) {
  if (text == "structural") return VariableKind::kStructural;
  if (text == "environmental") return VariableKind::kEnvironmental;
  if (text == "fault") return VariableKind::kFault;
  return std::nullopt;
}

Interval Interval::intersect(const Interval& other) const {
  return {std::max(lo, other.lo), std::min(hi, other.hi)};
}

SceneSpace::SceneSpace(std::vector<VariableSpec> variables) : variables_(std::move(variables)) {
  if (variables_.empty()) throw std::invalid_argument("scene space needs at least one variable");
  std::set<std::string, std::less<>> names;
  for (auto& v : variables_) {
    check_variable_spec(v);
    if (!names.insert(v.name).second) throw std::invalid_argument("duplicate variable name '" + v.name + "'");
    if (v.dependency) {
      auto& rules = v.dependency->rules;
      std::sort(rules.begin(), rules.end(), [](const DependencyRule& a, const DependencyRule& b) {
        return a.when.lo != b.when.lo ? a.when.lo < b.when.lo : a.when.hi < b.when.hi;
      });
      for (std::size_t r = 1; r < rules.size(); ++r) {
        if (rules[r].when.lo < rules[r - 1].when.hi) {
          throw std::invalid_argument("variable '" + v.name + "': overlapping dependency intervals " +
                                      bracket(rules[r - 1].when) + " and " + bracket(rules[r].when));
        }
      }
    }
  }

  governing_.resize(variables_.size());
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const auto& v = variables_[i];
    if (!v.dependency) continue;
    const auto g = index_of(v.dependency->governing);
    if (!g) {
      throw std::invalid_argument("variable '" + v.name + "' depends on undeclared variable '" +
                                  v.dependency->governing + "'");
    }
    if (*g == i) throw std::invalid_argument("variable '" + v.name + "' depends on itself");
    if (variables_[*g].dependency) {
      throw std::invalid_argument("variable '" + v.name + "' depends on '" + variables_[*g].name +
                                  "', which is itself dependent");
    }
    for (const auto& rule : v.dependency->rules) {
      if (rule.when.lo < variables_[*g].lower || rule.when.hi > variables_[*g].upper) {
        throw std::invalid_argument("variable '" + v.name + "': dependency interval " + bracket(rule.when) +
                                    " lies outside the range of '" + variables_[*g].name + "'");
      }
    }
    governing_[i] = g;
  }

  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (!governing_[i]) order_.push_back(i);
  }
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (governing_[i]) order_.push_back(i);
  }
}

std::optional<std::size_t> SceneSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  return std::nullopt;
}

Interval SceneSpace::admissible(std::size_t var, std::span<const double> values) const {
  const auto& v = variables_[var];
  if (!governing_[var]) return v.range();
  const double g = values[*governing_[var]];
  for (const auto& rule : v.dependency->rules) {
    if (rule.when.contains(g)) return rule.allowed;
  }
  return v.range();
}

Scene make_scene(const SceneSpace& space, const std::map<std::string, double, std::less<>>& values,
                 std::size_t iteration) {
  Scene scene;
  scene.iteration = iteration;
  scene.values.assign(space.size(), 0.0);
  std::vector<bool> seen(space.size(), false);
  for (const auto& [name, value] : values) {
    const auto idx = space.index_of(name);
    if (!idx) throw std::invalid_argument("unknown variable '" + name + "'");
    scene.values[*idx] = value;
    seen[*idx] = true;
  }
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!seen[i]) throw std::invalid_argument("missing variable '" + space[i].name + "'");
  }
  return scene;
}

std::string ValidationResult::summary() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.message;
  }
  return out;
}

ValidationResult validate_scene(const Scene& scene, const SceneSpace& space) {
  ValidationResult result;
  if (scene.values.size() != space.size()) {
    result.violations.push_back({"", RuleKind::kShape,
                                 "scene has " + std::to_string(scene.values.size()) + " values but the space has " +
                                     std::to_string(space.size()) + " variables"});
    return result;
  }
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& v = space[i];
    const double x = scene.values[i];
    if (!std::isfinite(x) || !v.range().contains(x)) {
      result.violations.push_back(
          {v.name, RuleKind::kRange, v.name + "=" + format_number(x) + " outside " + bracket(v.range())});
      continue;
    }
    if (v.kind == VariableKind::kFault && x != 0.0 && x != 1.0) {
      result.violations.push_back({v.name, RuleKind::kKind, v.name + "=" + format_number(x) + " is not binary"});
      continue;
    }
    if (v.kind == VariableKind::kStructural && !is_integral(x)) {
      result.violations.push_back(
          {v.name, RuleKind::kKind, v.name + "=" + format_number(x) + " is not an integer segment"});
      continue;
    }
  }
  if (!result.ok()) return result;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto g = space.governing_index(i);
    if (!g) continue;
    const Interval allowed = space.admissible(i, scene.values);
    if (!allowed.contains(scene.values[i])) {
      result.violations.push_back({space[i].name, RuleKind::kDependency,
                                   space[i].name + "=" + format_number(scene.values[i]) + " not admissible for " +
                                       space[*g].name + "=" + format_number(scene.values[*g]) + " (allowed " +
                                       bracket(allowed) + ")"});
    }
  }
  return result;
}

void require_valid(const Scene& scene, const SceneSpace& space) {
  const auto result = validate_scene(scene, space);
  if (!result.ok()) throw std::invalid_argument("invalid scene: " + result.summary());
}

BoundedRegion full_region(const SceneSpace& space) {
  BoundedRegion region;
  for (const auto& v : space.variables()) region.intervals.push_back(v.range());
  return region;
}

BoundedRegion bounded_region(const Scene& anchor, const SceneSpace& space) {
  require_valid(anchor, space);
  BoundedRegion region = full_region(space);
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& v = space[i];
    if (v.kind == VariableKind::kFault || !v.delta) continue;
    const double a = anchor.values[i];
    region.intervals[i] = Interval{a - *v.delta, a + *v.delta}.intersect(v.range());
  }
  return region;
}

Point normalize(std::span<const double> values, const SceneSpace& space) {
  Point p(space.size(), 0.0);
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& v = space[i];
    if (v.degenerate()) continue;
    p[i] = (values[i] - v.lower) / (v.upper - v.lower);
  }
  return p;
}

Point normalize(const Scene& scene, const SceneSpace& space) { return normalize(scene.values, space); }

std::vector<double> denormalize(std::span<const double> point, const SceneSpace& space) {
  std::vector<double> values(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& v = space[i];
    values[i] = v.degenerate() ? v.lower : v.lower + point[i] * (v.upper - v.lower);
  }
  return values;
}

namespace {

double draw_in(Rng& rng, const VariableSpec& v, const Interval& iv) {
  switch (v.kind) {
    case VariableKind::kFault: {
      const bool can0 = iv.contains(0.0);
      const bool can1 = iv.contains(1.0);
      if (can0 && can1) return rng.bernoulli(0.5) ? 1.0 : 0.0;
      return can1 ? 1.0 : 0.0;
    }
    case VariableKind::kStructural: {
      const auto lo = static_cast<std::int64_t>(std::ceil(iv.lo));
      const auto hi = static_cast<std::int64_t>(std::floor(iv.hi));
      return static_cast<double>(rng.uniform_int(lo, std::max(lo, hi)));
    }
    case VariableKind::kEnvironmental:
      return rng.uniform(iv.lo, iv.hi);
  }
  return iv.lo;
}

bool has_value(const VariableSpec& v, const Interval& iv) {
  if (iv.empty()) return false;
  if (v.kind == VariableKind::kEnvironmental) return true;
  return std::ceil(iv.lo) <= std::floor(iv.hi);
}

}  // namespace

Scene sample_in_region(Rng& rng, const BoundedRegion& region, const SceneSpace& space, std::size_t iteration,
                       std::span<const double> anchor) {
  Scene scene;
  scene.iteration = iteration;
  scene.values.assign(space.size(), 0.0);
  const auto& order = space.sampling_order();

  for (std::size_t i : order) {
    if (!space.governing_index(i)) scene.values[i] = draw_in(rng, space[i], region.intervals[i]);
  }

  for (std::size_t i : order) {
    const auto g = space.governing_index(i);
    if (!g) continue;
    Interval iv = region.intervals[i].intersect(space.admissible(i, scene.values));
    for (int attempt = 0; attempt < kGoverningRedraws && !has_value(space[i], iv); ++attempt) {
      scene.values[*g] = draw_in(rng, space[*g], region.intervals[*g]);
      iv = region.intervals[i].intersect(space.admissible(i, scene.values));
    }
    if (!has_value(space[i], iv)) {
      if (anchor.size() != space.size()) {
        throw std::runtime_error("no admissible value for '" + space[i].name + "' inside the region");
      }
      scene.values[*g] = anchor[*g];
      iv = region.intervals[i].intersect(space.admissible(i, scene.values));
    }
    scene.values[i] = draw_in(rng, space[i], iv);
  }
  return scene;
}

bool within_step_constraints(const Scene& anchor, const Scene& next, const SceneSpace& space, double tolerance) {
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& v = space[i];
    if (v.kind == VariableKind::kFault || !v.delta) continue;
    if (std::abs(next.values[i] - anchor.values[i]) > *v.delta + tolerance) return false;
  }
  return true;
}

}  // namespace riskscene
