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

#include "riskscene/samplers.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace riskscene {

namespace {

constexpr std::array<std::uint32_t, kMaxHaltonDimension> kPrimes = {
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

// Stream id for sampler randomness; the evaluator uses per-iteration streams.
constexpr std::uint64_t kSamplerStream = 1;

bool dependencies_hold(const Scene& scene, const SceneSpace& space) {
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (space.governing_index(i) && !space.admissible(i, scene.values).contains(scene.values[i])) return false;
  }
  return true;
}

double from_unit(const VariableSpec& v, const Interval& iv, double u) {
  switch (v.kind) {
    case VariableKind::kFault: {
      const bool can0 = iv.contains(0.0);
      const bool can1 = iv.contains(1.0);
      if (can0 && can1) return u >= 0.5 ? 1.0 : 0.0;
      return can1 ? 1.0 : 0.0;
    }
    case VariableKind::kStructural: {
      const double lo = std::ceil(iv.lo);
      const double hi = std::floor(iv.hi);
      if (hi <= lo) return lo;
      return std::min(hi, lo + std::floor(u * (hi - lo + 1.0)));
    }
    case VariableKind::kEnvironmental:
      return iv.lo + u * (iv.hi - iv.lo);
  }
  return iv.lo;
}

}  // namespace

Scene sample_random(Rng& rng, const SceneSpace& space, std::size_t iteration) {
  return sample_in_region(rng, full_region(space), space, iteration);
}

RandomSampler::RandomSampler(SceneSpace space, std::uint64_t seed)
    : space_(std::move(space)), rng_(derive_seed(seed, kSamplerStream)) {}

std::optional<Scene> RandomSampler::next(const std::optional<Feedback>&) {
  return sample_random(rng_, space_, ++iteration_);
}

GridCursor::GridCursor(SceneSpace space) : space_(std::move(space)) {
  for (const auto& v : space_.variables()) {
    std::vector<double> axis;
    if (v.kind == VariableKind::kFault) {
      axis = {0.0, 1.0};
    } else if (v.degenerate()) {
      axis = {v.lower};
    } else {
      if (!v.grid_step) throw std::invalid_argument("variable '" + v.name + "' has no grid step");
      const double step = *v.grid_step;
      if (v.kind == VariableKind::kStructural && std::floor(step) != step) {
        throw std::invalid_argument("structural variable '" + v.name + "' needs an integer grid step");
      }
      // Index-based so that rounding cannot drop or duplicate the last point.
      const auto count = static_cast<std::size_t>(std::floor((v.upper - v.lower) / step + 1e-9)) + 1;
      for (std::size_t i = 0; i < count; ++i) axis.push_back(std::min(v.upper, v.lower + static_cast<double>(i) * step));
    }
    axes_.push_back(std::move(axis));
  }
  digits_.assign(axes_.size(), 0);
  done_ = axes_.empty();
}

double GridCursor::product_size() const {
  double n = axes_.empty() ? 0.0 : 1.0;
  for (const auto& a : axes_) n *= static_cast<double>(a.size());
  return n;
}

std::optional<Scene> GridCursor::next() {
  while (!done_) {
    Scene scene;
    scene.values.resize(axes_.size());
    for (std::size_t i = 0; i < axes_.size(); ++i) scene.values[i] = axes_[i][digits_[i]];

    std::size_t pos = axes_.size();
    for (;;) {
      if (pos == 0) {
        done_ = true;
        break;
      }
      --pos;
      if (++digits_[pos] < axes_[pos].size()) break;
      digits_[pos] = 0;
    }

    if (dependencies_hold(scene, space_)) {
      scene.iteration = ++iteration_;
      return scene;
    }
  }
  return std::nullopt;
}

std::vector<Scene> grid_enumerate(const SceneSpace& space, std::size_t limit) {
  GridCursor cursor(space);
  std::vector<Scene> out;
  while (out.size() < limit) {
    auto s = cursor.next();
    if (!s) break;
    out.push_back(std::move(*s));
  }
  return out;
}

std::optional<Scene> GridSampler::next(const std::optional<Feedback>&) { return cursor_.next(); }

double radical_inverse(std::uint64_t index, std::uint32_t base) {
  if (base < 2) throw std::invalid_argument("radical inverse base must be at least 2");
  const double inv = 1.0 / static_cast<double>(base);
  double scale = inv;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * scale;
    index /= base;
    scale *= inv;
  }
  return result;
}

std::vector<double> halton_point(std::uint64_t index, std::size_t dimension) {
  if (dimension > kMaxHaltonDimension) {
    throw std::invalid_argument("Halton sequence supports at most " + std::to_string(kMaxHaltonDimension) +
                                " dimensions");
  }
  std::vector<double> p(dimension);
  for (std::size_t j = 0; j < dimension; ++j) p[j] = radical_inverse(index, kPrimes[j]);
  return p;
}

Scene sample_halton(std::uint64_t index, const SceneSpace& space) {
  if (index == 0) throw std::invalid_argument("Halton index starts at 1");
  const auto u = halton_point(index, space.size());
  Scene scene;
  scene.iteration = static_cast<std::size_t>(index);
  scene.values.assign(space.size(), 0.0);
  for (std::size_t i : space.sampling_order()) {
    scene.values[i] = from_unit(space[i], space.admissible(i, scene.values), u[i]);
  }
  return scene;
}

HaltonSampler::HaltonSampler(SceneSpace space) : space_(std::move(space)) {
  if (space_.size() > kMaxHaltonDimension) {
    throw std::invalid_argument("Halton sampler supports at most " + std::to_string(kMaxHaltonDimension) +
                                " variables");
  }
}

std::optional<Scene> HaltonSampler::next(const std::optional<Feedback>&) { return sample_halton(++index_, space_); }

std::size_t count_neighbors(const KdTree& index, std::span<const double> point, double tau) {
  return index.count_within(point, tau);
}

RnsSampler::RnsSampler(SceneSpace space, RnsParams params, double delta, std::uint64_t seed)
    : space_(std::move(space)),
      params_(params),
      delta_(delta),
      rng_(derive_seed(seed, kSamplerStream)),
      index_(std::max<std::size_t>(space_.size(), 1)) {
  if (!(params_.tau > 0.0)) throw std::invalid_argument("RNS tau must be positive");
  if (params_.k_neighbors == 0) throw std::invalid_argument("RNS k must be positive");
}

Scene RnsSampler::explore() {
  mode_ = Mode::kExplore;
  anchor_.reset();
  return sample_random(rng_, space_, iteration_);
}

std::optional<Scene> RnsSampler::next(const std::optional<Feedback>& last) {
  ++iteration_;
  if (!last) return explore();

  explored_.push_back(normalize(last->scene, space_));
  risks_.push_back(last->risk);
  index_.insert(explored_.back());

  if (!is_high_risk(last->risk, delta_)) return explore();
  if (mode_ == Mode::kExplore) {
    anchor_ = last->scene;
    mode_ = Mode::kExploit;
  }
  const Point centre = normalize(*anchor_, space_);
  if (count_neighbors(index_, centre, params_.tau) >= params_.k_neighbors) return explore();
  return sample_in_region(rng_, bounded_region(*anchor_, space_), space_, iteration_, anchor_->values);
}

std::optional<Scene> RnsSampler::reference() const { return anchor_; }

Scene ucb_select(const GaussianProcess& gp, const BoundedRegion& region, const SceneSpace& space, double beta,
                 std::size_t candidate_count, Rng& rng, std::size_t iteration, std::span<const double> anchor) {
  if (candidate_count == 0) throw std::invalid_argument("candidate_count must be positive");
  std::vector<Scene> candidates;
  std::vector<std::vector<double>> points;
  candidates.reserve(candidate_count);
  points.reserve(candidate_count);
  for (std::size_t i = 0; i < candidate_count; ++i) {
    candidates.push_back(sample_in_region(rng, region, space, iteration, anchor));
    points.push_back(normalize(candidates.back(), space));
  }
  return candidates[ucb_argmax(gp, points, beta).index];
}

GboSampler::GboSampler(SceneSpace space, GboParams params, SeKernel kernel, std::uint64_t seed,
                       std::vector<Feedback> warm_start)
    : space_(std::move(space)), params_(std::move(params)), kernel_(kernel), rng_(derive_seed(seed, kSamplerStream)) {
  if (!(params_.beta >= 0.0)) throw std::invalid_argument("GBO beta must be non-negative");
  if (params_.candidate_count == 0) throw std::invalid_argument("GBO candidate_count must be positive");
  for (auto& w : warm_start) {
    require_valid(w.scene, space_);
    inputs_.push_back(normalize(w.scene, space_));
    targets_.push_back(w.risk);
    previous_ = std::move(w.scene);
  }
}

std::optional<Scene> GboSampler::next(const std::optional<Feedback>& last) {
  ++iteration_;
  if (last) {
    inputs_.push_back(normalize(last->scene, space_));
    targets_.push_back(last->risk);
    previous_ = last->scene;
  }
  if (!previous_ || inputs_.size() < params_.init_iterations || inputs_.empty()) {
    reference_.reset();
    return sample_random(rng_, space_, iteration_);
  }
  const auto gp = GaussianProcess::fit(inputs_, targets_, kernel_);
  reference_ = previous_;
  return ucb_select(gp, bounded_region(*previous_, space_), space_, params_.beta, params_.candidate_count, rng_,
                    iteration_, previous_->values);
}

std::unique_ptr<Sampler> make_sampler(const SamplerConfig& config, const SceneSpace& space, std::uint64_t seed,
                                      double delta, std::vector<Feedback> warm_start) {
  switch (config.kind) {
    case SamplerKind::kRandom:
      return std::make_unique<RandomSampler>(space, seed);
    case SamplerKind::kGrid:
      return std::make_unique<GridSampler>(space);
    case SamplerKind::kHalton:
      return std::make_unique<HaltonSampler>(space);
    case SamplerKind::kRns:
      return std::make_unique<RnsSampler>(space, config.rns, delta, seed);
    case SamplerKind::kGbo:
      return std::make_unique<GboSampler>(space, config.gbo, SeKernel{}, seed, std::move(warm_start));
  }
  throw std::invalid_argument("unknown sampler kind");
}

}  // namespace riskscene
