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

// Scene samplers. Passive samplers (random, grid, Halton) ignore feedback;
// the active ones (RNS, GBO) use the risk of the previous scene.

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "riskscene/bowtie.hpp"
#include "riskscene/campaign_spec.hpp"
#include "riskscene/gaussian_process.hpp"
#include "riskscene/kdtree.hpp"
#include "riskscene/rng.hpp"
#include "riskscene/scene_model.hpp"

namespace riskscene {

/// Result of evaluating the previously emitted scene.
struct Feedback {
  Scene scene;
  double risk = 0.0;
};

class Sampler {
 public:
  virtual ~Sampler() = default;

  /// Next scene, or nullopt when the sampler is exhausted (grid only).
  /// `last` must hold the feedback for the previous scene on every call but
  /// the first.
  virtual std::optional<Scene> next(const std::optional<Feedback>& last) = 0;

  virtual SamplerKind kind() const = 0;

  /// Scene the most recently emitted scene was constrained against (the RNS
  /// anchor or the GBO predecessor); nullopt for unconstrained draws.
  virtual std::optional<Scene> reference() const { return std::nullopt; }
};

/// Uniform draw over the whole space with dependencies enforced.
Scene sample_random(Rng& rng, const SceneSpace& space, std::size_t iteration = 0);

class RandomSampler final : public Sampler {
 public:
  RandomSampler(SceneSpace space, std::uint64_t seed);
  std::optional<Scene> next(const std::optional<Feedback>& last) override;
  SamplerKind kind() const override { return SamplerKind::kRandom; }

 private:
  SceneSpace space_;
  Rng rng_;
  std::size_t iteration_ = 0;
};

/// Cartesian product of the per-variable grids, first variable slowest.
/// Grid points are lower, lower + step, ... <= upper; fault variables take
/// {0, 1}; degenerate variables their single value. Points violating a
/// dependency are skipped. Throws std::invalid_argument when a non-fault,
/// non-degenerate variable has no step or a structural step is not integral.
class GridCursor {
 public:
  explicit GridCursor(SceneSpace space);

  std::optional<Scene> next();
  /// Size of the full product, dependency-violating points included.
  double product_size() const;

 private:
  SceneSpace space_;
  std::vector<std::vector<double>> axes_;
  std::vector<std::size_t> digits_;
  bool done_ = false;
  std::size_t iteration_ = 0;
};

/// First `limit` grid scenes.
std::vector<Scene> grid_enumerate(const SceneSpace& space, std::size_t limit);

class GridSampler final : public Sampler {
 public:
  explicit GridSampler(SceneSpace space) : cursor_(std::move(space)) {}
  std::optional<Scene> next(const std::optional<Feedback>& last) override;
  SamplerKind kind() const override { return SamplerKind::kGrid; }

 private:
  GridCursor cursor_;
};

/// Van der Corput digit reversal of `index` in `base`. Throws
/// std::invalid_argument for base < 2.
double radical_inverse(std::uint64_t index, std::uint32_t base);

inline constexpr std::size_t kMaxHaltonDimension = 25;

/// Unit-cube Halton point; coordinate j uses the j-th prime as base.
/// Throws std::invalid_argument when dimension > 25.
std::vector<double> halton_point(std::uint64_t index, std::size_t dimension);

/// Maps the index-th Halton point into the space: faults are 1 when the
/// coordinate is >= 0.5, structural values are the floor of the scaled
/// integer range, dependent variables map into their admissible interval.
/// Throws std::invalid_argument for index 0 or too many variables.
Scene sample_halton(std::uint64_t index, const SceneSpace& space);

/// Does not depend on any seed.
class HaltonSampler final : public Sampler {
 public:
  explicit HaltonSampler(SceneSpace space);
  std::optional<Scene> next(const std::optional<Feedback>& last) override;
  SamplerKind kind() const override { return SamplerKind::kHalton; }

 private:
  SceneSpace space_;
  std::uint64_t index_ = 0;
};

/// Number of stored points strictly closer than `tau` to `point`.
std::size_t count_neighbors(const KdTree& index, std::span<const double> point, double tau);

/// Random neighborhood search. Explores with uniform draws; a high-risk
/// explore scene becomes the anchor and further scenes are drawn in its
/// bounded region until the anchor has k explored neighbors within tau
/// (normalized l2) or a neighborhood scene is not high-risk.
class RnsSampler final : public Sampler {
 public:
  enum class Mode { kExplore, kExploit };

  RnsSampler(SceneSpace space, RnsParams params, double delta, std::uint64_t seed);

  std::optional<Scene> next(const std::optional<Feedback>& last) override;
  SamplerKind kind() const override { return SamplerKind::kRns; }
  std::optional<Scene> reference() const override;

  Mode mode() const { return mode_; }
  const std::optional<Scene>& anchor() const { return anchor_; }
  const KdTree& explored_index() const { return index_; }
  const std::vector<Point>& explored() const { return explored_; }
  const std::vector<double>& explored_risks() const { return risks_; }

 private:
  Scene explore();

  SceneSpace space_;
  RnsParams params_;
  double delta_;
  Rng rng_;
  std::vector<Point> explored_;
  std::vector<double> risks_;
  KdTree index_;
  std::optional<Scene> anchor_;
  Mode mode_ = Mode::kExplore;
  std::size_t iteration_ = 0;
};

/// Draws `candidate_count` scenes in `region` and returns the one maximizing
/// mean + sqrt(beta) * stddev of `gp` at its normalized point (lowest
/// candidate index on ties). Throws std::invalid_argument for
/// candidate_count == 0.
Scene ucb_select(const GaussianProcess& gp, const BoundedRegion& region, const SceneSpace& space, double beta,
                 std::size_t candidate_count, Rng& rng, std::size_t iteration, std::span<const double> anchor = {});

/// GP-guided search. Random scenes until the training set (warm start plus
/// observations) reaches init_iterations; afterwards every scene is the UCB
/// choice inside the bounded region of its predecessor, with a full refit
/// on every call.
class GboSampler final : public Sampler {
 public:
  GboSampler(SceneSpace space, GboParams params, SeKernel kernel, std::uint64_t seed,
             std::vector<Feedback> warm_start = {});

  std::optional<Scene> next(const std::optional<Feedback>& last) override;
  SamplerKind kind() const override { return SamplerKind::kGbo; }
  std::optional<Scene> reference() const override { return reference_; }

  std::size_t training_size() const { return inputs_.size(); }

 private:
  SceneSpace space_;
  GboParams params_;
  SeKernel kernel_;
  Rng rng_;
  std::vector<Point> inputs_;
  std::vector<double> targets_;
  std::optional<Scene> previous_;
  std::optional<Scene> reference_;
  std::size_t iteration_ = 0;
};

/// Sampler for `config`; its random stream is derived from `seed`. Warm-start
/// points are used by GBO only.
std::unique_ptr<Sampler> make_sampler(const SamplerConfig& config, const SceneSpace& space, std::uint64_t seed,
                                      double delta, std::vector<Feedback> warm_start = {});

}  // namespace riskscene
