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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "riskscene/rng.hpp"
#include "riskscene/scene_model.hpp"

namespace riskscene {

/// Percentage of risks strictly above delta. Throws on an empty list.
double total_risk_scenes(std::span<const double> risks, double delta);

struct KMeansResult {
  std::size_t k = 0;
  std::vector<std::size_t> labels;
  std::vector<Point> centroids;
  double inertia = 0.0;                // within-cluster sum of squares
  std::vector<double> inertia_history;  // after each Lloyd iteration
  std::size_t iterations = 0;
};

inline constexpr std::size_t kMaxLloydIterations = 100;

/// Lloyd's algorithm with k-means++ seeding. Empty clusters are re-seeded
/// with the point farthest from its centroid. Throws std::invalid_argument
/// unless 2 <= k <= points.size().
KMeansResult kmeans(const std::vector<Point>& points, std::size_t k, Rng& rng);

/// Mean silhouette with l2 distances; points in singleton clusters score 0.
/// Throws std::invalid_argument with fewer than two distinct labels.
double silhouette(const std::vector<Point>& points, std::span<const std::size_t> labels);

struct ClusterAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> labels;
  double silhouette = 0.0;
};

struct ClusterOptions {
  std::size_t k_max = 10;
  std::size_t restarts = 10;
};

/// For k = 2..min(k_max, n-1) keeps the lowest-inertia restart and returns
/// the k with the highest silhouette (smaller k on ties). Throws
/// std::invalid_argument for fewer than 3 points or k_max < 2.
ClusterAssignment select_clusters(const std::vector<Point>& points, std::uint64_t seed, ClusterOptions options = {});

/// Population variance of the per-cluster mean risks.
double diversity(std::span<const double> risks, std::span<const std::size_t> labels);

}  // namespace riskscene
