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

#include "riskscene/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "riskscene/bowtie.hpp"
#include "riskscene/kdtree.hpp"

namespace riskscene {

double total_risk_scenes(std::span<const double> risks, double delta) {
  if (risks.empty()) throw std::invalid_argument("total_risk_scenes needs at least one risk");
  std::size_t high = 0;
  for (double r : risks) high += is_high_risk(r, delta) ? 1 : 0;
  return 100.0 * static_cast<double>(high) / static_cast<double>(risks.size());
}

namespace {

void check_points(const std::vector<Point>& points) {
  for (const auto& p : points) {
    if (p.size() != points.front().size()) throw std::invalid_argument("points have inconsistent dimensions");
  }
}

std::vector<Point> seed_plus_plus(const std::vector<Point>& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.size();
  std::vector<Point> centroids;
  centroids.push_back(points[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1))]);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  while (centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], centroids.back()));
      total += d2[i];
    }
    std::size_t pick = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (target < acc) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
    }
    centroids.push_back(points[pick]);
  }
  return centroids;
}

std::size_t nearest(const Point& p, const std::vector<Point>& centroids) {
  std::size_t best = 0;
  double best_d = squared_distance(p, centroids[0]);
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    const double d = squared_distance(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

double inertia_of(const std::vector<Point>& points, const std::vector<std::size_t>& labels,
                  const std::vector<Point>& centroids) {
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) sum += squared_distance(points[i], centroids[labels[i]]);
  return sum;
}

// Gives every empty cluster the point farthest from its current centroid,
// taken from a cluster that keeps at least one member.
bool fill_empty_clusters(const std::vector<Point>& points, std::vector<std::size_t>& labels,
                         std::vector<Point>& centroids) {
  const std::size_t k = centroids.size();
  bool changed = false;
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t l : labels) ++sizes[l];
    if (sizes[c] > 0) continue;
    std::size_t far = points.size();
    double far_d = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (sizes[labels[i]] < 2) continue;
      const double d = squared_distance(points[i], centroids[labels[i]]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far == points.size()) break;  // unreachable while k <= n
    labels[far] = c;
    centroids[c] = points[far];
    changed = true;
  }
  return changed;
}

void update_centroids(const std::vector<Point>& points, const std::vector<std::size_t>& labels,
                      std::vector<Point>& centroids) {
  const std::size_t dim = points.front().size();
  std::vector<Point> sums(centroids.size(), Point(dim, 0.0));
  std::vector<std::size_t> counts(centroids.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) sums[labels[i]][j] += points[i][j];
    ++counts[labels[i]];
  }
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    if (counts[c] == 0) continue;
    for (std::size_t j = 0; j < dim; ++j) centroids[c][j] = sums[c][j] / static_cast<double>(counts[c]);
  }
}

}  // namespace

KMeansResult kmeans(const std::vector<Point>& points, std::size_t k, Rng& rng) {
  if (k < 2) throw std::invalid_argument("kmeans needs k >= 2");
  if (k > points.size()) throw std::invalid_argument("kmeans needs k <= number of points");
  check_points(points);

  KMeansResult r;
  r.k = k;
  r.centroids = seed_plus_plus(points, k, rng);
  r.labels.assign(points.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) r.labels[i] = nearest(points[i], r.centroids);
  fill_empty_clusters(points, r.labels, r.centroids);

  for (std::size_t it = 0; it < kMaxLloydIterations; ++it) {
    update_centroids(points, r.labels, r.centroids);
    bool changed = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::size_t c = nearest(points[i], r.centroids);
      if (c != r.labels[i]) {
        r.labels[i] = c;
        changed = true;
      }
    }
    if (fill_empty_clusters(points, r.labels, r.centroids)) {
      changed = true;
      update_centroids(points, r.labels, r.centroids);
    }
    r.iterations = it + 1;
    r.inertia_history.push_back(inertia_of(points, r.labels, r.centroids));
    if (!changed) break;
  }
  update_centroids(points, r.labels, r.centroids);
  r.inertia = inertia_of(points, r.labels, r.centroids);
  return r;
}

double silhouette(const std::vector<Point>& points, std::span<const std::size_t> labels) {
  if (points.size() != labels.size()) throw std::invalid_argument("silhouette needs one label per point");
  std::map<std::size_t, std::size_t> sizes;
  for (std::size_t l : labels) ++sizes[l];
  if (sizes.size() < 2) throw std::invalid_argument("silhouette needs at least two clusters");

  const std::size_t n = points.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (sizes[labels[i]] == 1) continue;
    std::map<std::size_t, double> sum;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) sum[labels[j]] += std::sqrt(squared_distance(points[i], points[j]));
    }
    const double a = sum[labels[i]] / static_cast<double>(sizes[labels[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [label, count] : sizes) {
      if (label != labels[i]) b = std::min(b, sum[label] / static_cast<double>(count));
    }
    const double m = std::max(a, b);
    total += m > 0.0 ? (b - a) / m : 0.0;
  }
  return total / static_cast<double>(n);
}

ClusterAssignment select_clusters(const std::vector<Point>& points, std::uint64_t seed, ClusterOptions options) {
  if (points.size() < 3) throw std::invalid_argument("cluster selection needs at least 3 points");
  if (options.k_max < 2) throw std::invalid_argument("k_max must be at least 2");
  if (options.restarts == 0) throw std::invalid_argument("restarts must be positive");

  ClusterAssignment best;
  best.silhouette = -std::numeric_limits<double>::infinity();
  const std::size_t k_hi = std::min(options.k_max, points.size() - 1);
  for (std::size_t k = 2; k <= k_hi; ++k) {
    KMeansResult best_run;
    best_run.inertia = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < options.restarts; ++r) {
      Rng rng(derive_seed(seed, k * 1000 + r));
      auto run = kmeans(points, k, rng);
      if (run.inertia < best_run.inertia) best_run = std::move(run);
    }
    const double s = silhouette(points, best_run.labels);
    if (s > best.silhouette) best = {k, best_run.labels, s};
  }
  return best;
}

double diversity(std::span<const double> risks, std::span<const std::size_t> labels) {
  if (risks.size() != labels.size()) throw std::invalid_argument("diversity needs one label per risk");
  std::map<std::size_t, std::pair<double, std::size_t>> acc;
  for (std::size_t i = 0; i < risks.size(); ++i) {
    acc[labels[i]].first += risks[i];
    ++acc[labels[i]].second;
  }
  if (acc.empty()) return 0.0;
  std::vector<double> means;
  for (const auto& [label, sc] : acc) means.push_back(sc.first / static_cast<double>(sc.second));
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= static_cast<double>(means.size());
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  return var / static_cast<double>(means.size());
}

}  // namespace riskscene
