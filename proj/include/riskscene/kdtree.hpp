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

namespace riskscene {

/// Squared l2 distance, summed in dimension order.
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Incrementally built kd-tree over points of a fixed dimension.
///
/// Points are appended with insert() (the split axis cycles with depth) or
/// loaded in bulk with build(), which splits at the median along the axis of
/// largest spread. Radius queries use a strict `distance < radius` test and
/// return exactly what a linear scan with squared_distance() returns.
class KdTree {
 public:
  explicit KdTree(std::size_t dimension);

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }

  /// Appends a point; returns its index (insertion order).
  std::size_t insert(std::span<const double> point);

  /// Replaces the contents with `points` and builds a balanced tree.
  void build(const std::vector<std::vector<double>>& points);

  std::span<const double> point(std::size_t index) const;

  /// Number of stored points p with ||p - query|| < radius.
  std::size_t count_within(std::span<const double> query, double radius) const;

  /// Indices (ascending) of stored points with ||p - query|| < radius.
  std::vector<std::size_t> radius_search(std::span<const double> query, double radius) const;

  /// Depth of the deepest leaf (1 for a single point, 0 when empty).
  std::size_t depth() const;

 private:
  static constexpr std::uint32_t kNone = 0xffffffffu;

  struct Node {
    std::uint32_t point = 0;
    std::uint32_t axis = 0;
    std::uint32_t left = kNone;
    std::uint32_t right = kNone;
  };

  template <typename Visit>
  void visit_within(std::span<const double> query, double radius, Visit&& visit) const;

  std::uint32_t build_range(std::vector<std::uint32_t>& ids, std::size_t begin, std::size_t end);

  std::size_t dim_;
  std::size_t count_ = 0;
  std::vector<double> coords_;
  std::vector<Node> nodes_;  // node i stores point i
  std::uint32_t root_ = kNone;
};

}  // namespace riskscene
