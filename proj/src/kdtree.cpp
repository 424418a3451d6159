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

#include "riskscene/kdtree.hpp"

#include <algorithm>
#include <stdexcept>

namespace riskscene {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

KdTree::KdTree(std::size_t dimension) : dim_(dimension) {
  if (dimension == 0) throw std::invalid_argument("kd-tree dimension must be positive");
}

std::span<const double> KdTree::point(std::size_t index) const {
  return std::span<const double>(coords_).subspan(index * dim_, dim_);
}

std::size_t KdTree::insert(std::span<const double> p) {
  if (p.size() != dim_) throw std::invalid_argument("point dimension does not match the kd-tree");
  if (count_ >= kNone) throw std::length_error("kd-tree is full");
  const auto id = static_cast<std::uint32_t>(count_);
  coords_.insert(coords_.end(), p.begin(), p.end());
  nodes_.push_back(Node{id, 0, kNone, kNone});
  ++count_;

  if (root_ == kNone) {
    root_ = id;
    return id;
  }
  std::uint32_t cur = root_;
  for (;;) {
    Node& node = nodes_[cur];
    const double split = coords_[node.point * dim_ + node.axis];
    std::uint32_t& child = p[node.axis] < split ? node.left : node.right;
    if (child == kNone) {
      child = id;
      nodes_[id].axis = static_cast<std::uint32_t>((node.axis + 1) % dim_);
      return id;
    }
    cur = child;
  }
}

void KdTree::build(const std::vector<std::vector<double>>& points) {
  coords_.clear();
  nodes_.clear();
  count_ = 0;
  root_ = kNone;
  if (points.size() >= kNone) throw std::length_error("too many points for the kd-tree");
  for (const auto& p : points) {
    if (p.size() != dim_) throw std::invalid_argument("point dimension does not match the kd-tree");
    coords_.insert(coords_.end(), p.begin(), p.end());
  }
  count_ = points.size();
  nodes_.resize(count_);
  std::vector<std::uint32_t> ids(count_);
  for (std::size_t i = 0; i < count_; ++i) ids[i] = static_cast<std::uint32_t>(i);
  root_ = build_range(ids, 0, count_);
}

std::uint32_t KdTree::build_range(std::vector<std::uint32_t>& ids, std::size_t begin, std::size_t end) {
  if (begin >= end) return kNone;

  std::size_t axis = 0;
  double best_spread = -1.0;
  for (std::size_t a = 0; a < dim_; ++a) {
    double lo = coords_[ids[begin] * dim_ + a];
    double hi = lo;
    for (std::size_t i = begin + 1; i < end; ++i) {
      const double v = coords_[ids[i] * dim_ + a];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      axis = a;
    }
  }

  const std::size_t mid = begin + (end - begin) / 2;
  auto key = [&](std::uint32_t id) { return coords_[id * dim_ + axis]; };
  std::nth_element(ids.begin() + static_cast<std::ptrdiff_t>(begin), ids.begin() + static_cast<std::ptrdiff_t>(mid),
                   ids.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::uint32_t a, std::uint32_t b) { return key(a) < key(b); });
  // Everything left of the pivot is strictly below the split value, so
  // equal keys always go right.
  const double split = key(ids[mid]);
  const auto first = ids.begin() + static_cast<std::ptrdiff_t>(begin);
  const auto last = ids.begin() + static_cast<std::ptrdiff_t>(end);
  const auto upper = std::partition(first, last, [&](std::uint32_t id) { return key(id) < split; });
  std::iter_swap(upper, std::find_if(upper, last, [&](std::uint32_t id) { return key(id) == split; }));
  const auto pivot = static_cast<std::size_t>(upper - ids.begin());

  const std::uint32_t id = ids[pivot];
  Node& node = nodes_[id];
  node.point = id;
  node.axis = static_cast<std::uint32_t>(axis);
  const std::uint32_t left = build_range(ids, begin, pivot);
  const std::uint32_t right = build_range(ids, pivot + 1, end);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

template <typename Visit>
void KdTree::visit_within(std::span<const double> query, double radius, Visit&& visit) const {
  if (query.size() != dim_) throw std::invalid_argument("query dimension does not match the kd-tree");
  if (root_ == kNone || !(radius > 0.0)) return;
  const double r2 = radius * radius;
  std::vector<std::uint32_t> stack{root_};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    const auto p = point(node.point);
    if (squared_distance(p, query) < r2) visit(node.point);
    const double diff = query[node.axis] - p[node.axis];
    const std::uint32_t near_child = diff < 0.0 ? node.left : node.right;
    const std::uint32_t far_child = diff < 0.0 ? node.right : node.left;
    // Points across the split plane are at least |diff| away along this axis.
    if (far_child != kNone && diff * diff < r2) stack.push_back(far_child);
    if (near_child != kNone) stack.push_back(near_child);
  }
}

std::size_t KdTree::count_within(std::span<const double> query, double radius) const {
  std::size_t count = 0;
  visit_within(query, radius, [&](std::uint32_t) { ++count; });
  return count;
}

std::vector<std::size_t> KdTree::radius_search(std::span<const double> query, double radius) const {
  std::vector<std::size_t> out;
  visit_within(query, radius, [&](std::uint32_t id) { out.push_back(id); });
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t KdTree::depth() const {
  if (root_ == kNone) return 0;
  std::size_t best = 0;
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{root_, 1}};
  while (!stack.empty()) {
    const auto [id, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (nodes_[id].left != kNone) stack.push_back({nodes_[id].left, d + 1});
    if (nodes_[id].right != kNone) stack.push_back({nodes_[id].right, d + 1});
  }
  return best;
}

}  // namespace riskscene
