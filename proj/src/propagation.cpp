// Copyright 2026 The perplab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "perplab/propagation.hpp"

#include <cmath>
#include <string>

#include "perplab/errors.hpp"

namespace perplab {
namespace {

// Sorted set of points with relative-tolerance identification.
class PointSet {
 public:
  explicit PointSet(double tolerance) : tolerance_(tolerance) {}

  bool insert(double w) {
    if (contains(w)) return false;
    points_.emplace(w, 0);
    return true;
  }
  bool contains(double w) const {
    const double slack = tolerance_ * std::abs(w);
    auto it = points_.lower_bound(w - slack);
    if (it == points_.end()) return false;
    return std::abs(it->first - w) <= tolerance_ * std::max(std::abs(w),
                                                            std::abs(it->first));
  }
  std::size_t size() const { return points_.size(); }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

 private:
  double tolerance_;
  std::map<double, char> points_;
};

}  // namespace

PropagationTable::PropagationTable(JointMQ instance, ScalarDist r0,
                                   PropagationLimits limits)
    : instance_(std::move(instance)), r0_(std::move(r0)), limits_(limits) {}

const ExtReal* PropagationTable::lookup(std::size_t depth, double w) const {
  if (depth >= levels_.size()) return nullptr;
  const Level& level = levels_[depth];
  const double slack = limits_.point_tolerance * std::abs(w);
  auto it = level.lower_bound(w - slack);
  if (it == level.end()) return nullptr;
  const double scale = std::max(std::abs(w), std::abs(it->first));
  if (std::abs(it->first - w) > limits_.point_tolerance * scale) return nullptr;
  return &it->second;
}

ExtReal PropagationTable::evaluate(std::size_t depth, double w) const {
  if (w == 0.0) return ExtReal::finite(1.0);
  if (depth == 0) return laplace(r0_, w);
  ExtReal sum;
  for (const Branch& b : instance_.branches()) {
    const double child = w * b.m;
    ExtReal below = ExtReal::finite(1.0);
    if (child != 0.0) {
      const ExtReal* cached = lookup(depth - 1, child);
      if (cached == nullptr) {
        throw std::logic_error("PropagationTable: missing child point");
      }
      below = *cached;
    }
    sum = sum + b.p * (laplace(b.q, w) * below);
  }
  return sum;
}

ExtReal PropagationTable::propagate(std::size_t n, double v) {
  if (v == 0.0) return ExtReal::finite(1.0);
  if (n > limits_.max_depth) {
    throw ResourceError("propagate: depth " + std::to_string(n) +
                        " exceeds the configured cap of " +
                        std::to_string(limits_.max_depth));
  }
  if (const ExtReal* hit = lookup(n, v)) return *hit;

  // Top-down: collect the points each level needs that are not cached yet.
  std::vector<PointSet> need(n + 1, PointSet(limits_.point_tolerance));
  need[n].insert(v);
  std::size_t pending = 1;
  for (std::size_t depth = n; depth >= 1; --depth) {
    for (const auto& [w, unused] : need[depth]) {
      for (const Branch& b : instance_.branches()) {
        const double child = w * b.m;
        if (child == 0.0 || lookup(depth - 1, child) != nullptr) continue;
        if (need[depth - 1].insert(child)) ++pending;
      }
    }
    if (cached_points_ + pending > limits_.max_points) {
      throw ResourceError("propagate: evaluation-point budget of " +
                          std::to_string(limits_.max_points) + " exceeded");
    }
  }

  if (levels_.size() <= n) levels_.resize(n + 1);
  for (std::size_t depth = 0; depth <= n; ++depth) {
    for (const auto& [w, unused] : need[depth]) {
      levels_[depth].emplace(w, evaluate(depth, w));
      ++cached_points_;
    }
  }
  return *lookup(n, v);
}

std::vector<ExtReal> PropagationTable::series(std::size_t n, double v) {
  std::vector<ExtReal> out;
  out.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) out.push_back(propagate(k, v));
  return out;
}

}  // namespace perplab
