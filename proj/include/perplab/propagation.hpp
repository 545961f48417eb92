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

#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "perplab/distributions.hpp"
#include "perplab/ext_real.hpp"
#include "perplab/perpetuity.hpp"

namespace perplab {

struct PropagationLimits {
  std::size_t max_depth = 100'000;
  std::size_t max_points = 5'000'000;
  // Relative tolerance for identifying evaluation points v * prod(m).
  double point_tolerance = 1e-12;
};

/// Exact Laplace transforms L_n(v) = E[exp(v R_n)] of the recursion, via
///
///   L_{n+1}(v) = sum_i p_i E[exp(v Q_i)] L_n(v m_i),   L_0 = laplace(r0, .)
///
/// memoized over the evaluation-point tree {v * prod m}. +inf is absorbing.
/// Single writer; concurrent reads are safe only between propagation calls.
class PropagationTable {
 public:
  PropagationTable(JointMQ instance, ScalarDist r0,
                   PropagationLimits limits = {});

  /// L_n(v). Throws ResourceError when the depth or point budget would be
  /// exceeded; nothing is truncated silently.
  ExtReal propagate(std::size_t n, double v);

  /// L_0(v), ..., L_n(v).
  std::vector<ExtReal> series(std::size_t n, double v);

  std::size_t cached_points() const { return cached_points_; }
  const JointMQ& instance() const { return instance_; }
  const ScalarDist& r0() const { return r0_; }

 private:
  using Level = std::map<double, ExtReal>;

  const ExtReal* lookup(std::size_t depth, double w) const;
  ExtReal evaluate(std::size_t depth, double w) const;

  JointMQ instance_;
  ScalarDist r0_;
  PropagationLimits limits_;
  std::vector<Level> levels_;
  std::size_t cached_points_ = 0;
};

inline ExtReal propagate(PropagationTable& t, std::size_t n, double v) {
  return t.propagate(n, v);
}

}  // namespace perplab
