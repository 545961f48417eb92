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

#include <span>
#include <vector>

#include "perplab/distributions.hpp"
#include "perplab/ext_real.hpp"

namespace perplab {

/// One atom of M together with the conditional law of Q on {M = m}.
struct Branch {
  double m;
  double p;
  ScalarDist q;
};

/// Joint law of the driving pair (M, Q) of R_{n+1} = M_n R_n + Q_n.
///
/// M takes finitely many values in [0, 1]; branches are kept sorted by m.
class JointMQ {
 public:
  /// Throws InvalidInput on m outside [0, 1], duplicate m, a probability
  /// outside (0, 1] or a total mass away from 1.
  explicit JointMQ(std::vector<Branch> branches);

  std::span<const Branch> branches() const { return branches_; }

  /// The branch with m == 1, if any.
  const Branch* unit_branch() const;

  /// Q >= 0 on every branch and P(M < 1) > 0.
  bool in_bounded_regime() const;

 private:
  std::vector<Branch> branches_;
};

/// Critical exponents of the recursion, all in [0, +inf].
struct Exponents {
  ExtReal v_q;   // abscissa of the Q mixture
  ExtReal v_0;   // sup{v >= 0 : E[exp(vQ) M] < 1}
  ExtReal v_gg;  // min(v_q, v_0)
  ExtReal v_1;   // sup{v >= 0 : E[exp(vQ) 1{M = 1}] < 1}
  ExtReal v_c;   // min(v_q, v_1)
};

/// E[exp(vQ) M].
ExtReal ewm(const JointMQ& j, double v);

/// E[exp(vQ) 1{M = 1}]; zero when M never equals 1.
ExtReal ewq_on_m1(const JointMQ& j, double v);

/// E[exp(vQ) 1{M > 1 - epsilon}].
ExtReal ewq_near_one(const JointMQ& j, double v, double epsilon);

/// E[exp(vQ)] for the Q marginal.
ExtReal laplace_q(const JointMQ& j, double v);

/// Abscissa of the Q marginal: the minimum over branches.
ExtReal q_abscissa(const JointMQ& j);

/// Absolute tolerance of the bisections behind v_0 and v_1.
inline constexpr double kExponentTolerance = 1e-12;

/// v_0 and v_1 are found by doubling from 1e-6 and then bisecting the
/// predicate f(v) < 1. When f stays below 1 until the transform jumps to
/// +inf, the jump point (the conditional abscissa) is returned. v_0 is
/// evaluated on its own; the minimum with v_q is taken afterwards.
Exponents exponents(const JointMQ& j);

/// Law of Q + M X with X ~ mu independent of (M, Q). Exact for finite
/// atoms; throws Unsupported when mu or any conditional Q is parametric.
ScalarDist t_operator(const JointMQ& j, const ScalarDist& mu);

}  // namespace perplab
