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

#include <optional>
#include <vector>

#include "perplab/distributions.hpp"
#include "perplab/ext_real.hpp"
#include "perplab/perpetuity.hpp"

namespace perplab {

/// Explicit upper bound on sup_n E[exp(v R_n)] for v < v_c.
///
/// Built by descending from v to (1 - epsilon)^k v < v_0, bounding the bottom
/// level with the geometric-series estimate, then climbing back with
///   Lbar(w) <= Lbar((1 - epsilon) w) L_Q(w) / (1 - rho_w) + L_0(w)
/// where rho_w = E[exp(wQ) 1{M > 1 - epsilon}].
struct BoundCertificate {
  double v = 0.0;
  double epsilon = 0.5;
  // rhos[j] is the contraction factor at level (1 - epsilon)^j v, j < k.
  std::vector<double> rhos;
  int k = 0;
  ExtReal base_bound;
  ExtReal chained_bound;
};

struct DivergenceCertificate {
  enum class Reason { kAboveVQ, kRho0 };

  double v = 0.0;
  Reason reason = Reason::kAboveVQ;
  // E[exp(vQ) 1{M = 1}] when reason == kRho0.
  ExtReal rho0;
};

/// Margin required of rho(v, epsilon) in the epsilon search.
inline constexpr double kEpsilonMargin = 0.999;
/// epsilon is searched over 2^-1, ..., 2^-kEpsilonGridDepth.
inline constexpr int kEpsilonGridDepth = 20;
/// Relative half-width of the band around v_c reported as Boundary.
inline constexpr double kBoundaryBand = 1e-9;

/// Limit of the geometric-series bound,
///   v / (1 - E[exp(vQ) M]) * d_v(T mu0, mu0) + E[exp(v R_0)],
/// with any quadrature error added to the distance. For v <= 0 the bound is
/// 1 since R_n >= 0. Throws RegimeError unless v < min(v_0, v_q), Q >= 0
/// and R_0 is a finite nonnegative law.
ExtReal gg_geometric_bound(const JointMQ& j, const ScalarDist& r0, double v);

/// Throws RegimeError for v >= v_c or outside the regime Q >= 0,
/// P(M < 1) > 0, R_0 >= 0 finitely supported.
BoundCertificate certify_bounded(const JointMQ& j, const ScalarDist& r0,
                                 double v);

/// Throws RegimeError for v <= v_c.
DivergenceCertificate certify_divergent(const JointMQ& j, double v);

struct Classification {
  enum class Verdict { kBoundedCertified, kDivergentCertified, kBoundary };

  double v = 0.0;
  ExtReal v_c;
  Verdict verdict = Verdict::kBoundary;
  std::optional<BoundCertificate> bounded;
  std::optional<DivergenceCertificate> divergent;
};

const char* to_string(Classification::Verdict verdict);
const char* to_string(DivergenceCertificate::Reason reason);

/// Bounded below v_c, divergent above, Boundary within
/// kBoundaryBand * max(1, v_c) of v_c.
Classification classify(const JointMQ& j, const ScalarDist& r0, double v);

}  // namespace perplab
