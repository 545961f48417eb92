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

#include <vector>

#include "perplab/distributions.hpp"
#include "perplab/perpetuity.hpp"

namespace perplab {

/// A finite mixture of shifted laws: sum_k w_k * Law(shift_k + X_k).
/// Represents T(mu) for finitely supported mu and parametric Q.
class LawMixture {
 public:
  struct Component {
    double weight;
    double shift;
    ScalarDist law;
  };

  explicit LawMixture(std::vector<Component> components);
  LawMixture(const ScalarDist& d);  // NOLINT: implicit single component

  const std::vector<Component>& components() const { return components_; }

  double survival(double u) const;
  ExtReal laplace(double v) const;
  double support_min() const;
  /// All components finitely supported.
  bool is_finite_discrete() const;
  /// Merged atoms; requires is_finite_discrete().
  std::vector<Atom> atoms() const;
  /// The law is the point mass at 0.
  bool is_dirac_zero() const;

  /// Closed form of the integral of exp(rho u) P(X > u) over [a, inf).
  double tail_integral(double rho, double a) const;

 private:
  std::vector<Component> components_;
};

/// Law of Q + M X for X ~ mu finitely supported; Q may be parametric.
LawMixture t_image(const JointMQ& j, const ScalarDist& mu);

/// Nonnegative support and a finite exponential moment of order rho > 0.
bool in_metric_domain(const LawMixture& d, double rho);

struct Distance {
  double value = 0.0;
  double abs_error = 0.0;  // zero on the exact paths
  bool exact = true;
};

/// Absolute error target of the quadrature path.
inline constexpr double kQuadratureTolerance = 1e-10;

/// d_rho(mu, nu) = int_0^inf exp(rho u) |P(mu > u) - P(nu > u)| du.
///
/// Finite laws are integrated exactly by a sweep over the merged support.
/// When one side is the point mass at 0 the distance is (L(rho) - 1) / rho.
/// Everything else goes through Gauss-Kronrod quadrature between jump
/// points with a closed-form tail bound; `abs_error` reports the total.
/// Throws MetricDomainError for laws outside M_rho.
Distance d_rho(const LawMixture& mu, const LawMixture& nu, double rho);

inline Distance d_rho(const ScalarDist& mu, const ScalarDist& nu, double rho) {
  return d_rho(LawMixture(mu), LawMixture(nu), rho);
}

struct ContractionReport {
  double lhs;     // d_rho(T mu, T nu)
  double factor;  // E[exp(rho Q) M]
  double rhs;     // factor * d_rho(mu, nu)
  bool holds;     // lhs <= rhs * (1 + 1e-9)
};

inline constexpr double kContractionSlack = 1e-9;

/// Checks d_rho(T mu, T nu) <= E[exp(rho Q) M] d_rho(mu, nu) on the exact path.
ContractionReport contraction_check(const JointMQ& j, const ScalarDist& mu,
                                    const ScalarDist& nu, double rho);

}  // namespace perplab
