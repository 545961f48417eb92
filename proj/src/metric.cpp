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

#include "perplab/metric.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "perplab/errors.hpp"

namespace perplab {
namespace {

constexpr std::size_t kMaxBreakpoints = 200'000;
constexpr double kTailTarget = 1e-12;

// Integral of exp(rho u) over [a, b].
double exp_integral(double rho, double a, double b) {
  return std::exp(rho * a) * std::expm1(rho * (b - a)) / rho;
}

// Integral of exp(rho u) P(X > u - shift) over [a, inf) for one law.
double law_tail_integral(const ScalarDist& law, double shift, double rho,
                         double a) {
  if (law.is_discrete_finite()) {
    double sum = 0.0;
    for (const Atom& atom : law.finite_atoms()) {
      const double top = shift + atom.value;
      if (top > a) sum += atom.prob * exp_integral(rho, a, top);
    }
    return sum;
  }
  double head = 0.0;
  if (a < shift) {
    head = exp_integral(rho, a, shift);
    a = shift;
  }
  if (const auto* e = law.as_exponential()) {
    return head + std::exp(e->rate * shift + (rho - e->rate) * a) /
                      (e->rate - rho);
  }
  const auto* g = law.as_geometric();
  const double ratio = g->p * std::exp(rho * g->step);
  const double cell = std::expm1(rho * g->step) / rho;
  const double k0 = std::floor((a - shift) / g->step);
  const double next_jump = shift + (k0 + 1.0) * g->step;
  // Partial cell [a, next_jump) with survival p^(k0 + 1), then whole cells.
  const double partial = std::pow(g->p, k0 + 1.0) * exp_integral(rho, a, next_jump);
  const double whole = std::exp(rho * shift) * cell * g->p *
                       std::pow(ratio, k0 + 1.0) / (1.0 - ratio);
  return head + partial + whole;
}

struct SweepPoint {
  double position;
  double mu_mass;
  double nu_mass;
};

// Exact sweep over the merged support of two finite nonnegative laws.
double sweep_distance(const std::vector<Atom>& mu, const std::vector<Atom>& nu,
                      double rho) {
  std::vector<SweepPoint> points;
  points.reserve(mu.size() + nu.size());
  for (const Atom& a : mu) points.push_back({a.value, a.prob, 0.0});
  for (const Atom& a : nu) points.push_back({a.value, 0.0, a.prob});
  std::sort(points.begin(), points.end(),
            [](const SweepPoint& a, const SweepPoint& b) {
              return a.position < b.position;
            });
  // Walk from the top so tail masses are accumulated from small terms.
  double total = 0.0;
  double mu_tail = 0.0;
  double nu_tail = 0.0;
  for (std::size_t i = points.size(); i-- > 0;) {
    mu_tail += points[i].mu_mass;
    nu_tail += points[i].nu_mass;
    const double upper = points[i].position;
    const double lower = i == 0 ? 0.0 : points[i - 1].position;
    if (upper > lower) {
      total += std::abs(mu_tail - nu_tail) * exp_integral(rho, lower, upper);
    }
  }
  return total;
}

void collect_breakpoints(const LawMixture& d, double limit,
                         std::vector<double>& out) {
  for (const auto& c : d.components()) {
    if (c.law.is_discrete_finite()) {
      for (const Atom& a : c.law.finite_atoms()) out.push_back(c.shift + a.value);
    } else if (const auto* g = c.law.as_geometric()) {
      for (double k = 0.0; c.shift + k * g->step <= limit; k += 1.0) {
        out.push_back(c.shift + k * g->step);
        if (out.size() > kMaxBreakpoints) {
          throw ResourceError("d_rho: too many geometric jump points");
        }
      }
    } else {
      out.push_back(c.shift);
    }
  }
}

Distance quadrature_distance(const LawMixture& mu, const LawMixture& nu,
                             double rho) {
  // Cutoff where the tails of both laws are negligible.
  std::vector<double> finite_points;
  collect_breakpoints(mu, 0.0, finite_points);
  collect_breakpoints(nu, 0.0, finite_points);
  double cutoff = 1.0;
  for (double x : finite_points) cutoff = std::max(cutoff, x + 1.0);
  double tail = mu.tail_integral(rho, cutoff) + nu.tail_integral(rho, cutoff);
  while (tail > kTailTarget) {
    cutoff *= 2.0;
    tail = mu.tail_integral(rho, cutoff) + nu.tail_integral(rho, cutoff);
    if (cutoff > 1e12) {
      throw ResourceError("d_rho: tail cutoff search did not converge");
    }
  }

  std::vector<double> breaks{0.0, cutoff};
  collect_breakpoints(mu, cutoff, breaks);
  collect_breakpoints(nu, cutoff, breaks);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto integrand = [&](double u) {
    return std::exp(rho * u) * std::abs(mu.survival(u) - nu.survival(u));
  };

  // Split long stretches so the adaptive rule sees the exponential decay.
  constexpr double kMaxPiece = 4.0;
  Distance out;
  out.exact = false;
  out.abs_error = tail;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = std::max(breaks[i], 0.0);
    const double b = std::min(breaks[i + 1], cutoff);
    if (!(b > a)) continue;
    const auto pieces =
        static_cast<std::size_t>(std::ceil((b - a) / kMaxPiece));
    for (std::size_t k = 0; k < pieces; ++k) {
      const double lo = a + (b - a) * static_cast<double>(k) / pieces;
      const double hi = k + 1 == pieces ? b : a + (b - a) * (k + 1.0) / pieces;
      double err = 0.0;
      out.value += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          integrand, lo, hi, 15, 1e-14, &err);
      out.abs_error += err;
    }
  }
  if (out.abs_error > kQuadratureTolerance) {
    throw ResourceError("d_rho: quadrature error estimate " +
                        std::to_string(out.abs_error) + " above tolerance");
  }
  return out;
}

}  // namespace

LawMixture::LawMixture(std::vector<Component> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw InvalidInput("LawMixture: no components");
}

LawMixture::LawMixture(const ScalarDist& d) : components_{{1.0, 0.0, d}} {}

double LawMixture::survival(double u) const {
  double s = 0.0;
  for (const auto& c : components_) s += c.weight * perplab::survival(c.law, u - c.shift);
  return s;
}

ExtReal LawMixture::laplace(double v) const {
  ExtReal sum;
  for (const auto& c : components_) {
    sum = sum + (c.weight * std::exp(v * c.shift)) * perplab::laplace(c.law, v);
  }
  return sum;
}

double LawMixture::support_min() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& c : components_) lo = std::min(lo, c.shift + c.law.support_min());
  return lo;
}

bool LawMixture::is_finite_discrete() const {
  return std::all_of(components_.begin(), components_.end(),
                     [](const Component& c) { return c.law.is_discrete_finite(); });
}

std::vector<Atom> LawMixture::atoms() const {
  std::vector<Atom> out;
  for (const auto& c : components_) {
    for (const Atom& a : c.law.finite_atoms()) {
      out.push_back({c.shift + a.value, c.weight * a.prob});
    }
  }
  return merge_atoms(std::move(out));
}

bool LawMixture::is_dirac_zero() const {
  if (!is_finite_discrete()) return false;
  const auto merged = atoms();
  return merged.size() == 1 && merged.front().value == 0.0;
}

double LawMixture::tail_integral(double rho, double a) const {
  double sum = 0.0;
  for (const auto& c : components_) {
    sum += c.weight * law_tail_integral(c.law, c.shift, rho, a);
  }
  return sum;
}

LawMixture t_image(const JointMQ& j, const ScalarDist& mu) {
  if (!mu.is_discrete_finite()) {
    throw Unsupported("t_image: mu must be finitely supported");
  }
  std::vector<LawMixture::Component> components;
  for (const Branch& b : j.branches()) {
    for (const Atom& x : mu.finite_atoms()) {
      components.push_back({b.p * x.prob, b.m * x.value, b.q});
    }
  }
  return LawMixture(std::move(components));
}

bool in_metric_domain(const LawMixture& d, double rho) {
  return rho > 0.0 && d.support_min() >= 0.0 && d.laplace(rho).is_finite();
}

Distance d_rho(const LawMixture& mu, const LawMixture& nu, double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw MetricDomainError("d_rho: rho must be positive, got " +
                            std::to_string(rho));
  }
  if (!in_metric_domain(mu, rho) || !in_metric_domain(nu, rho)) {
    throw MetricDomainError(
        "d_rho: law outside M_rho (needs support in [0, inf) and a finite "
        "exponential moment of order " + std::to_string(rho) + ")");
  }
  if (mu.is_finite_discrete() && nu.is_finite_discrete()) {
    return {sweep_distance(mu.atoms(), nu.atoms(), rho), 0.0, true};
  }
  if (mu.is_dirac_zero()) return {nu.tail_integral(rho, 0.0), 0.0, true};
  if (nu.is_dirac_zero()) return {mu.tail_integral(rho, 0.0), 0.0, true};
  return quadrature_distance(mu, nu, rho);
}

ContractionReport contraction_check(const JointMQ& j, const ScalarDist& mu,
                                    const ScalarDist& nu, double rho) {
  const ExtReal factor = ewm(j, rho);
  if (factor.is_infinite()) {
    throw MetricDomainError("contraction_check: E[exp(rho Q) M] is infinite");
  }
  const Distance lhs = d_rho(t_operator(j, mu), t_operator(j, nu), rho);
  const Distance base = d_rho(mu, nu, rho);
  ContractionReport r;
  r.lhs = lhs.value;
  r.factor = factor.value();
  r.rhs = r.factor * base.value;
  r.holds = r.lhs <= r.rhs * (1.0 + kContractionSlack);
  return r;
}

}  // namespace perplab
