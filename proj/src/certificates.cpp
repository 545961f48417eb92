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

#include "perplab/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <sstream>
#include <string>

#include "perplab/errors.hpp"
#include "perplab/metric.hpp"

namespace perplab {
namespace {

void require_regime(const JointMQ& j, const ScalarDist& r0, const char* op) {
  if (!j.in_bounded_regime()) {
    throw RegimeError(std::string(op) +
                      ": instance needs Q >= 0 on every branch and P(M < 1) > 0");
  }
  if (!r0.is_nonnegative() || !r0.is_discrete_finite()) {
    throw RegimeError(std::string(op) +
                      ": R_0 must be a finitely supported nonnegative law");
  }
}

std::string describe(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Largest epsilon on the dyadic grid with rho(v, epsilon) below the margin.
// rho is nondecreasing in epsilon, so bisect on the grid exponent.
double search_epsilon(const JointMQ& j, double v) {
  auto rho_at = [&](int exponent) {
    return ewq_near_one(j, v, std::ldexp(1.0, -exponent));
  };
  const ExtReal margin = ExtReal::finite(kEpsilonMargin);
  if (rho_at(kEpsilonGridDepth) < margin) {
    if (rho_at(1) < margin) return 0.5;
    int lo = 1;  // fails the margin
    int hi = kEpsilonGridDepth;  // passes it
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      if (rho_at(mid) < margin) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return std::ldexp(1.0, -hi);
  }
  // Close to v_1 the margin can be unreachable on the grid; fall back to an
  // epsilon isolating the M = 1 branch and only require rho < 1.
  double below_one = 0.0;
  for (const Branch& b : j.branches()) {
    if (b.m < 1.0) below_one = std::max(below_one, b.m);
  }
  const double epsilon =
      std::min(std::ldexp(1.0, -kEpsilonGridDepth), 0.5 * (1.0 - below_one));
  if (!(ewq_near_one(j, v, epsilon) < ExtReal::finite(1.0))) {
    throw std::logic_error("certify_bounded: no epsilon with rho < 1 below v_c");
  }
  return epsilon;
}

}  // namespace

const char* to_string(Classification::Verdict verdict) {
  switch (verdict) {
    case Classification::Verdict::kBoundedCertified:
      return "BoundedCertified";
    case Classification::Verdict::kDivergentCertified:
      return "DivergentCertified";
    case Classification::Verdict::kBoundary:
      return "Boundary";
  }
  return "?";
}

const char* to_string(DivergenceCertificate::Reason reason) {
  return reason == DivergenceCertificate::Reason::kAboveVQ ? "AboveVQ" : "Rho0";
}

ExtReal gg_geometric_bound(const JointMQ& j, const ScalarDist& r0, double v) {
  require_regime(j, r0, "gg_geometric_bound");
  if (v <= 0.0) return ExtReal::finite(1.0);
  const Exponents e = exponents(j);
  if (!(ExtReal::finite(v) < e.v_gg)) {
    throw RegimeError("gg_geometric_bound: v = " + describe(v) +
                      " is not below min(v_0, v_Q) = " + e.v_gg.to_string());
  }
  const double rho_hat = ewm(j, v).value();
  if (!(rho_hat < 1.0)) {
    throw RegimeError("gg_geometric_bound: E[exp(vQ) M] >= 1 at v = " +
                      describe(v));
  }
  const Distance d = d_rho(t_image(j, r0), LawMixture(r0), v);
  const double series = v / (1.0 - rho_hat) * (d.value + d.abs_error);
  return ExtReal::finite(series) + laplace(r0, v);
}

BoundCertificate certify_bounded(const JointMQ& j, const ScalarDist& r0,
                                 double v) {
  require_regime(j, r0, "certify_bounded");
  const Exponents e = exponents(j);
  if (!(ExtReal::finite(std::max(v, 0.0)) < e.v_c)) {
    throw RegimeError("certify_bounded: v = " + describe(v) +
                      " is not below v_c = " + e.v_c.to_string());
  }

  BoundCertificate cert;
  cert.v = v;
  cert.epsilon = search_epsilon(j, std::max(v, 0.0));

  const double shrink = 1.0 - cert.epsilon;
  double bottom = v;
  while (v > 0.0 && !(ExtReal::finite(bottom) < e.v_0)) {
    bottom *= shrink;
    ++cert.k;
  }
  cert.base_bound = gg_geometric_bound(j, r0, bottom);

  // Climb from level k - 1 back to level 0.
  cert.rhos.assign(static_cast<std::size_t>(cert.k), 0.0);
  ExtReal bound = cert.base_bound;
  for (int level = cert.k - 1; level >= 0; --level) {
    const double w = v * std::pow(shrink, level);
    const ExtReal rho = ewq_near_one(j, w, cert.epsilon);
    if (!(rho < ExtReal::finite(1.0))) {
      throw std::logic_error("certify_bounded: level contraction factor >= 1");
    }
    cert.rhos[static_cast<std::size_t>(level)] = rho.value();
    bound = ExtReal::finite(1.0 / (1.0 - rho.value())) * bound * laplace_q(j, w) +
            laplace(r0, w);
  }
  cert.chained_bound = bound;
  if (cert.chained_bound.is_infinite()) {
    throw std::logic_error("certify_bounded: chained bound is infinite");
  }
  return cert;
}

DivergenceCertificate certify_divergent(const JointMQ& j, double v) {
  const Exponents e = exponents(j);
  if (!(v > 0.0 && ExtReal::finite(v) > e.v_c)) {
    throw RegimeError("certify_divergent: v = " + describe(v) +
                      " is not above v_c = " + e.v_c.to_string());
  }
  DivergenceCertificate cert;
  cert.v = v;
  if (ExtReal::finite(v) > e.v_q) {
    cert.reason = DivergenceCertificate::Reason::kAboveVQ;
    return cert;
  }
  cert.reason = DivergenceCertificate::Reason::kRho0;
  cert.rho0 = ewq_on_m1(j, v);
  if (!(cert.rho0 > ExtReal::finite(1.0))) {
    // v sits inside the bisection tolerance of v_1.
    throw RegimeError("certify_divergent: rho_0 = " + cert.rho0.to_string() +
                      " does not exceed 1 at v = " + describe(v));
  }
  return cert;
}

Classification classify(const JointMQ& j, const ScalarDist& r0, double v) {
  require_regime(j, r0, "classify");
  Classification c;
  c.v = v;
  c.v_c = exponents(j).v_c;
  if (c.v_c.is_infinite()) {
    c.verdict = Classification::Verdict::kBoundedCertified;
    c.bounded = certify_bounded(j, r0, v);
    return c;
  }
  const double critical = c.v_c.value();
  const double band = kBoundaryBand * std::max(1.0, critical);
  if (std::abs(v - critical) <= band) {
    c.verdict = Classification::Verdict::kBoundary;
  } else if (v < critical) {
    c.verdict = Classification::Verdict::kBoundedCertified;
    c.bounded = certify_bounded(j, r0, v);
  } else {
    c.verdict = Classification::Verdict::kDivergentCertified;
    c.divergent = certify_divergent(j, v);
  }
  return c;
}

}  // namespace perplab
