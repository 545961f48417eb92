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

#include "perplab/perpetuity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "perplab/errors.hpp"

namespace perplab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBracketStart = 1e-6;

// sup{v >= 0 : f(v) < 1} for a convex transform-like f that is finite below
// `domain_end`. `grows` says whether f -> inf as v -> inf when the domain is
// unbounded; without growth f is nonincreasing on [0, inf).
ExtReal sup_below_one(const std::function<double(double)>& f,
                      ExtReal domain_end, bool grows) {
  if (!(f(0.0) < 1.0)) return ExtReal::finite(0.0);
  if (domain_end.is_infinite() && !grows) return ExtReal::infinity();

  double lo = 0.0;
  double hi = kBracketStart;
  while (true) {
    if (domain_end.is_finite() && hi >= domain_end.value()) {
      hi = domain_end.value();
      if (f(hi) < 1.0) return domain_end;
      break;
    }
    if (!(f(hi) < 1.0)) break;
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) return ExtReal::infinity();
  }
  while (hi - lo > kExponentTolerance) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return ExtReal::finite(lo + 0.5 * (hi - lo));
}

}  // namespace

JointMQ::JointMQ(std::vector<Branch> branches) : branches_(std::move(branches)) {
  if (branches_.empty()) throw InvalidInput("JointMQ: no branches");
  double total = 0.0;
  for (const Branch& b : branches_) {
    if (!(b.m >= 0.0 && b.m <= 1.0)) {
      throw InvalidInput("JointMQ: m = " + std::to_string(b.m) +
                         " outside [0, 1]");
    }
    if (!(b.p > 0.0 && b.p <= 1.0 + kMassTolerance)) {
      throw InvalidInput("JointMQ: branch probability " + std::to_string(b.p) +
                         " outside (0, 1]");
    }
    total += b.p;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw InvalidInput("JointMQ: branch probabilities sum to " +
                       std::to_string(total));
  }
  std::sort(branches_.begin(), branches_.end(),
            [](const Branch& a, const Branch& b) { return a.m < b.m; });
  for (std::size_t i = 1; i < branches_.size(); ++i) {
    if (branches_[i].m == branches_[i - 1].m) {
      throw InvalidInput("JointMQ: duplicate m = " +
                         std::to_string(branches_[i].m));
    }
  }
}

const Branch* JointMQ::unit_branch() const {
  return branches_.back().m == 1.0 ? &branches_.back() : nullptr;
}

bool JointMQ::in_bounded_regime() const {
  const bool q_nonnegative =
      std::all_of(branches_.begin(), branches_.end(),
                  [](const Branch& b) { return b.q.is_nonnegative(); });
  return q_nonnegative && branches_.front().m < 1.0;
}

ExtReal ewm(const JointMQ& j, double v) {
  ExtReal sum;
  for (const Branch& b : j.branches()) {
    if (b.m == 0.0) continue;
    sum = sum + (b.p * b.m) * laplace(b.q, v);
  }
  return sum;
}

ExtReal ewq_on_m1(const JointMQ& j, double v) {
  const Branch* unit = j.unit_branch();
  if (unit == nullptr) return ExtReal{};
  return unit->p * laplace(unit->q, v);
}

ExtReal ewq_near_one(const JointMQ& j, double v, double epsilon) {
  ExtReal sum;
  for (const Branch& b : j.branches()) {
    if (b.m > 1.0 - epsilon) sum = sum + b.p * laplace(b.q, v);
  }
  return sum;
}

ExtReal laplace_q(const JointMQ& j, double v) {
  ExtReal sum;
  for (const Branch& b : j.branches()) sum = sum + b.p * laplace(b.q, v);
  return sum;
}

ExtReal q_abscissa(const JointMQ& j) {
  ExtReal out = ExtReal::infinity();
  for (const Branch& b : j.branches()) out = min(out, abscissa(b.q));
  return out;
}

Exponents exponents(const JointMQ& j) {
  Exponents e;
  e.v_q = q_abscissa(j);

  ExtReal moving_end = ExtReal::infinity();
  bool moving_grows = false;
  for (const Branch& b : j.branches()) {
    if (b.m == 0.0) continue;
    moving_end = min(moving_end, abscissa(b.q));
    moving_grows = moving_grows || survival(b.q, 0.0) > 0.0;
  }
  e.v_0 = sup_below_one(
      [&j](double v) {
        double sum = 0.0;
        for (const Branch& b : j.branches()) {
          if (b.m == 0.0) continue;
          sum += b.p * b.m * detail::laplace_or_inf(b.q, v);
        }
        return sum;
      },
      moving_end, moving_grows);

  if (const Branch* unit = j.unit_branch()) {
    e.v_1 = sup_below_one(
        [unit](double v) { return unit->p * detail::laplace_or_inf(unit->q, v); },
        abscissa(unit->q), survival(unit->q, 0.0) > 0.0);
  } else {
    e.v_1 = ExtReal::infinity();
  }

  e.v_gg = min(e.v_q, e.v_0);
  e.v_c = min(e.v_q, e.v_1);
  return e;
}

ScalarDist t_operator(const JointMQ& j, const ScalarDist& mu) {
  if (!mu.is_discrete_finite()) {
    throw Unsupported("t_operator: mu must be finitely supported");
  }
  const std::vector<Atom> x_atoms = mu.finite_atoms();
  std::vector<Atom> out;
  for (const Branch& b : j.branches()) {
    if (!b.q.is_discrete_finite()) {
      throw Unsupported(
          "t_operator: no exact pushforward for a parametric conditional Q");
    }
    for (const Atom& q : b.q.finite_atoms()) {
      for (const Atom& x : x_atoms) {
        out.push_back({q.value + b.m * x.value, b.p * q.prob * x.prob});
      }
    }
  }
  out = merge_atoms(std::move(out));
  // Products of three masses, each within kMassTolerance of 1, can drift
  // past the tolerance; renormalize.
  double total = 0.0;
  for (const Atom& a : out) total += a.prob;
  for (Atom& a : out) a.prob /= total;
  return ScalarDist::atoms(std::move(out));
}

}  // namespace perplab
