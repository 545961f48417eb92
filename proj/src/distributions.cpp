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

#include "perplab/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "perplab/errors.hpp"

namespace perplab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw InvalidInput(std::string(what) + " must be finite");
  }
}

}  // namespace

std::vector<Atom> merge_atoms(std::vector<Atom> atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  std::vector<Atom> merged;
  merged.reserve(atoms.size());
  for (const Atom& a : atoms) {
    if (!merged.empty() &&
        std::abs(a.value - merged.back().value) <= kAtomMergeTolerance) {
      merged.back().prob += a.prob;
    } else {
      merged.push_back(a);
    }
  }
  return merged;
}

ScalarDist ScalarDist::atoms(std::vector<Atom> atoms) {
  if (atoms.empty()) throw InvalidInput("atoms: empty atom list");
  double total = 0.0;
  for (const Atom& a : atoms) {
    require_finite(a.value, "atom value");
    if (!(a.prob > 0.0 && a.prob <= 1.0 + kMassTolerance)) {
      throw InvalidInput("atoms: probability must lie in (0, 1], got " +
                         std::to_string(a.prob));
    }
    total += a.prob;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw InvalidInput("atoms: probabilities sum to " + std::to_string(total) +
                       ", expected 1");
  }
  return ScalarDist(Atoms{merge_atoms(std::move(atoms))});
}

ScalarDist ScalarDist::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw InvalidInput("exponential: rate must be positive and finite");
  }
  return ScalarDist(Exponential{rate});
}

ScalarDist ScalarDist::geometric(double p, double step) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidInput("geometric: p must lie in (0, 1)");
  }
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw InvalidInput("geometric: step must be positive and finite");
  }
  return ScalarDist(Geometric{p, step});
}

ScalarDist ScalarDist::constant(double value) {
  require_finite(value, "constant value");
  return ScalarDist(Constant{value});
}

ScalarDist::Kind ScalarDist::kind() const {
  return static_cast<Kind>(rep_.index());
}

bool ScalarDist::is_discrete_finite() const {
  return as_atoms() != nullptr || as_constant() != nullptr;
}

bool ScalarDist::is_nonnegative() const { return support_min() >= 0.0; }

double ScalarDist::support_min() const {
  return std::visit(
      Overloaded{[](const Atoms& a) { return a.atoms.front().value; },
                 [](const Exponential&) { return 0.0; },
                 [](const Geometric&) { return 0.0; },
                 [](const Constant& c) { return c.value; }},
      rep_);
}

std::vector<Atom> ScalarDist::finite_atoms() const {
  if (const auto* a = as_atoms()) return a->atoms;
  if (const auto* c = as_constant()) return {Atom{c->value, 1.0}};
  throw Unsupported("finite_atoms: law is not finitely supported");
}

bool operator==(const ScalarDist::Atoms& a, const ScalarDist::Atoms& b) {
  return a.atoms == b.atoms;
}
bool operator==(const ScalarDist::Exponential& a,
                const ScalarDist::Exponential& b) {
  return a.rate == b.rate;
}
bool operator==(const ScalarDist::Geometric& a, const ScalarDist::Geometric& b) {
  return a.p == b.p && a.step == b.step;
}
bool operator==(const ScalarDist::Constant& a, const ScalarDist::Constant& b) {
  return a.value == b.value;
}
bool operator==(const ScalarDist& a, const ScalarDist& b) {
  return a.rep_ == b.rep_;
}

namespace detail {

double laplace_or_inf(const ScalarDist& d, double v) {
  if (const auto* a = d.as_atoms()) {
    double sum = 0.0;
    for (const Atom& atom : a->atoms) sum += atom.prob * std::exp(v * atom.value);
    return sum;
  }
  if (const auto* e = d.as_exponential()) {
    if (v >= e->rate) return kInf;
    return e->rate / (e->rate - v);
  }
  if (const auto* g = d.as_geometric()) {
    const double ratio = g->p * std::exp(v * g->step);
    if (ratio >= 1.0) return kInf;
    return (1.0 - g->p) / (1.0 - ratio);
  }
  return std::exp(v * d.as_constant()->value);
}

}  // namespace detail

ExtReal laplace(const ScalarDist& d, double v) {
  if (v == 0.0) return ExtReal::finite(1.0);
  const double x = detail::laplace_or_inf(d, v);
  if (std::isinf(x)) {
    if (d.is_discrete_finite()) {
      throw ResourceError("laplace: exp(v x) overflows double at v = " +
                          std::to_string(v));
    }
    return ExtReal::infinity();
  }
  return ExtReal::finite(x);
}

ExtReal abscissa(const ScalarDist& d) {
  if (const auto* e = d.as_exponential()) return ExtReal::finite(e->rate);
  if (const auto* g = d.as_geometric()) {
    return ExtReal::finite(std::log(1.0 / g->p) / g->step);
  }
  return ExtReal::infinity();
}

bool finite_at_abscissa(const ScalarDist& d) {
  // Exponential and Geometric transforms blow up at the abscissa; the
  // bounded families have no finite abscissa at all.
  return d.is_discrete_finite();
}

double survival(const ScalarDist& d, double u) {
  if (const auto* a = d.as_atoms()) {
    double tail = 0.0;
    for (auto it = a->atoms.rbegin(); it != a->atoms.rend() && it->value > u;
         ++it) {
      tail += it->prob;
    }
    return tail;
  }
  if (const auto* e = d.as_exponential()) {
    return u < 0.0 ? 1.0 : std::exp(-e->rate * u);
  }
  if (const auto* g = d.as_geometric()) {
    if (u < 0.0) return 1.0;
    // P(K > u / step) = p^(floor(u / step) + 1)
    return std::pow(g->p, std::floor(u / g->step) + 1.0);
  }
  return d.as_constant()->value > u ? 1.0 : 0.0;
}

ScalarDist abs_pushforward(const ScalarDist& d) {
  if (const auto* a = d.as_atoms()) {
    std::vector<Atom> folded;
    folded.reserve(a->atoms.size());
    for (const Atom& atom : a->atoms) {
      folded.push_back({std::abs(atom.value), atom.prob});
    }
    return ScalarDist::atoms(std::move(folded));
  }
  if (const auto* c = d.as_constant()) {
    return ScalarDist::constant(std::abs(c->value));
  }
  return d;
}

double sample(const ScalarDist& d, double uniform01) {
  if (const auto* a = d.as_atoms()) {
    double cumulative = 0.0;
    for (const Atom& atom : a->atoms) {
      cumulative += atom.prob;
      if (uniform01 < cumulative) return atom.value;
    }
    return a->atoms.back().value;
  }
  if (const auto* e = d.as_exponential()) {
    return -std::log1p(-uniform01) / e->rate;
  }
  if (const auto* g = d.as_geometric()) {
    // Smallest k with 1 - p^(k+1) > u.
    const double k = std::floor(std::log1p(-uniform01) / std::log(g->p));
    return std::max(k, 0.0) * g->step;
  }
  return d.as_constant()->value;
}

}  // namespace perplab
