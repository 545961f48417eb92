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
#include <variant>
#include <vector>

#include "perplab/ext_real.hpp"

namespace perplab {

struct Atom {
  double value;
  double prob;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Atoms whose values are within this absolute distance are merged.
inline constexpr double kAtomMergeTolerance = 1e-12;
/// Tolerance on the total mass of an atom list.
inline constexpr double kMassTolerance = 1e-12;

/// A probability law on the real line with an exact Laplace transform.
///
/// Four families are supported:
///   - finite atoms, values strictly increasing, positive probabilities;
///   - Exponential(rate), density rate * exp(-rate * q) on q >= 0;
///   - Geometric(p, step), P(Q = k * step) = (1 - p) p^k for k >= 0;
///   - a point mass.
/// Values are immutable once constructed.
class ScalarDist {
 public:
  enum class Kind { kAtoms, kExponential, kGeometric, kConstant };

  struct Atoms {
    std::vector<Atom> atoms;
  };
  struct Exponential {
    double rate;
  };
  struct Geometric {
    double p;
    double step;
  };
  struct Constant {
    double value;
  };

  /// Sorts and merges coincident atoms, drops nothing: zero or negative
  /// probabilities are rejected, as is a total mass away from 1.
  static ScalarDist atoms(std::vector<Atom> atoms);
  static ScalarDist exponential(double rate);
  static ScalarDist geometric(double p, double step);
  static ScalarDist constant(double value);

  Kind kind() const;

  const Atoms* as_atoms() const { return std::get_if<Atoms>(&rep_); }
  const Exponential* as_exponential() const {
    return std::get_if<Exponential>(&rep_);
  }
  const Geometric* as_geometric() const { return std::get_if<Geometric>(&rep_); }
  const Constant* as_constant() const { return std::get_if<Constant>(&rep_); }

  /// Finite atoms or a point mass.
  bool is_discrete_finite() const;
  /// Support contained in [0, inf).
  bool is_nonnegative() const;
  /// Infimum of the support.
  double support_min() const;
  /// Atom view of a finite law (a point mass becomes a single atom).
  std::vector<Atom> finite_atoms() const;

  friend bool operator==(const ScalarDist&, const ScalarDist&);

 private:
  using Rep = std::variant<Atoms, Exponential, Geometric, Constant>;
  explicit ScalarDist(Rep rep) : rep_(std::move(rep)) {}

  Rep rep_;
};

bool operator==(const ScalarDist::Atoms& a, const ScalarDist::Atoms& b);
bool operator==(const ScalarDist::Exponential& a,
                const ScalarDist::Exponential& b);
bool operator==(const ScalarDist::Geometric& a, const ScalarDist::Geometric& b);
bool operator==(const ScalarDist::Constant& a, const ScalarDist::Constant& b);

/// Sorts by value and merges atoms closer than kAtomMergeTolerance.
std::vector<Atom> merge_atoms(std::vector<Atom> atoms);

/// E[exp(v X)], +inf outside the domain of the transform.
ExtReal laplace(const ScalarDist& d, double v);

/// Abscissa of convergence: sup{v : E[exp(v X)] < inf}.
ExtReal abscissa(const ScalarDist& d);

/// Whether the transform is finite exactly at the abscissa (diagnostic only).
bool finite_at_abscissa(const ScalarDist& d);

/// P(X > u).
double survival(const ScalarDist& d, double u);

/// Law of |X|. Geometric laws are already nonnegative and pass through.
ScalarDist abs_pushforward(const ScalarDist& d);

/// Inverse-CDF transform of `uniform01` in [0, 1).
double sample(const ScalarDist& d, double uniform01);

namespace detail {
// laplace() as a double: +inf when infinite or when the value overflows.
double laplace_or_inf(const ScalarDist& d, double v);
}  // namespace detail

}  // namespace perplab
