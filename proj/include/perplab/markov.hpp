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
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "perplab/distributions.hpp"
#include "perplab/ext_real.hpp"
#include "perplab/perpetuity.hpp"

namespace perplab {

/// One draw of the whole vector (M(x), Q(x))_{x in E}, with its probability.
struct JointVector {
  struct Entry {
    double m;
    double q;
  };
  std::vector<Entry> entries;  // one per state, in state order
  double prob;
};

/// Markov-modulated recursion R_{n+1} = M_n(X_n) R_n + Q_n(X_n) on a finite,
/// irreducible chain X independent of the i.i.d. vectors (M_n(x), Q_n(x))_x.
/// Every M(x) takes values in [0, 1); Q(x) may be signed.
class MarkovSpec {
 public:
  enum class Dependence { kIndependent, kExplicitVectors };

  /// Vectors drawn independently across states from `per_state`.
  MarkovSpec(std::vector<std::string> states,
             std::vector<std::vector<double>> transition,
             std::vector<double> initial, std::vector<JointMQ> per_state);

  /// Vectors drawn from an explicit joint list; per-state laws are the
  /// marginals of that list.
  MarkovSpec(std::vector<std::string> states,
             std::vector<std::vector<double>> transition,
             std::vector<double> initial, std::vector<JointVector> vectors);

  std::size_t size() const { return states_.size(); }
  const std::vector<std::string>& states() const { return states_; }
  const std::vector<std::vector<double>>& transition() const { return transition_; }
  const std::vector<double>& initial() const { return initial_; }
  const std::vector<JointMQ>& per_state() const { return per_state_; }
  Dependence dependence() const { return dependence_; }
  const std::vector<JointVector>& vectors() const { return vectors_; }

  /// States reachable with positive probability from `from`.
  std::vector<bool> reachable_from(std::size_t from) const;

 private:
  void validate_chain() const;

  std::vector<std::string> states_;
  std::vector<std::vector<double>> transition_;
  std::vector<double> initial_;
  std::vector<JointMQ> per_state_;
  Dependence dependence_;
  std::vector<JointVector> vectors_;
};

/// Law of (max_x M(x), max_x |Q(x)|) under one vector draw.
struct EnvelopeLaw {
  JointMQ law;
};

struct EnvelopeLimits {
  std::size_t max_states = 8;
  std::size_t max_outcomes = 1'000'000;
};

/// Exact envelope law by product enumeration (independent mode) or straight
/// from the vector list. Throws Unsupported when a per-state Q is parametric
/// and ResourceError past the enumeration limits.
EnvelopeLaw envelope(const MarkovSpec& spec, EnvelopeLimits limits = {});

/// inf_x of the abscissa of |Q(x)|.
ExtReal v_bar(const MarkovSpec& spec);

struct ModulatedConfig {
  ScalarDist r0 = ScalarDist::constant(0.0);
  std::size_t horizon = 0;
  std::size_t trajectories = 1;
  std::uint64_t seed = 0;
  // Sorted distinct steps in [0, horizon]; empty means every step.
  std::vector<std::size_t> checkpoints;
};

struct ModulatedPaths {
  std::vector<std::size_t> checkpoints;
  std::size_t trajectories = 0;
  // Row-major by trajectory, one column per checkpoint.
  std::vector<std::uint32_t> state;
  std::vector<double> r;
  std::vector<double> r_bar;
  // Steps (over all steps, not only checkpoints) with |R_n| > Rbar_n.
  std::size_t violations = 0;

  double r_at(std::size_t t, std::size_t c) const { return r[t * checkpoints.size() + c]; }
  double r_bar_at(std::size_t t, std::size_t c) const {
    return r_bar[t * checkpoints.size() + c];
  }
};

/// Simulates (X, R) and, from the same vector draws, the envelope recursion
/// Rbar_{n+1} = max M * Rbar_n + max |Q| with Rbar_0 = |R_0|. The chain and the
/// vector draws use separate substreams. R_0 must be finitely supported.
ModulatedPaths simulate_modulated(const MarkovSpec& spec, const ModulatedConfig& cfg,
                                  unsigned workers = 0);

struct DivergenceWitness {
  std::size_t state;
  std::string label;
  ExtReal abscissa;  // of |Q(state)|, below v
  bool visited_almost_surely;
};

/// For v > v_bar: the state x0 whose |Q(x0)| has the smallest abscissa, which
/// the irreducible chain visits infinitely often. Throws RegimeError for
/// v <= v_bar.
DivergenceWitness divergence_witness(const MarkovSpec& spec, double v);

enum class ModulatedVerdict { kBounded, kDivergent, kBoundary };
const char* to_string(ModulatedVerdict verdict);

/// Bounded below v_bar, divergent above, Boundary within 1e-9 * max(1, v_bar).
ModulatedVerdict classify_modulated(const MarkovSpec& spec, double v);

}  // namespace perplab
