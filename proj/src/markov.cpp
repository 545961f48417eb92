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

#include "perplab/markov.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "perplab/certificates.hpp"
#include "perplab/errors.hpp"
#include "perplab/montecarlo.hpp"
#include "perplab/rng.hpp"

namespace perplab {
namespace {

constexpr double kRowTolerance = 1e-12;

std::size_t pick(const std::vector<double>& weights, double u) {
  double cumulative = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cumulative += weights[i];
    if (u < cumulative) return i;
  }
  // Rounding: land on the last index with positive weight.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return weights.size() - 1;
}

void check_probability_vector(const std::vector<double>& w, const std::string& what) {
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw InvalidInput(what + " has a negative or non-finite entry");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > kRowTolerance) {
    throw InvalidInput(what + " sums to " + std::to_string(total) + ", expected 1");
  }
}

// Groups (m, q, prob) outcomes by m into a JointMQ with atom conditionals.
JointMQ group_by_m(const std::map<double, std::vector<Atom>>& by_m) {
  std::vector<Branch> branches;
  for (const auto& [m, atoms] : by_m) {
    double mass = 0.0;
    for (const Atom& a : atoms) mass += a.prob;
    std::vector<Atom> conditional = merge_atoms(atoms);
    double total = 0.0;
    for (Atom& a : conditional) total += (a.prob /= mass);
    for (Atom& a : conditional) a.prob /= total;
    branches.push_back({m, mass, ScalarDist::atoms(std::move(conditional))});
  }
  return JointMQ(std::move(branches));
}

struct Outcome {
  double m;
  double q;
  double prob;
};

// Finite (m, q) outcomes of one state's law.
std::vector<Outcome> outcomes_of(const JointMQ& law) {
  std::vector<Outcome> out;
  for (const Branch& b : law.branches()) {
    if (!b.q.is_discrete_finite()) {
      throw Unsupported(
          "envelope: exact joint law needs finitely supported Q in every state");
    }
    for (const Atom& a : b.q.finite_atoms()) out.push_back({b.m, a.value, b.p * a.prob});
  }
  return out;
}

}  // namespace

MarkovSpec::MarkovSpec(std::vector<std::string> states,
                       std::vector<std::vector<double>> transition,
                       std::vector<double> initial, std::vector<JointMQ> per_state)
    : states_(std::move(states)),
      transition_(std::move(transition)),
      initial_(std::move(initial)),
      per_state_(std::move(per_state)),
      dependence_(Dependence::kIndependent) {
  validate_chain();
  if (per_state_.size() != states_.size()) {
    throw InvalidInput("MarkovSpec: per_state has " + std::to_string(per_state_.size()) +
                       " laws for " + std::to_string(states_.size()) + " states");
  }
  for (std::size_t x = 0; x < per_state_.size(); ++x) {
    for (const Branch& b : per_state_[x].branches()) {
      if (!(b.m < 1.0)) {
        throw InvalidInput("MarkovSpec: state '" + states_[x] +
                           "' has an M atom at 1; M(x) must stay below 1");
      }
    }
  }
}

MarkovSpec::MarkovSpec(std::vector<std::string> states,
                       std::vector<std::vector<double>> transition,
                       std::vector<double> initial, std::vector<JointVector> vectors)
    : states_(std::move(states)),
      transition_(std::move(transition)),
      initial_(std::move(initial)),
      dependence_(Dependence::kExplicitVectors),
      vectors_(std::move(vectors)) {
  validate_chain();
  if (vectors_.empty()) throw InvalidInput("MarkovSpec: empty vector list");
  std::vector<double> probs;
  std::vector<std::map<double, std::vector<Atom>>> marginals(states_.size());
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    const JointVector& vec = vectors_[i];
    if (vec.entries.size() != states_.size()) {
      throw InvalidInput("MarkovSpec: vector " + std::to_string(i) + " has " +
                         std::to_string(vec.entries.size()) + " entries for " +
                         std::to_string(states_.size()) + " states");
    }
    if (!(vec.prob > 0.0)) {
      throw InvalidInput("MarkovSpec: vector " + std::to_string(i) +
                         " needs a positive probability");
    }
    probs.push_back(vec.prob);
    for (std::size_t x = 0; x < states_.size(); ++x) {
      const auto [m, q] = vec.entries[x];
      if (!(m >= 0.0 && m < 1.0) || !std::isfinite(q)) {
        throw InvalidInput("MarkovSpec: vector " + std::to_string(i) + ", state '" +
                           states_[x] + "': M must lie in [0, 1) and Q be finite");
      }
      marginals[x][m].push_back({q, vec.prob});
    }
  }
  check_probability_vector(probs, "MarkovSpec: vector probabilities");
  for (const auto& by_m : marginals) per_state_.push_back(group_by_m(by_m));
}

void MarkovSpec::validate_chain() const {
  const std::size_t n = states_.size();
  if (n == 0) throw InvalidInput("MarkovSpec: no states");
  if (std::set<std::string>(states_.begin(), states_.end()).size() != n) {
    throw InvalidInput("MarkovSpec: duplicate state labels");
  }
  if (transition_.size() != n) {
    throw InvalidInput("MarkovSpec: transition matrix has " +
                       std::to_string(transition_.size()) + " rows for " +
                       std::to_string(n) + " states");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (transition_[i].size() != n) {
      throw InvalidInput("MarkovSpec: transition row " + std::to_string(i) +
                         " has " + std::to_string(transition_[i].size()) + " entries");
    }
    check_probability_vector(transition_[i],
                             "MarkovSpec: transition row " + std::to_string(i));
  }
  if (initial_.size() != n) {
    throw InvalidInput("MarkovSpec: initial distribution has wrong length");
  }
  check_probability_vector(initial_, "MarkovSpec: initial distribution");

  // Irreducible iff state 0 reaches every state and every state reaches 0.
  const std::vector<bool> forward = reachable_from(0);
  for (std::size_t x = 0; x < n; ++x) {
    if (!forward[x] || !reachable_from(x)[0]) {
      throw InvalidInput("MarkovSpec: chain is not irreducible (state '" +
                         states_[x] + "' is not in the same class as '" +
                         states_[0] + "')");
    }
  }
}

std::vector<bool> MarkovSpec::reachable_from(std::size_t from) const {
  std::vector<bool> seen(states_.size(), false);
  std::vector<std::size_t> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    const std::size_t x = stack.back();
    stack.pop_back();
    for (std::size_t y = 0; y < states_.size(); ++y) {
      if (transition_[x][y] > 0.0 && !seen[y]) {
        seen[y] = true;
        stack.push_back(y);
      }
    }
  }
  return seen;
}

EnvelopeLaw envelope(const MarkovSpec& spec, EnvelopeLimits limits) {
  std::map<double, std::vector<Atom>> by_m;
  if (spec.dependence() == MarkovSpec::Dependence::kExplicitVectors) {
    for (const JointVector& vec : spec.vectors()) {
      double m_max = 0.0;
      double q_max = 0.0;
      for (const auto& e : vec.entries) {
        m_max = std::max(m_max, e.m);
        q_max = std::max(q_max, std::abs(e.q));
      }
      by_m[m_max].push_back({q_max, vec.prob});
    }
    return {group_by_m(by_m)};
  }

  if (spec.size() > limits.max_states) {
    throw ResourceError("envelope: " + std::to_string(spec.size()) +
                        " states exceed the enumeration limit of " +
                        std::to_string(limits.max_states));
  }
  std::vector<std::vector<Outcome>> per_state;
  double count = 1.0;
  for (const JointMQ& law : spec.per_state()) {
    per_state.push_back(outcomes_of(law));
    count *= static_cast<double>(per_state.back().size());
  }
  if (count > static_cast<double>(limits.max_outcomes)) {
    throw ResourceError("envelope: product of " + std::to_string(count) +
                        " outcomes exceeds the enumeration budget");
  }

  // Odometer over the product of per-state outcome lists.
  std::vector<std::size_t> index(per_state.size(), 0);
  while (true) {
    double m_max = 0.0;
    double q_max = 0.0;
    double prob = 1.0;
    for (std::size_t x = 0; x < per_state.size(); ++x) {
      const Outcome& o = per_state[x][index[x]];
      m_max = std::max(m_max, o.m);
      q_max = std::max(q_max, std::abs(o.q));
      prob *= o.prob;
    }
    by_m[m_max].push_back({q_max, prob});
    std::size_t x = 0;
    while (x < index.size() && ++index[x] == per_state[x].size()) index[x++] = 0;
    if (x == index.size()) break;
  }
  return {group_by_m(by_m)};
}

ExtReal v_bar(const MarkovSpec& spec) {
  ExtReal out = ExtReal::infinity();
  for (const JointMQ& law : spec.per_state()) {
    for (const Branch& b : law.branches()) out = min(out, abscissa(abs_pushforward(b.q)));
  }
  return out;
}

ModulatedPaths simulate_modulated(const MarkovSpec& spec, const ModulatedConfig& cfg,
                                  unsigned workers) {
  if (!cfg.r0.is_discrete_finite()) {
    throw InvalidInput(
        "simulate_modulated: R_0 must have all exponential moments (finite support)");
  }
  if (cfg.trajectories < 1) throw InvalidInput("simulate_modulated: no trajectories");
  ModulatedPaths out;
  out.checkpoints = cfg.checkpoints;
  if (out.checkpoints.empty()) {
    for (std::size_t s = 0; s <= cfg.horizon; ++s) out.checkpoints.push_back(s);
  }
  for (std::size_t i = 0; i < out.checkpoints.size(); ++i) {
    if (out.checkpoints[i] > cfg.horizon ||
        (i > 0 && out.checkpoints[i] <= out.checkpoints[i - 1])) {
      throw InvalidInput("simulate_modulated: checkpoints must be increasing and <= horizon");
    }
  }
  out.trajectories = cfg.trajectories;
  const std::size_t cols = out.checkpoints.size();
  out.state.assign(cols * cfg.trajectories, 0);
  out.r.assign(cols * cfg.trajectories, 0.0);
  out.r_bar.assign(cols * cfg.trajectories, 0.0);
  std::vector<std::size_t> violations(cfg.trajectories, 0);

  const std::size_t n_states = spec.size();
  std::vector<std::vector<double>> branch_weights;
  for (const JointMQ& law : spec.per_state()) {
    std::vector<double> w;
    for (const Branch& b : law.branches()) w.push_back(b.p);
    branch_weights.push_back(std::move(w));
  }
  std::vector<double> vector_weights;
  for (const JointVector& vec : spec.vectors()) vector_weights.push_back(vec.prob);
  const bool explicit_vectors =
      spec.dependence() == MarkovSpec::Dependence::kExplicitVectors;

  parallel_blocks(cfg.trajectories, workers, [&](std::size_t begin, std::size_t end) {
    std::vector<double> m(n_states);
    std::vector<double> q(n_states);
    for (std::size_t t = begin; t < end; ++t) {
      CounterRng chain(cfg.seed, t, 0);
      CounterRng noise(cfg.seed, t, 1);
      CounterRng start(cfg.seed, t, 2);
      double r = sample(cfg.r0, start.uniform01());
      double r_bar = std::abs(r);
      std::size_t x = pick(spec.initial(), chain.uniform01());
      std::size_t column = 0;
      for (std::size_t step = 0;; ++step) {
        if (std::abs(r) > r_bar) ++violations[t];
        if (column < cols && out.checkpoints[column] == step) {
          const std::size_t at = t * cols + column++;
          out.state[at] = static_cast<std::uint32_t>(x);
          out.r[at] = r;
          out.r_bar[at] = r_bar;
        }
        if (step == cfg.horizon) break;

        if (explicit_vectors) {
          const JointVector& vec = spec.vectors()[pick(vector_weights, noise.uniform01())];
          for (std::size_t y = 0; y < n_states; ++y) {
            m[y] = vec.entries[y].m;
            q[y] = vec.entries[y].q;
          }
        } else {
          for (std::size_t y = 0; y < n_states; ++y) {
            const Branch& b = spec.per_state()[y].branches()[pick(
                branch_weights[y], noise.uniform01())];
            m[y] = b.m;
            q[y] = sample(b.q, noise.uniform01());
          }
        }
        double m_max = 0.0;
        double q_max = 0.0;
        for (std::size_t y = 0; y < n_states; ++y) {
          m_max = std::max(m_max, m[y]);
          q_max = std::max(q_max, std::abs(q[y]));
        }
        r = m[x] * r + q[x];
        r_bar = m_max * r_bar + q_max;
        x = pick(spec.transition()[x], chain.uniform01());
      }
    }
  });
  for (std::size_t v : violations) out.violations += v;
  return out;
}

DivergenceWitness divergence_witness(const MarkovSpec& spec, double v) {
  const ExtReal threshold = v_bar(spec);
  if (!std::isfinite(v) || v <= 0.0 || !(ExtReal::finite(v) > threshold)) {
    throw RegimeError("divergence_witness: v = " + std::to_string(v) +
                      " is not above v_bar = " + threshold.to_string());
  }
  DivergenceWitness w{0, {}, ExtReal::infinity(), false};
  for (std::size_t x = 0; x < spec.size(); ++x) {
    for (const Branch& b : spec.per_state()[x].branches()) {
      const ExtReal a = abscissa(abs_pushforward(b.q));
      if (a < w.abscissa) {
        w.state = x;
        w.abscissa = a;
      }
    }
  }
  w.label = spec.states()[w.state];
  // Finite and irreducible, so recurrent: x0 is hit from every starting state.
  w.visited_almost_surely = true;
  for (std::size_t x = 0; x < spec.size(); ++x) {
    if (spec.initial()[x] > 0.0 && !spec.reachable_from(x)[w.state]) {
      w.visited_almost_surely = false;
    }
  }
  return w;
}

const char* to_string(ModulatedVerdict verdict) {
  switch (verdict) {
    case ModulatedVerdict::kBounded:
      return "Bounded";
    case ModulatedVerdict::kDivergent:
      return "Divergent";
    case ModulatedVerdict::kBoundary:
      return "Boundary";
  }
  return "?";
}

ModulatedVerdict classify_modulated(const MarkovSpec& spec, double v) {
  const ExtReal threshold = v_bar(spec);
  if (threshold.is_infinite()) return ModulatedVerdict::kBounded;
  const double critical = threshold.value();
  if (std::abs(v - critical) <= kBoundaryBand * std::max(1.0, critical)) {
    return ModulatedVerdict::kBoundary;
  }
  return v < critical ? ModulatedVerdict::kBounded : ModulatedVerdict::kDivergent;
}

}  // namespace perplab
