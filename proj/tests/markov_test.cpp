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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "perplab/certificates.hpp"
#include "perplab/errors.hpp"

namespace perplab {
namespace {

const std::vector<std::vector<double>> kFlip = {{0.2, 0.8}, {0.6, 0.4}};

JointMQ constant_m(double m, ScalarDist q) { return JointMQ({{m, 1.0, std::move(q)}}); }

MarkovSpec exp_spec() {
  return MarkovSpec({"a", "b"}, kFlip, {1.0, 0.0},
                    std::vector<JointMQ>{constant_m(0.3, ScalarDist::exponential(2.0)),
                                         constant_m(0.6, ScalarDist::exponential(1.0))});
}

MarkovSpec coin_spec() {
  return MarkovSpec(
      {"a", "b"}, kFlip, {0.5, 0.5},
      std::vector<JointMQ>{
          constant_m(0.3, ScalarDist::atoms({{0.0, 0.5}, {1.0, 0.5}})),
          constant_m(0.6, ScalarDist::atoms({{0.0, 0.5}, {2.0, 0.5}}))});
}

TEST(MarkovSpec, RejectsBadRowWithIndex) {
  try {
    MarkovSpec({"a", "b"}, {{0.5, 0.5}, {0.5, 0.6}}, {1.0, 0.0},
               std::vector<JointMQ>{constant_m(0.1, ScalarDist::constant(1.0)),
                                    constant_m(0.1, ScalarDist::constant(1.0))});
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
  }
}

TEST(MarkovSpec, RejectsReducibleChainAndUnitM) {
  const auto laws = std::vector<JointMQ>{constant_m(0.1, ScalarDist::constant(1.0)),
                                         constant_m(0.1, ScalarDist::constant(1.0))};
  EXPECT_THROW(MarkovSpec({"a", "b"}, {{1.0, 0.0}, {0.5, 0.5}}, {1.0, 0.0}, laws),
               InvalidInput);
  EXPECT_THROW(MarkovSpec({"a", "b"}, kFlip, {0.7, 0.7}, laws), InvalidInput);
  EXPECT_THROW(MarkovSpec({"a"}, {{1.0}}, {1.0},
                          std::vector<JointMQ>{constant_m(1.0, ScalarDist::constant(1.0))}),
               InvalidInput);
}

TEST(Envelope, SingleStateIsAbsOfItsLaw) {
  const MarkovSpec spec({"only"}, {{1.0}}, {1.0},
                        std::vector<JointMQ>{JointMQ(
                            {{0.2, 0.4, ScalarDist::atoms({{-3.0, 0.5}, {1.0, 0.5}})},
                             {0.7, 0.6, ScalarDist::constant(-2.0)}})});
  const JointMQ env = envelope(spec).law;
  ASSERT_EQ(env.branches().size(), 2u);
  EXPECT_EQ(env.branches()[0].m, 0.2);
  EXPECT_DOUBLE_EQ(env.branches()[0].p, 0.4);
  EXPECT_EQ(env.branches()[0].q, ScalarDist::atoms({{1.0, 0.5}, {3.0, 0.5}}));
  EXPECT_EQ(env.branches()[1].q, ScalarDist::atoms({{2.0, 1.0}}));
}

TEST(Envelope, TwoIndependentCoins) {
  const JointMQ env = envelope(coin_spec()).law;
  ASSERT_EQ(env.branches().size(), 1u);
  EXPECT_EQ(env.branches()[0].m, 0.6);
  const auto atoms = env.branches()[0].q.finite_atoms();
  ASSERT_EQ(atoms.size(), 3u);
  EXPECT_DOUBLE_EQ(atoms[0].prob, 0.25);
  EXPECT_DOUBLE_EQ(atoms[1].prob, 0.25);
  EXPECT_DOUBLE_EQ(atoms[2].prob, 0.5);
  EXPECT_EQ(atoms[2].value, 2.0);
}

TEST(Envelope, ExplicitVectors) {
  const MarkovSpec spec({"a", "b"}, kFlip, {1.0, 0.0},
                        std::vector<JointVector>{{{{0.1, -4.0}, {0.5, 1.0}}, 0.25},
                                                 {{{0.8, 2.0}, {0.5, 3.0}}, 0.75}});
  const JointMQ env = envelope(spec).law;
  ASSERT_EQ(env.branches().size(), 2u);
  EXPECT_EQ(env.branches()[0].m, 0.5);
  EXPECT_EQ(env.branches()[0].q, ScalarDist::atoms({{4.0, 1.0}}));
  EXPECT_EQ(env.branches()[1].m, 0.8);
  EXPECT_DOUBLE_EQ(env.branches()[1].p, 0.75);
  // Marginal of state a: m=0.1 w.p. .25, m=0.8 w.p. .75.
  ASSERT_EQ(spec.per_state()[0].branches().size(), 2u);
  EXPECT_DOUBLE_EQ(spec.per_state()[0].branches()[0].p, 0.25);
  ASSERT_EQ(spec.per_state()[1].branches().size(), 1u);
}

TEST(Envelope, GuardsAndParametric) {
  EXPECT_THROW(envelope(exp_spec()), Unsupported);
  EXPECT_THROW(envelope(coin_spec(), {.max_states = 8, .max_outcomes = 3}), ResourceError);
  std::vector<std::string> labels;
  std::vector<std::vector<double>> p(9, std::vector<double>(9, 1.0 / 9.0));
  std::vector<JointMQ> laws;
  for (int i = 0; i < 9; ++i) {
    labels.push_back("s" + std::to_string(i));
    laws.push_back(constant_m(0.5, ScalarDist::constant(1.0)));
  }
  std::vector<double> init(9, 0.0);
  init[0] = 1.0;
  EXPECT_THROW(envelope(MarkovSpec(labels, p, init, laws)), ResourceError);
}

TEST(VBar, Examples) {
  EXPECT_EQ(v_bar(exp_spec()), ExtReal::finite(1.0));
  EXPECT_TRUE(v_bar(coin_spec()).is_infinite());
  const MarkovSpec geo({"x"}, {{1.0}}, {1.0},
                       std::vector<JointMQ>{constant_m(0.5, ScalarDist::geometric(0.5, 1.0))});
  EXPECT_NEAR(v_bar(geo).value(), std::log(2.0), 1e-15);
}

TEST(VBar, MatchesEnvelopeCriticalExponent) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 3;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> p(n, std::vector<double>(n, 1.0 / n));
    std::vector<JointMQ> laws;
    for (std::size_t x = 0; x < n; ++x) {
      labels.push_back("s" + std::to_string(x));
      laws.push_back(constant_m(0.9 * unit(rng),
                                ScalarDist::atoms({{-unit(rng), 0.5}, {unit(rng), 0.5}})));
    }
    laws[0] = constant_m(0.5, trial % 2 ? ScalarDist::geometric(0.3 + 0.5 * unit(rng), 1.0)
                                        : ScalarDist::constant(2.0));
    std::vector<double> init(n, 1.0 / n);
    const MarkovSpec spec(labels, p, init, laws);
    const ExtReal want = v_bar(spec);
    if (trial % 2) {
      // Parametric Q: envelope only enumerates finite atoms.
      EXPECT_THROW(envelope(spec), Unsupported);
      continue;
    }
    EXPECT_EQ(exponents(envelope(spec).law).v_c, want);
  }
}

TEST(Envelope, SandwichOnGrid) {
  const MarkovSpec spec(
      {"a", "b", "c"}, {{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}}, {1.0, 0.0, 0.0},
      std::vector<JointMQ>{
          constant_m(0.3, ScalarDist::atoms({{-1.5, 0.5}, {1.0, 0.5}})),
          JointMQ({{0.1, 0.5, ScalarDist::atoms({{0.0, 0.5}, {2.0, 0.5}})},
                   {0.6, 0.5, ScalarDist::constant(-0.5)}}),
          constant_m(0.9, ScalarDist::atoms({{0.25, 0.9}, {-3.0, 0.1}}))});
  const JointMQ env = envelope(spec).law;
  for (int i = 0; i < 10; ++i) {
    const double v = 0.3 * i;
    double sup = 0.0;
    double sum = 0.0;
    for (const JointMQ& law : spec.per_state()) {
      double e = 0.0;
      for (const Branch& b : law.branches()) {
        e += b.p * laplace(abs_pushforward(b.q), v).value();
      }
      sup = std::max(sup, e);
      sum += e;
    }
    const double mid = laplace_q(env, v).value();
    EXPECT_LE(sup, mid * (1 + 1e-9)) << v;
    EXPECT_LE(mid, sum * (1 + 1e-9)) << v;
  }
}

TEST(SimulateModulated, SingleNonnegativeStateMatchesEnvelope) {
  const MarkovSpec spec({"x"}, {{1.0}}, {1.0},
                        std::vector<JointMQ>{JointMQ({{0.2, 0.5, ScalarDist::exponential(1.0)},
                                                      {0.7, 0.5, ScalarDist::constant(0.5)}})});
  ModulatedConfig cfg;
  cfg.r0 = ScalarDist::atoms({{0.0, 0.5}, {3.0, 0.5}});
  cfg.horizon = 40;
  cfg.trajectories = 200;
  cfg.seed = 5;
  const ModulatedPaths paths = simulate_modulated(spec, cfg, 1);
  EXPECT_EQ(paths.violations, 0u);
  for (std::size_t i = 0; i < paths.r.size(); ++i) EXPECT_EQ(paths.r[i], paths.r_bar[i]);
}

TEST(SimulateModulated, ZeroNoiseDecaysGeometrically) {
  const MarkovSpec spec({"a", "b"}, kFlip, {0.5, 0.5},
                        std::vector<JointMQ>{constant_m(0.3, ScalarDist::constant(0.0)),
                                             constant_m(0.6, ScalarDist::constant(0.0))});
  ModulatedConfig cfg;
  cfg.r0 = ScalarDist::constant(1.0);
  cfg.horizon = 30;
  cfg.trajectories = 100;
  const ModulatedPaths paths = simulate_modulated(spec, cfg, 1);
  for (std::size_t t = 0; t < cfg.trajectories; ++t) {
    for (std::size_t n = 0; n <= cfg.horizon; ++n) {
      EXPECT_LE(std::abs(paths.r_at(t, n)), std::pow(0.6, n) * (1 + 1e-12));
    }
  }
}

TEST(SimulateModulated, TwoStateCouplingAndDeterminism) {
  ModulatedConfig cfg;
  cfg.horizon = 100;
  cfg.trajectories = 10000;
  cfg.seed = 2026;
  cfg.checkpoints = {0, 50, 100};
  const ModulatedPaths one = simulate_modulated(exp_spec(), cfg, 1);
  EXPECT_EQ(one.violations, 0u);
  const ModulatedPaths three = simulate_modulated(exp_spec(), cfg, 3);
  EXPECT_EQ(one.r, three.r);
  EXPECT_EQ(one.state, three.state);
  // State a is charged first, and the chain visits both states.
  EXPECT_EQ(one.state[0], 0u);
  std::size_t in_b = 0;
  for (std::size_t t = 0; t < cfg.trajectories; ++t) in_b += one.state[t * 3 + 2];
  // Stationary mass of b is 0.8 / 1.4.
  EXPECT_NEAR(in_b / 10000.0, 0.8 / 1.4, 0.02);
}

TEST(SimulateModulated, SignedNoiseStaysDominated) {
  const MarkovSpec spec({"a", "b"}, kFlip, {0.5, 0.5},
                        std::vector<JointVector>{{{{0.9, -2.0}, {0.1, 1.0}}, 0.5},
                                                 {{{0.2, 1.5}, {0.95, -0.5}}, 0.5}});
  ModulatedConfig cfg;
  cfg.r0 = ScalarDist::atoms({{-1.0, 0.5}, {1.0, 0.5}});
  cfg.horizon = 100;
  cfg.trajectories = 2000;
  EXPECT_EQ(simulate_modulated(spec, cfg).violations, 0u);
  cfg.r0 = ScalarDist::exponential(1.0);
  EXPECT_THROW(simulate_modulated(spec, cfg), InvalidInput);
}

TEST(DivergenceWitness, Examples) {
  const DivergenceWitness w = divergence_witness(exp_spec(), 1.2);
  EXPECT_EQ(w.label, "b");
  EXPECT_EQ(w.abscissa, ExtReal::finite(1.0));
  EXPECT_TRUE(w.visited_almost_surely);
  EXPECT_THROW(divergence_witness(exp_spec(), 0.5), RegimeError);
  EXPECT_THROW(divergence_witness(exp_spec(), 1.0), RegimeError);
  EXPECT_THROW(divergence_witness(coin_spec(), 1e6), RegimeError);
}

TEST(ClassifyModulated, Regimes) {
  EXPECT_EQ(classify_modulated(exp_spec(), 0.5), ModulatedVerdict::kBounded);
  EXPECT_EQ(classify_modulated(exp_spec(), 1.0), ModulatedVerdict::kBoundary);
  EXPECT_EQ(classify_modulated(exp_spec(), 1.5), ModulatedVerdict::kDivergent);
  EXPECT_EQ(classify_modulated(coin_spec(), 50.0), ModulatedVerdict::kBounded);
}

TEST(ClassifyModulated, EnvelopeCertificateApplies) {
  // Below v_bar the envelope is a bounded-regime instance for the i.i.d. theory.
  const JointMQ env = envelope(coin_spec()).law;
  EXPECT_TRUE(env.in_bounded_regime());
  const BoundCertificate cert = certify_bounded(env, ScalarDist::constant(0.0), 2.0);
  EXPECT_TRUE(cert.chained_bound.is_finite());
}

}  // namespace
}  // namespace perplab
