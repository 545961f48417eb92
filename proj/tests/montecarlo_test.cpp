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

#include "perplab/montecarlo.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "perplab/errors.hpp"
#include "perplab/propagation.hpp"
#include "perplab/rng.hpp"
#include "test_support.hpp"

namespace perplab {
namespace {

using testing::instance_i1;
using testing::instance_i2;

std::vector<std::size_t> all_steps(std::size_t horizon) {
  std::vector<std::size_t> steps(horizon + 1);
  for (std::size_t i = 0; i <= horizon; ++i) steps[i] = i;
  return steps;
}

TEST(CounterRng, StreamsAreIndependentOfOrder) {
  CounterRng a(42, 7, 0);
  CounterRng b(42, 7, 0);
  CounterRng other(42, 8, 0);
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform01();
    EXPECT_EQ(x, b.uniform01());
    EXPECT_NE(x, other.uniform01());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
}

TEST(Simulate, DeterministicHalving) {
  SimConfig cfg{JointMQ({{0.5, 1.0, ScalarDist::constant(0.0)}}),
                ScalarDist::constant(8.0), 20, 3, 1, all_steps(20)};
  const CheckpointMatrix m = simulate(cfg, 1);
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t n = 0; n <= 20; ++n) {
      EXPECT_EQ(m.at(t, n), 8.0 * std::ldexp(1.0, -static_cast<int>(n)));
    }
  }
}

TEST(Simulate, ZeroMultiplierForgetsThePast) {
  const auto q = ScalarDist::exponential(2.0);
  SimConfig cfg{JointMQ({{0.0, 1.0, q}}), ScalarDist::constant(100.0), 5, 50'000, 9,
                {0, 3, 5}};
  const CheckpointMatrix m = simulate(cfg);
  std::vector<double> xs = m.samples(3);
  std::sort(xs.begin(), xs.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double cdf = 1.0 - survival(q, xs[i]);
    ks = std::max({ks, std::abs(cdf - static_cast<double>(i + 1) / xs.size()),
                   std::abs(cdf - static_cast<double>(i) / xs.size())});
  }
  EXPECT_LT(ks, 0.01);
  EXPECT_EQ(m.samples(0).front(), 100.0);
}

TEST(Simulate, IdenticalAcrossWorkerCounts) {
  SimConfig cfg{instance_i1(), ScalarDist::constant(0.0), 40, 5'003, 2026,
                {0, 10, 40}};
  const CheckpointMatrix one = simulate(cfg, 1);
  EXPECT_EQ(one, simulate(cfg, 2));
  EXPECT_EQ(one, simulate(cfg, 8));
  EXPECT_EQ(one, simulate(cfg, 13));
  cfg.seed = 2027;
  EXPECT_NE(one, simulate(cfg, 2));
}

TEST(Simulate, CouplingIsMonotoneInInitialValue) {
  const auto j = JointMQ({{0.2, 0.3, ScalarDist::exponential(1.0)},
                          {0.9, 0.7, ScalarDist::atoms({{0.0, 0.5}, {1.0, 0.5}})}});
  SimConfig low{j, ScalarDist::constant(0.5), 30, 2'000, 5, all_steps(30)};
  SimConfig high = low;
  high.r0 = ScalarDist::constant(3.0);
  const auto a = simulate(low);
  const auto b = simulate(high);
  for (std::size_t t = 0; t < low.trajectories; ++t) {
    for (std::size_t c = 0; c <= 30; ++c) EXPECT_LE(a.at(t, c), b.at(t, c));
  }
}

TEST(Simulate, RejectsBadConfig) {
  SimConfig cfg{instance_i1(), ScalarDist::constant(0.0), 5, 10, 1, {6}};
  EXPECT_THROW(simulate(cfg), InvalidInput);
  cfg.checkpoints = {3, 2};
  EXPECT_THROW(simulate(cfg), InvalidInput);
  cfg.checkpoints = {2};
  cfg.trajectories = 0;
  EXPECT_THROW(simulate(cfg), InvalidInput);
}

TEST(EstimateLaplace, ConstantSamplesAndZeroExponent) {
  CheckpointMatrix m({4}, 10);
  for (std::size_t t = 0; t < 10; ++t) m.at(t, 0) = 1.5;
  const LaplaceEstimate e = estimate_laplace(m, 0.8, 4);
  EXPECT_NEAR(e.mean(), std::exp(1.2), 1e-14);
  EXPECT_EQ(e.half_width, 0.0);
  EXPECT_NEAR(e.dominance, 0.1, 1e-15);

  for (std::size_t t = 0; t < 10; ++t) m.at(t, 0) = 0.37 * t;
  const LaplaceEstimate zero = estimate_laplace(m, 0.0, 4);
  EXPECT_EQ(zero.mean(), 1.0);
  EXPECT_EQ(zero.half_width, 0.0);
}

TEST(EstimateLaplace, DominanceFlagsHeavySummands) {
  CheckpointMatrix m({0}, 4);
  m.at(0, 0) = 0.0;
  m.at(1, 0) = 0.0;
  m.at(2, 0) = 0.0;
  m.at(3, 0) = 50.0;
  const LaplaceEstimate e = estimate_laplace(m, 1.0, 0);
  EXPECT_GT(e.dominance, 0.99);
  EXPECT_FALSE(e.reliable());
  EXPECT_NEAR(e.log_mean, 50.0 + std::log1p(3.0 * std::exp(-50.0)) - std::log(4.0),
              1e-12);
}

TEST(EstimateLaplace, InstanceI2AgainstClosedForm) {
  SimConfig cfg{instance_i2(), ScalarDist::constant(0.0), 50, 100'000, 17, {50}};
  const LaplaceEstimate e = estimate_laplace(simulate(cfg), 0.25, 50);
  EXPECT_LE(std::abs(e.mean() - testing::i2_product(50, 0.25)), 3.0 * e.half_width);
  EXPECT_TRUE(e.reliable());
}

TEST(EstimateLaplace, AgreesWithExactPropagation) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> frac(0.1, 0.5);
  int failures = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto j = testing::random_finite_instance(rng, 3, true);
    const auto vc = exponents(j).v_c;
    const double v = vc.is_finite() ? frac(rng) * vc.value() : frac(rng);
    const std::size_t n = 15;
    SimConfig cfg{j, ScalarDist::constant(0.0), n, 100'000,
                  static_cast<std::uint64_t>(trial), {n}};
    const LaplaceEstimate e = estimate_laplace(simulate(cfg), v, n);
    PropagationTable t(j, ScalarDist::constant(0.0));
    if (std::abs(e.mean() - t.propagate(n, v).value()) > 3.0 * e.half_width) ++failures;
  }
  EXPECT_LE(failures, 1);
}

TEST(SurvivalCurve, EdgesAndBand) {
  CheckpointMatrix m({0}, 4);
  for (std::size_t t = 0; t < 4; ++t) m.at(t, 0) = 1.0 + t;
  const std::vector<double> grid{0.0, 2.5, 10.0};
  const auto curve = survival_curve(m, 0, grid);
  EXPECT_EQ(curve[0].survival, 1.0);
  EXPECT_EQ(curve[1].survival, 0.5);
  EXPECT_EQ(curve[2].survival, 0.0);
  EXPECT_EQ(curve[0].upper, 1.0);
  EXPECT_EQ(curve[2].lower, 0.0);
  const std::vector<double> unsorted{1.0, 0.0};
  EXPECT_THROW(survival_curve(m, 0, unsorted), InvalidInput);

  CheckpointMatrix wide({0}, 1000);
  for (std::size_t t = 0; t < 1000; ++t) wide.at(t, 0) = 1.0 + t;
  const std::vector<double> mid{500.5};
  const SurvivalPoint p = survival_curve(wide, 0, mid).front();
  const double band = std::sqrt(std::log(2.0 / 0.01) / 2000.0);
  EXPECT_EQ(p.survival, 0.5);
  EXPECT_NEAR(p.upper - p.survival, band, 1e-15);
  EXPECT_NEAR(p.survival - p.lower, band, 1e-15);
}

TEST(SurvivalCurve, InstanceI1TailSlopeNearCriticalExponent) {
  SimConfig cfg{instance_i1(), ScalarDist::constant(0.0), 200, 100'000, 3, {200}};
  const CheckpointMatrix m = simulate(cfg);
  std::vector<double> grid;
  for (double u = 0.0; u <= 25.0; u += 0.25) grid.push_back(u);
  const auto curve = survival_curve(m, 200, grid);
  const double slope = log_survival_slope(curve, 6.0, 14.0);
  EXPECT_LE(slope, -std::log(2.0) + 0.1);
  EXPECT_GE(slope, -std::log(2.0) - 0.3);
}

TEST(Csv, EmittersProduceTidyRows) {
  SimConfig cfg{instance_i1(), ScalarDist::constant(0.0), 3, 100, 1, {0, 3}};
  const auto m = simulate(cfg);
  std::ostringstream q;
  const std::vector<double> probs{0.5, 0.9};
  write_quantiles_csv(q, m, probs);
  EXPECT_EQ(q.str().substr(0, 19), "step,prob,quantile\n");
  EXPECT_NE(q.str().find("0,0.5,0\n"), std::string::npos);

  std::ostringstream l;
  const std::vector<LaplaceEstimate> est{estimate_laplace(m, 0.0, 3)};
  write_laplace_csv(l, 3, est);
  EXPECT_EQ(l.str(), "step,v,estimate,half_width,dominance,reliable\n3,0,1,0,0.01,true\n");
}

}  // namespace
}  // namespace perplab
