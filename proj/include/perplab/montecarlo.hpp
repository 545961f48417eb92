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
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "perplab/distributions.hpp"
#include "perplab/perpetuity.hpp"

namespace perplab {

struct SimConfig {
  JointMQ instance;
  ScalarDist r0 = ScalarDist::constant(0.0);
  std::size_t horizon = 0;
  std::size_t trajectories = 1;
  std::uint64_t seed = 0;
  // Sorted, distinct steps in [0, horizon].
  std::vector<std::size_t> checkpoints;

  /// Throws InvalidInput when an invariant fails.
  void validate() const;
};

/// R at each checkpoint for each trajectory, row-major by trajectory.
class CheckpointMatrix {
 public:
  CheckpointMatrix(std::vector<std::size_t> checkpoints, std::size_t trajectories);

  std::size_t trajectories() const { return trajectories_; }
  const std::vector<std::size_t>& checkpoints() const { return checkpoints_; }

  double& at(std::size_t trajectory, std::size_t column) {
    return data_[trajectory * checkpoints_.size() + column];
  }
  double at(std::size_t trajectory, std::size_t column) const {
    return data_[trajectory * checkpoints_.size() + column];
  }

  /// Column index of a checkpoint step; throws InvalidInput if absent.
  std::size_t column_of(std::size_t step) const;
  /// All samples at a checkpoint step.
  std::vector<double> samples(std::size_t step) const;

  friend bool operator==(const CheckpointMatrix&, const CheckpointMatrix&) = default;

 private:
  std::vector<std::size_t> checkpoints_;
  std::size_t trajectories_;
  std::vector<double> data_;
};

/// Runs `work(begin, end)` over [0, count) split into contiguous blocks, one
/// per worker. `workers == 0` means one per hardware thread.
void parallel_blocks(std::size_t count, unsigned workers,
                     const std::function<void(std::size_t, std::size_t)>& work);

/// Simulates R_{n+1} = M_n R_n + Q_n. Trajectory i draws from its own
/// counter-based stream, so the output is identical for any worker count.
CheckpointMatrix simulate(const SimConfig& cfg, unsigned workers = 0);

struct LaplaceEstimate {
  double v = 0.0;
  double log_mean = 0.0;    // log of the sample mean of exp(v R)
  double half_width = 0.0;  // 95% normal-approximation half-width
  double dominance = 1.0;   // largest summand over the total, in (0, 1]

  double mean() const;
  /// False once a single sample carries more than half of the mass.
  bool reliable() const { return dominance <= 0.5; }
};

inline constexpr double kNormalQuantile95 = 1.959963984540054;

/// Sample mean of exp(v R_n) via a compensated log-sum-exp.
LaplaceEstimate estimate_laplace(const CheckpointMatrix& matrix, double v,
                                 std::size_t checkpoint);

struct SurvivalPoint {
  double u;
  double survival;  // empirical P(R_n > u)
  double lower;     // DKW band at confidence 0.99
  double upper;
};

inline constexpr double kDkwAlpha = 0.01;

/// Empirical survival on a sorted grid. Throws InvalidInput for an unsorted grid.
std::vector<SurvivalPoint> survival_curve(const CheckpointMatrix& matrix,
                                          std::size_t checkpoint,
                                          std::span<const double> grid);

/// Least-squares slope of log survival against u over grid points in
/// [u_lo, u_hi] with positive survival. Throws InvalidInput when fewer than
/// two points qualify.
double log_survival_slope(std::span<const SurvivalPoint> curve, double u_lo,
                          double u_hi);

/// Empirical quantile (type 7 interpolation) of the samples at a checkpoint.
double empirical_quantile(std::vector<double> samples, double prob);

// Tidy CSV emitters.
void write_quantiles_csv(std::ostream& os, const CheckpointMatrix& matrix,
                         std::span<const double> probs);
void write_survival_csv(std::ostream& os, std::size_t checkpoint,
                        std::span<const SurvivalPoint> curve);
void write_laplace_csv(std::ostream& os, std::size_t checkpoint,
                       std::span<const LaplaceEstimate> estimates);

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

}  // namespace perplab
