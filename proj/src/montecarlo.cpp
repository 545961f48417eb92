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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <thread>

#include "perplab/errors.hpp"
#include "perplab/rng.hpp"

namespace perplab {
namespace {

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

std::size_t pick_branch(std::span<const double> cumulative, double u) {
  for (std::size_t i = 0; i < cumulative.size(); ++i) {
    if (u < cumulative[i]) return i;
  }
  return cumulative.size() - 1;
}

}  // namespace

void SimConfig::validate() const {
  if (trajectories < 1) throw InvalidInput("SimConfig: trajectories must be >= 1");
  if (checkpoints.empty()) throw InvalidInput("SimConfig: no checkpoints");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] > horizon) {
      throw InvalidInput("SimConfig: checkpoint " + std::to_string(checkpoints[i]) +
                         " beyond horizon " + std::to_string(horizon));
    }
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
      throw InvalidInput("SimConfig: checkpoints must be strictly increasing");
    }
  }
}

CheckpointMatrix::CheckpointMatrix(std::vector<std::size_t> checkpoints,
                                   std::size_t trajectories)
    : checkpoints_(std::move(checkpoints)),
      trajectories_(trajectories),
      data_(checkpoints_.size() * trajectories, 0.0) {}

std::size_t CheckpointMatrix::column_of(std::size_t step) const {
  const auto it = std::lower_bound(checkpoints_.begin(), checkpoints_.end(), step);
  if (it == checkpoints_.end() || *it != step) {
    throw InvalidInput("checkpoint " + std::to_string(step) + " was not recorded");
  }
  return static_cast<std::size_t>(it - checkpoints_.begin());
}

std::vector<double> CheckpointMatrix::samples(std::size_t step) const {
  const std::size_t column = column_of(step);
  std::vector<double> out(trajectories_);
  for (std::size_t t = 0; t < trajectories_; ++t) out[t] = at(t, column);
  return out;
}

void parallel_blocks(std::size_t count, unsigned workers,
                     const std::function<void(std::size_t, std::size_t)>& work) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    work(0, count);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t block = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(count, w * block);
    const std::size_t end = std::min(count, begin + block);
    pool.emplace_back([&work, begin, end] { work(begin, end); });
  }
}

CheckpointMatrix simulate(const SimConfig& cfg, unsigned workers) {
  cfg.validate();
  const auto branches = cfg.instance.branches();
  std::vector<double> cumulative;
  double running = 0.0;
  for (const Branch& b : branches) cumulative.push_back(running += b.p);

  CheckpointMatrix out(cfg.checkpoints, cfg.trajectories);
  parallel_blocks(cfg.trajectories, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      CounterRng rng(cfg.seed, t, 0);
      double r = sample(cfg.r0, rng.uniform01());
      std::size_t column = 0;
      for (std::size_t step = 0;; ++step) {
        if (column < cfg.checkpoints.size() && cfg.checkpoints[column] == step) {
          out.at(t, column++) = r;
        }
        if (step == cfg.horizon) break;
        const Branch& b = branches[pick_branch(cumulative, rng.uniform01())];
        r = b.m * r + sample(b.q, rng.uniform01());
      }
    }
  });
  return out;
}

double LaplaceEstimate::mean() const { return std::exp(log_mean); }

LaplaceEstimate estimate_laplace(const CheckpointMatrix& matrix, double v,
                                 std::size_t checkpoint) {
  const std::size_t column = matrix.column_of(checkpoint);
  const std::size_t n = matrix.trajectories();
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < n; ++t) peak = std::max(peak, v * matrix.at(t, column));

  CompensatedSum first;
  CompensatedSum second;
  for (std::size_t t = 0; t < n; ++t) {
    const double scaled = std::exp(v * matrix.at(t, column) - peak);
    first.add(scaled);
    second.add(scaled * scaled);
  }
  const double count = static_cast<double>(n);
  const double s1 = first.value();
  const double s2 = second.value();

  LaplaceEstimate e;
  e.v = v;
  e.log_mean = peak + std::log(s1 / count);
  e.dominance = 1.0 / s1;
  if (n > 1) {
    const double mean_scaled = s1 / count;
    const double var_scaled =
        std::max(0.0, (s2 / count - mean_scaled * mean_scaled) * count / (count - 1.0));
    e.half_width =
        kNormalQuantile95 * std::exp(peak) * std::sqrt(var_scaled / count);
  }
  return e;
}

std::vector<SurvivalPoint> survival_curve(const CheckpointMatrix& matrix,
                                          std::size_t checkpoint,
                                          std::span<const double> grid) {
  if (!std::is_sorted(grid.begin(), grid.end())) {
    throw InvalidInput("survival_curve: grid must be sorted");
  }
  std::vector<double> xs = matrix.samples(checkpoint);
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  const double band = std::sqrt(std::log(2.0 / kDkwAlpha) / (2.0 * n));
  std::vector<SurvivalPoint> out;
  out.reserve(grid.size());
  for (double u : grid) {
    const auto above = xs.end() - std::upper_bound(xs.begin(), xs.end(), u);
    const double s = static_cast<double>(above) / n;
    out.push_back({u, s, std::max(0.0, s - band), std::min(1.0, s + band)});
  }
  return out;
}

double log_survival_slope(std::span<const SurvivalPoint> curve, double u_lo,
                          double u_hi) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t k = 0;
  for (const SurvivalPoint& p : curve) {
    if (p.u < u_lo || p.u > u_hi || !(p.survival > 0.0)) continue;
    const double y = std::log(p.survival);
    sx += p.u;
    sy += y;
    sxx += p.u * p.u;
    sxy += p.u * y;
    ++k;
  }
  if (k < 2) throw InvalidInput("log_survival_slope: fewer than two tail points");
  const double kk = static_cast<double>(k);
  const double denom = kk * sxx - sx * sx;
  if (!(denom > 0.0)) throw InvalidInput("log_survival_slope: degenerate window");
  return (kk * sxy - sx * sy) / denom;
}

double empirical_quantile(std::vector<double> samples, double prob) {
  if (samples.empty()) throw InvalidInput("empirical_quantile: no samples");
  std::sort(samples.begin(), samples.end());
  const double h = (static_cast<double>(samples.size()) - 1.0) * std::clamp(prob, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  return samples[lo] + (h - static_cast<double>(lo)) * (samples[hi] - samples[lo]);
}

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_quantiles_csv(std::ostream& os, const CheckpointMatrix& matrix,
                         std::span<const double> probs) {
  os << "step,prob,quantile\n";
  for (std::size_t step : matrix.checkpoints()) {
    const auto xs = matrix.samples(step);
    for (double p : probs) {
      os << step << ',' << format_double(p) << ','
         << format_double(empirical_quantile(xs, p)) << '\n';
    }
  }
}

void write_survival_csv(std::ostream& os, std::size_t checkpoint,
                        std::span<const SurvivalPoint> curve) {
  os << "step,u,survival,lower,upper\n";
  for (const SurvivalPoint& p : curve) {
    os << checkpoint << ',' << format_double(p.u) << ',' << format_double(p.survival)
       << ',' << format_double(p.lower) << ',' << format_double(p.upper) << '\n';
  }
}

void write_laplace_csv(std::ostream& os, std::size_t checkpoint,
                       std::span<const LaplaceEstimate> estimates) {
  os << "step,v,estimate,half_width,dominance,reliable\n";
  for (const LaplaceEstimate& e : estimates) {
    os << checkpoint << ',' << format_double(e.v) << ',' << format_double(e.mean())
       << ',' << format_double(e.half_width) << ',' << format_double(e.dominance)
       << ',' << (e.reliable() ? "true" : "false") << '\n';
  }
}

}  // namespace perplab
