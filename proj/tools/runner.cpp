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

#include "runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <perplab/version.hpp>

#include "perplab/certificates.hpp"
#include "perplab/errors.hpp"
#include "perplab/json_io.hpp"
#include "perplab/markov.hpp"
#include "perplab/metric.hpp"
#include "perplab/montecarlo.hpp"
#include "perplab/perpetuity.hpp"
#include "perplab/propagation.hpp"

namespace perplab::cli {
namespace {

namespace fs = std::filesystem;

struct Context {
  explicit Context(const RunOptions& opts) : options(opts), out(opts.out) {}

  const RunOptions& options;
  fs::path out;
  Json results = Json::object();
  std::vector<std::string> operations;
  std::vector<std::string> files;

  void uses(std::initializer_list<const char*> ops) {
    for (const char* op : ops) {
      if (std::find(operations.begin(), operations.end(), op) == operations.end()) {
        operations.emplace_back(op);
      }
    }
  }

  void write_file(const std::string& name, const std::string& contents) {
    std::ofstream f(out / name, std::ios::binary);
    f << contents;
    if (!f) throw std::runtime_error("cannot write " + (out / name).string());
    files.push_back(name);
  }
};

void allow_keys(const Json& payload, std::initializer_list<const char*> keys) {
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : payload.items()) {
    if (!allowed.contains(key)) throw InvalidInput("payload: unknown field '" + key + "'");
  }
}

const Json& require(const Json& payload, const char* key) {
  const auto it = payload.find(key);
  if (it == payload.end()) throw InvalidInput(std::string("payload: missing field '") + key + "'");
  return *it;
}

double as_number(const Json& j, const std::string& what) {
  if (!j.is_number()) throw InvalidInput("payload." + what + ": expected a number");
  return j.get<double>();
}

std::size_t as_count(const Json& j, const std::string& what) {
  if (!j.is_number_unsigned()) {
    throw InvalidInput("payload." + what + ": expected a nonnegative integer");
  }
  return j.get<std::size_t>();
}

std::vector<double> as_numbers(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InvalidInput("payload." + what + ": expected an array");
  std::vector<double> out;
  for (const Json& x : j) out.push_back(as_number(x, what));
  return out;
}

std::vector<std::size_t> as_counts(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InvalidInput("payload." + what + ": expected an array");
  std::vector<std::size_t> out;
  for (const Json& x : j) out.push_back(as_count(x, what));
  return out;
}

ScalarDist r0_or_zero(const Json& payload) {
  const auto it = payload.find("r0");
  return it == payload.end() ? ScalarDist::constant(0.0) : scalar_dist_from_json(*it);
}

std::uint64_t seed_of(const Context& ctx, const Json& payload) {
  if (ctx.options.seed) return *ctx.options.seed;
  const auto it = payload.find("seed");
  if (it == payload.end()) return 0;
  if (!it->is_number_unsigned()) throw InvalidInput("payload.seed: expected an unsigned integer");
  return it->get<std::uint64_t>();
}

std::vector<std::size_t> checkpoints_or_horizon(const Json& payload, std::size_t horizon) {
  const auto it = payload.find("checkpoints");
  if (it == payload.end()) return {horizon};
  return as_counts(*it, "checkpoints");
}

std::string ext_cell(ExtReal x) {
  return x.is_infinite() ? std::string("inf") : format_double(x.value());
}

// Drops the header line of every block after the first.
void append_csv(std::string& acc, const std::string& block) {
  if (acc.empty()) {
    acc = block;
  } else {
    acc += block.substr(block.find('\n') + 1);
  }
}

void run_exponents(Context& ctx, const Json& payload) {
  allow_keys(payload, {"instance"});
  const JointMQ j = joint_from_json(require(payload, "instance"));
  ctx.uses({"exponents"});
  ctx.results["exponents"] = to_json(exponents(j));
}

void run_propagate(Context& ctx, const Json& payload) {
  allow_keys(payload, {"instance", "r0", "v_grid", "horizon"});
  const JointMQ j = joint_from_json(require(payload, "instance"));
  const ScalarDist r0 = r0_or_zero(payload);
  const std::vector<double> grid = as_numbers(require(payload, "v_grid"), "v_grid");
  const std::size_t horizon = as_count(require(payload, "horizon"), "horizon");

  ctx.uses({"exponents", "propagate", "classify"});
  ctx.results["exponents"] = to_json(exponents(j));
  PropagationTable table(j, r0);
  std::ostringstream csv;
  csv << "v,n,laplace,classification\n";
  Json rows = Json::array();
  for (double v : grid) {
    const Classification c = classify(j, r0, v);
    const std::vector<ExtReal> series = table.series(horizon, v);
    Json values = Json::array();
    for (std::size_t n = 0; n < series.size(); ++n) {
      values.push_back(to_json(series[n]));
      csv << format_double(v) << ',' << n << ',' << ext_cell(series[n]) << ','
          << to_string(c.verdict) << '\n';
    }
    rows.push_back({{"v", v}, {"classification", to_string(c.verdict)}, {"series", values}});
  }
  ctx.results["propagation"] = rows;
  ctx.write_file("propagate.csv", csv.str());
}

void run_certify(Context& ctx, const Json& payload) {
  allow_keys(payload, {"instance", "r0", "v_grid"});
  const JointMQ j = joint_from_json(require(payload, "instance"));
  const ScalarDist r0 = r0_or_zero(payload);
  const std::vector<double> grid = as_numbers(require(payload, "v_grid"), "v_grid");

  ctx.uses({"exponents", "classify", "certify_bounded", "certify_divergent",
            "gg_geometric_bound"});
  const Exponents e = exponents(j);
  ctx.results["exponents"] = to_json(e);
  Json rows = Json::array();
  for (double v : grid) {
    Json row = to_json(classify(j, r0, v));
    if (ExtReal::finite(std::max(v, 0.0)) < e.v_gg) {
      row["gg_geometric_bound"] = to_json(gg_geometric_bound(j, r0, v));
    }
    rows.push_back(std::move(row));
  }
  ctx.results["certificates"] = rows;
}

void run_metric(Context& ctx, const Json& payload) {
  allow_keys(payload, {"rho", "mu", "nu", "instance"});
  const double rho = as_number(require(payload, "rho"), "rho");
  const ScalarDist mu = scalar_dist_from_json(require(payload, "mu"));
  const ScalarDist nu = scalar_dist_from_json(require(payload, "nu"));
  std::optional<JointMQ> j;
  if (payload.contains("instance")) j = joint_from_json(payload["instance"]);

  ctx.uses({"d_rho"});
  ctx.results["distance"] = to_json(d_rho(mu, nu, rho));
  if (j) {
    ctx.uses({"t_image", "contraction_check"});
    ctx.results["contraction"] = to_json(contraction_check(*j, mu, nu, rho));
  }
}

void run_simulate(Context& ctx, const Json& payload) {
  allow_keys(payload, {"instance", "r0", "horizon", "trajectories", "seed", "checkpoints",
                       "laplace_v", "survival_grid", "quantiles", "tail_fit", "compare_exact"});
  const std::size_t horizon = as_count(require(payload, "horizon"), "horizon");
  const SimConfig cfg{
      .instance = joint_from_json(require(payload, "instance")),
      .r0 = r0_or_zero(payload),
      .horizon = horizon,
      .trajectories = as_count(require(payload, "trajectories"), "trajectories"),
      .seed = seed_of(ctx, payload),
      .checkpoints = checkpoints_or_horizon(payload, horizon),
  };
  const std::vector<double> laplace_v =
      payload.contains("laplace_v") ? as_numbers(payload["laplace_v"], "laplace_v")
                                    : std::vector<double>{};
  const std::vector<double> grid =
      payload.contains("survival_grid") ? as_numbers(payload["survival_grid"], "survival_grid")
                                        : std::vector<double>{};
  const std::vector<double> probs =
      payload.contains("quantiles") ? as_numbers(payload["quantiles"], "quantiles")
                                    : std::vector<double>{0.5, 0.9, 0.99};
  std::optional<std::pair<double, double>> tail_fit;
  if (payload.contains("tail_fit")) {
    const auto range = as_numbers(payload["tail_fit"], "tail_fit");
    if (range.size() != 2) throw InvalidInput("payload.tail_fit: expected [u_lo, u_hi]");
    tail_fit = {range[0], range[1]};
  }
  bool compare_exact = false;
  if (payload.contains("compare_exact")) {
    if (!payload["compare_exact"].is_boolean()) {
      throw InvalidInput("payload.compare_exact: expected a boolean");
    }
    compare_exact = payload["compare_exact"].get<bool>();
  }
  cfg.validate();

  ctx.uses({"simulate", "empirical_quantile"});
  const CheckpointMatrix matrix = simulate(cfg, ctx.options.threads);
  ctx.results["seed"] = cfg.seed;
  ctx.results["trajectories"] = cfg.trajectories;

  std::ostringstream quantiles;
  write_quantiles_csv(quantiles, matrix, probs);
  ctx.write_file("quantiles.csv", quantiles.str());

  std::string laplace_csv;
  std::string survival_csv;
  std::optional<PropagationTable> exact;
  if (compare_exact) exact.emplace(cfg.instance, cfg.r0);
  Json per_step = Json::array();
  for (std::size_t step : cfg.checkpoints) {
    Json entry = {{"step", step}};
    if (!laplace_v.empty()) {
      ctx.uses({"estimate_laplace"});
      std::vector<LaplaceEstimate> estimates;
      Json rows = Json::array();
      for (double v : laplace_v) {
        estimates.push_back(estimate_laplace(matrix, v, step));
        const LaplaceEstimate& e = estimates.back();
        Json row = {{"v", v},
                    {"estimate", e.mean()},
                    {"half_width", e.half_width},
                    {"dominance", e.dominance},
                    {"reliable", e.reliable()}};
        if (exact) {
          ctx.uses({"propagate"});
          row["exact"] = to_json(exact->propagate(step, v));
        }
        rows.push_back(std::move(row));
      }
      std::ostringstream block;
      write_laplace_csv(block, step, estimates);
      append_csv(laplace_csv, block.str());
      entry["laplace"] = rows;
    }
    if (!grid.empty()) {
      ctx.uses({"survival_curve"});
      const std::vector<SurvivalPoint> curve = survival_curve(matrix, step, grid);
      std::ostringstream block;
      write_survival_csv(block, step, curve);
      append_csv(survival_csv, block.str());
      if (tail_fit) {
        ctx.uses({"log_survival_slope"});
        entry["log_survival_slope"] =
            log_survival_slope(curve, tail_fit->first, tail_fit->second);
      }
    }
    per_step.push_back(std::move(entry));
  }
  ctx.results["checkpoints"] = per_step;
  if (!laplace_csv.empty()) ctx.write_file("laplace.csv", laplace_csv);
  if (!survival_csv.empty()) ctx.write_file("survival.csv", survival_csv);
}

void run_markov(Context& ctx, const Json& payload) {
  allow_keys(payload, {"spec", "v_grid", "simulation"});
  const MarkovSpec spec = markov_spec_from_json(require(payload, "spec"));
  const std::vector<double> grid =
      payload.contains("v_grid") ? as_numbers(payload["v_grid"], "v_grid")
                                 : std::vector<double>{};
  std::optional<ModulatedConfig> sim;
  if (payload.contains("simulation")) {
    const Json& s = payload["simulation"];
    if (!s.is_object()) throw InvalidInput("payload.simulation: expected an object");
    allow_keys(s, {"r0", "horizon", "trajectories", "seed", "checkpoints", "quantiles"});
    sim.emplace();
    sim->r0 = r0_or_zero(s);
    sim->horizon = as_count(require(s, "horizon"), "simulation.horizon");
    sim->trajectories = as_count(require(s, "trajectories"), "simulation.trajectories");
    sim->seed = seed_of(ctx, s);
    sim->checkpoints = checkpoints_or_horizon(s, sim->horizon);
  }
  const std::vector<double> probs =
      sim && payload["simulation"].contains("quantiles")
          ? as_numbers(payload["simulation"]["quantiles"], "simulation.quantiles")
          : std::vector<double>{0.5, 0.9, 0.99};

  ctx.uses({"v_bar", "envelope"});
  const ExtReal vbar = v_bar(spec);
  ctx.results["v_bar"] = to_json(vbar);
  try {
    const EnvelopeLaw env = envelope(spec);
    ctx.uses({"exponents"});
    const Exponents e = exponents(env.law);
    ctx.results["envelope"] = {{"law", to_json(env.law)}, {"exponents", to_json(e)}};
  } catch (const Unsupported& e) {
    // Parametric per-state Q: only v_bar is available.
    ctx.results["envelope"] = {{"unavailable", e.what()}};
  }

  if (!grid.empty()) ctx.uses({"classify_modulated"});
  Json rows = Json::array();
  for (double v : grid) {
    const ModulatedVerdict verdict = classify_modulated(spec, v);
    Json row = {{"v", v}, {"verdict", to_string(verdict)}};
    if (verdict == ModulatedVerdict::kDivergent) {
      ctx.uses({"divergence_witness"});
      const DivergenceWitness w = divergence_witness(spec, v);
      row["witness"] = {{"state", w.label},
                        {"abscissa", to_json(w.abscissa)},
                        {"visited_almost_surely", w.visited_almost_surely}};
    }
    rows.push_back(std::move(row));
  }
  ctx.results["classification"] = rows;

  if (sim) {
    ctx.uses({"simulate_modulated", "empirical_quantile"});
    const ModulatedPaths paths = simulate_modulated(spec, *sim, ctx.options.threads);
    ctx.results["simulation"] = {{"seed", sim->seed},
                                 {"trajectories", sim->trajectories},
                                 {"horizon", sim->horizon},
                                 {"envelope_violations", paths.violations}};
    std::ostringstream csv;
    csv << "step,prob,abs_r,r_bar\n";
    for (std::size_t c = 0; c < paths.checkpoints.size(); ++c) {
      std::vector<double> abs_r;
      std::vector<double> r_bar;
      for (std::size_t t = 0; t < paths.trajectories; ++t) {
        abs_r.push_back(std::abs(paths.r_at(t, c)));
        r_bar.push_back(paths.r_bar_at(t, c));
      }
      for (double p : probs) {
        csv << paths.checkpoints[c] << ',' << format_double(p) << ','
            << format_double(empirical_quantile(abs_r, p)) << ','
            << format_double(empirical_quantile(r_bar, p)) << '\n';
      }
    }
    ctx.write_file("markov_quantiles.csv", csv.str());
  }
}

using ModeFn = std::function<void(Context&, const Json&)>;

const std::map<std::string, ModeFn>& modes() {
  static const std::map<std::string, ModeFn> table = {
      {"exponents", run_exponents}, {"propagate", run_propagate},
      {"certify", run_certify},     {"metric", run_metric},
      {"simulate", run_simulate},   {"markov", run_markov},
  };
  return table;
}

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

int run(const RunOptions& options, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Context ctx(options);
  Json result = Json::object();
  int code = kOk;
  std::string config_text;
  try {
    std::ifstream in(options.config, std::ios::binary);
    if (!in) throw InvalidInput("cannot read config " + options.config.string());
    config_text.assign(std::istreambuf_iterator<char>(in), {});
    Json config;
    try {
      config = Json::parse(config_text);
    } catch (const Json::parse_error& e) {
      throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
    }
    if (!config.is_object()) throw InvalidInput("config: expected an object");
    for (const auto& [key, value] : config.items()) {
      if (key != "name" && key != "mode" && key != "payload") {
        throw InvalidInput("config: unknown field '" + key + "'");
      }
    }
    if (!config.contains("mode") || !config["mode"].is_string()) {
      throw InvalidInput("config: missing string field 'mode'");
    }
    const std::string mode = config["mode"].get<std::string>();
    const auto it = modes().find(mode);
    if (it == modes().end()) throw InvalidInput("config: unknown mode '" + mode + "'");
    result["name"] = config.value("name", "");
    result["mode"] = mode;
    const Json payload = config.value("payload", Json::object());
    if (!payload.is_object()) throw InvalidInput("config.payload: expected an object");

    fs::create_directories(options.out);
    it->second(ctx, payload);
    result["status"] = "ok";
    result["results"] = ctx.results;
  } catch (const InvalidInput& e) {
    code = kSchemaError;
    result["status"] = "error";
    result["error"] = {{"kind", "InvalidInput"}, {"message", e.what()}};
  } catch (const RegimeError& e) {
    code = kRegimeError;
    result["status"] = "error";
    result["error"] = {{"kind", "RegimeError"}, {"message", e.what()}};
  } catch (const ResourceError& e) {
    code = kResourceError;
    result["status"] = "error";
    result["error"] = {{"kind", "ResourceError"}, {"message", e.what()}};
  } catch (const std::exception& e) {
    code = kFailure;
    result["status"] = "error";
    result["error"] = {{"kind", "Error"}, {"message", e.what()}};
  }
  if (code != kOk) err << "error: " << result["error"]["message"].get<std::string>() << '\n';

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result["provenance"] = {{"config_path", options.config.string()},
                          {"config_fnv1a", hex64(fnv1a(config_text))},
                          {"library_version", kVersion},
                          {"seed_override", options.seed ? Json(*options.seed) : Json()},
                          {"operations", ctx.operations},
                          {"files", ctx.files},
                          {"wall_time_seconds", wall}};
  try {
    fs::create_directories(options.out);
    std::ofstream f(options.out / "result.json", std::ios::binary);
    f << result.dump(2) << '\n';
    if (!f) throw std::runtime_error("write failed");
  } catch (const std::exception& e) {
    err << "error: cannot write " << (options.out / "result.json").string() << ": "
        << e.what() << '\n';
    if (code == kOk) code = kFailure;
  }
  return code;
}

}  // namespace perplab::cli
