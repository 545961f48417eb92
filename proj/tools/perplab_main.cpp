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

#include <iostream>

#include <CLI11.hpp>
#include <perplab/version.hpp>

#include "runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"perplab: exponential moments of the affine recursion R' = M R + Q"};
  app.set_version_flag("--version", std::string(perplab::kVersion));
  perplab::cli::RunOptions options;
  std::uint64_t seed = 0;
  app.add_option("--config", options.config, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", options.out, "Output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Seed override for every simulation");
  app.add_option("--threads", options.threads, "Worker threads; 0 = hardware concurrency")
      ->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : perplab::cli::kSchemaError;
  }
  if (*seed_opt) options.seed = seed;
  return perplab::cli::run(options, std::cerr);
}
