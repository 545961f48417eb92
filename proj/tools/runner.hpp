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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace perplab::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kSchemaError = 2,
  kRegimeError = 3,
  kResourceError = 4,
};

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;  // replaces every seed in the config
  unsigned threads = 0;               // 0: one per hardware thread
};

/// Loads the experiment, runs it and writes result.json plus CSV side tables
/// into `out`. Errors are reported on `err` and in result.json.
int run(const RunOptions& options, std::ostream& err);

/// 64-bit FNV-1a of the bytes.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace perplab::cli
