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

#include <stdexcept>
#include <string>

namespace perplab {

// Invalid input: an invariant of a domain type or a config schema is violated.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The requested exponent lies outside the regime where an operation is valid.
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A law falls outside the metric space M_rho.
class MetricDomainError : public RegimeError {
 public:
  using RegimeError::RegimeError;
};

// A depth, point, or enumeration budget was exceeded.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The operation has no exact implementation for the given law families.
class Unsupported : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace perplab
