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

#include <compare>
#include <iosfwd>
#include <string>

namespace perplab {

/// A value in [0, +inf]. Infinity is a separate state, not a large double.
class ExtReal {
 public:
  constexpr ExtReal() = default;

  /// Throws InvalidInput for negative or NaN values and ResourceError when
  /// `x` overflowed to IEEE infinity.
  static ExtReal finite(double x);
  static constexpr ExtReal infinity() { return ExtReal(0.0, true); }

  constexpr bool is_finite() const { return !infinite_; }
  constexpr bool is_infinite() const { return infinite_; }

  /// The finite value; throws std::logic_error on +inf.
  double value() const;

  /// IEEE view: +inf maps to std::numeric_limits<double>::infinity().
  double to_double() const;

  friend ExtReal operator+(ExtReal a, ExtReal b);
  // 0 * inf = 0 (measure-theoretic convention).
  friend ExtReal operator*(ExtReal a, ExtReal b);
  friend ExtReal operator*(double a, ExtReal b);

  friend bool operator==(ExtReal a, ExtReal b);
  friend std::partial_ordering operator<=>(ExtReal a, ExtReal b);

  friend ExtReal min(ExtReal a, ExtReal b) { return a <= b ? a : b; }
  friend ExtReal max(ExtReal a, ExtReal b) { return a >= b ? a : b; }

  std::string to_string() const;

 private:
  constexpr ExtReal(double v, bool inf) : value_(v), infinite_(inf) {}

  double value_ = 0.0;
  bool infinite_ = false;
};

std::ostream& operator<<(std::ostream& os, ExtReal x);

}  // namespace perplab
