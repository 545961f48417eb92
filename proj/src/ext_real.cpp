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

#include "perplab/ext_real.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "perplab/errors.hpp"

namespace perplab {

ExtReal ExtReal::finite(double x) {
  if (std::isnan(x) || x < 0.0) {
    throw InvalidInput("ExtReal: value must be a nonnegative number, got " +
                       std::to_string(x));
  }
  if (std::isinf(x)) {
    throw ResourceError("ExtReal: finite value overflowed double range");
  }
  return ExtReal(x, false);
}

double ExtReal::value() const {
  if (infinite_) throw std::logic_error("ExtReal::value() called on +inf");
  return value_;
}

double ExtReal::to_double() const {
  return infinite_ ? std::numeric_limits<double>::infinity() : value_;
}

ExtReal operator+(ExtReal a, ExtReal b) {
  if (a.infinite_ || b.infinite_) return ExtReal::infinity();
  return ExtReal::finite(a.value_ + b.value_);
}

ExtReal operator*(ExtReal a, ExtReal b) {
  if ((a.is_finite() && a.value_ == 0.0) || (b.is_finite() && b.value_ == 0.0)) {
    return ExtReal{};
  }
  if (a.infinite_ || b.infinite_) return ExtReal::infinity();
  return ExtReal::finite(a.value_ * b.value_);
}

ExtReal operator*(double a, ExtReal b) { return ExtReal::finite(a) * b; }

bool operator==(ExtReal a, ExtReal b) {
  if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
  return a.value_ == b.value_;
}

std::partial_ordering operator<=>(ExtReal a, ExtReal b) {
  if (a.infinite_ && b.infinite_) return std::partial_ordering::equivalent;
  if (a.infinite_) return std::partial_ordering::greater;
  if (b.infinite_) return std::partial_ordering::less;
  return a.value_ <=> b.value_;
}

std::string ExtReal::to_string() const {
  if (infinite_) return "+inf";
  std::ostringstream os;
  os.precision(17);
  os << value_;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, ExtReal x) {
  return os << x.to_string();
}

}  // namespace perplab
