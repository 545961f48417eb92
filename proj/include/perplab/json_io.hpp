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

#include <nlohmann/json.hpp>

#include "perplab/certificates.hpp"
#include "perplab/distributions.hpp"
#include "perplab/ext_real.hpp"
#include "perplab/markov.hpp"
#include "perplab/metric.hpp"
#include "perplab/perpetuity.hpp"

namespace perplab {

using Json = nlohmann::json;

// Parsers throw InvalidInput naming the offending field.
ScalarDist scalar_dist_from_json(const Json& j);
JointMQ joint_from_json(const Json& j);
MarkovSpec markov_spec_from_json(const Json& j);

Json to_json(const ScalarDist& d);
Json to_json(const JointMQ& j);
/// A number, or the string "+inf".
Json to_json(ExtReal x);
Json to_json(const Exponents& e);
Json to_json(const BoundCertificate& c);
Json to_json(const DivergenceCertificate& c);
Json to_json(const Classification& c);
Json to_json(const ContractionReport& r);
Json to_json(const Distance& d);

}  // namespace perplab
