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

#include "perplab/json_io.hpp"

#include <string>

#include "perplab/errors.hpp"

namespace perplab {
namespace {

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw InvalidInput(where + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw InvalidInput(where + ": missing field '" + key + "'");
  return *it;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw InvalidInput(where + ": expected a number");
  return j.get<double>();
}

double number_field(const Json& j, const char* key, const std::string& where) {
  return number(field(j, key, where), where + "." + key);
}

std::vector<double> number_list(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidInput(where + ": expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

ScalarDist scalar_at(const Json& j, const std::string& where) {
  const Json& kind = field(j, "kind", where);
  if (!kind.is_string()) throw InvalidInput(where + ".kind: expected a string");
  const std::string k = kind.get<std::string>();
  if (k == "atoms") {
    const Json& list = field(j, "atoms", where);
    if (!list.is_array()) throw InvalidInput(where + ".atoms: expected an array");
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string at = where + ".atoms[" + std::to_string(i) + "]";
      if (!list[i].is_array() || list[i].size() != 2) {
        throw InvalidInput(at + ": expected [value, prob]");
      }
      atoms.push_back({number(list[i][0], at), number(list[i][1], at)});
    }
    return ScalarDist::atoms(std::move(atoms));
  }
  if (k == "exponential") return ScalarDist::exponential(number_field(j, "rate", where));
  if (k == "geometric") {
    return ScalarDist::geometric(number_field(j, "p", where), number_field(j, "step", where));
  }
  if (k == "constant") return ScalarDist::constant(number_field(j, "value", where));
  throw InvalidInput(where + ".kind: unknown distribution kind '" + k + "'");
}

JointMQ joint_at(const Json& j, const std::string& where) {
  const Json& list = field(j, "branches", where);
  if (!list.is_array()) throw InvalidInput(where + ".branches: expected an array");
  std::vector<Branch> branches;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string at = where + ".branches[" + std::to_string(i) + "]";
    branches.push_back({number_field(list[i], "m", at), number_field(list[i], "p", at),
                        scalar_at(field(list[i], "q", at), at + ".q")});
  }
  return JointMQ(std::move(branches));
}

}  // namespace

ScalarDist scalar_dist_from_json(const Json& j) { return scalar_at(j, "distribution"); }

JointMQ joint_from_json(const Json& j) { return joint_at(j, "instance"); }

MarkovSpec markov_spec_from_json(const Json& j) {
  const std::string where = "spec";
  const Json& states_json = field(j, "states", where);
  if (!states_json.is_array()) throw InvalidInput("spec.states: expected an array");
  std::vector<std::string> states;
  for (const Json& s : states_json) {
    if (!s.is_string()) throw InvalidInput("spec.states: labels must be strings");
    states.push_back(s.get<std::string>());
  }
  const Json& rows = field(j, "transition", where);
  if (!rows.is_array()) throw InvalidInput("spec.transition: expected an array of rows");
  std::vector<std::vector<double>> transition;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    transition.push_back(number_list(rows[i], "spec.transition[" + std::to_string(i) + "]"));
  }
  std::vector<double> initial = number_list(field(j, "initial", where), "spec.initial");

  const auto dep = j.find("dependence");
  if (dep == j.end() || (dep->is_string() && dep->get<std::string>() == "independent")) {
    const Json& per_state = field(j, "per_state", where);
    if (!per_state.is_object()) throw InvalidInput("spec.per_state: expected an object");
    std::vector<JointMQ> laws;
    for (const std::string& s : states) {
      laws.push_back(joint_at(field(per_state, s.c_str(), "spec.per_state"),
                              "spec.per_state." + s));
    }
    if (per_state.size() != states.size()) {
      throw InvalidInput("spec.per_state: keys must match the state labels");
    }
    return MarkovSpec(std::move(states), std::move(transition), std::move(initial),
                      std::move(laws));
  }
  if (!dep->is_object()) {
    throw InvalidInput("spec.dependence: expected \"independent\" or {\"vectors\": [...]}");
  }
  const Json& list = field(*dep, "vectors", "spec.dependence");
  if (!list.is_array()) throw InvalidInput("spec.dependence.vectors: expected an array");
  std::vector<JointVector> vectors;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string at = "spec.dependence.vectors[" + std::to_string(i) + "]";
    const Json& values = field(list[i], "values", at);
    if (!values.is_array()) throw InvalidInput(at + ".values: expected an array");
    JointVector vec{{}, number_field(list[i], "prob", at)};
    for (std::size_t x = 0; x < values.size(); ++x) {
      const std::string vx = at + ".values[" + std::to_string(x) + "]";
      if (!values[x].is_array() || values[x].size() != 2) {
        throw InvalidInput(vx + ": expected [m, q]");
      }
      vec.entries.push_back({number(values[x][0], vx), number(values[x][1], vx)});
    }
    vectors.push_back(std::move(vec));
  }
  return MarkovSpec(std::move(states), std::move(transition), std::move(initial),
                    std::move(vectors));
}

Json to_json(const ScalarDist& d) {
  switch (d.kind()) {
    case ScalarDist::Kind::kAtoms: {
      Json atoms = Json::array();
      for (const Atom& a : d.finite_atoms()) atoms.push_back({a.value, a.prob});
      return {{"kind", "atoms"}, {"atoms", atoms}};
    }
    case ScalarDist::Kind::kExponential:
      return {{"kind", "exponential"}, {"rate", d.as_exponential()->rate}};
    case ScalarDist::Kind::kGeometric:
      return {{"kind", "geometric"}, {"p", d.as_geometric()->p}, {"step", d.as_geometric()->step}};
    case ScalarDist::Kind::kConstant:
      return {{"kind", "constant"}, {"value", d.as_constant()->value}};
  }
  return {};
}

Json to_json(const JointMQ& j) {
  Json branches = Json::array();
  for (const Branch& b : j.branches()) {
    branches.push_back({{"m", b.m}, {"p", b.p}, {"q", to_json(b.q)}});
  }
  return {{"branches", branches}};
}

Json to_json(ExtReal x) {
  if (x.is_infinite()) return "+inf";
  return x.value();
}

Json to_json(const Exponents& e) {
  return {{"v_q", to_json(e.v_q)},   {"v_0", to_json(e.v_0)}, {"v_gg", to_json(e.v_gg)},
          {"v_1", to_json(e.v_1)},   {"v_c", to_json(e.v_c)}};
}

Json to_json(const BoundCertificate& c) {
  return {{"v", c.v},
          {"epsilon", c.epsilon},
          {"k", c.k},
          {"rhos", c.rhos},
          {"base_bound", to_json(c.base_bound)},
          {"chained_bound", to_json(c.chained_bound)}};
}

Json to_json(const DivergenceCertificate& c) {
  Json out = {{"v", c.v}, {"reason", to_string(c.reason)}};
  if (c.reason == DivergenceCertificate::Reason::kRho0) out["rho0"] = to_json(c.rho0);
  return out;
}

Json to_json(const Classification& c) {
  Json out = {{"v", c.v}, {"v_c", to_json(c.v_c)}, {"verdict", to_string(c.verdict)}};
  if (c.bounded) out["bounded"] = to_json(*c.bounded);
  if (c.divergent) out["divergent"] = to_json(*c.divergent);
  return out;
}

Json to_json(const ContractionReport& r) {
  return {{"lhs", r.lhs}, {"factor", r.factor}, {"rhs", r.rhs}, {"holds", r.holds}};
}

Json to_json(const Distance& d) {
  return {{"value", d.value}, {"abs_error", d.abs_error}, {"exact", d.exact}};
}

}  // namespace perplab
