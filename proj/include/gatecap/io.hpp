// Copyright 2026 The gatecap developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "gatecap/protocol.hpp"

namespace gatecap::io {

using nlohmann::json;

// Complex numbers are stored as [re, im]; doubles use the library's
// shortest-round-trip form, so write-then-read reproduces the exact bits.

inline json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument("expected a [re, im] pair");
  }
  return Complex(j.at(0).get<double>(), j.at(1).get<double>());
}

inline json vector_json(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_json(v(i)));
  return out;
}

inline Eigen::VectorXcd vector_from(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected an amplitude array");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v(i) = complex_from(j.at(static_cast<std::size_t>(i)));
  }
  return v;
}

inline json matrix_json(const Eigen::MatrixXcd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(complex_json(m(r, c)));
    }
    out.push_back(std::move(row));
  }
  return out;
}

inline Eigen::MatrixXcd matrix_from(const json& j) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument("expected a matrix as an array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j.at(static_cast<std::size_t>(r));
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::invalid_argument("ragged matrix rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = complex_from(row.at(static_cast<std::size_t>(c)));
    }
  }
  return m;
}

inline std::string party_name(Party p) {
  return p == Party::alice ? "alice" : "bob";
}

inline Party party_from(const std::string& s) {
  if (s == "alice") return Party::alice;
  if (s == "bob") return Party::bob;
  throw std::invalid_argument("unknown party: " + s);
}

inline std::string role_name(Role r) {
  switch (r) {
    case Role::message: return "message";
    case Role::gate_qubit: return "gate_qubit";
    case Role::ancilla: return "ancilla";
    default: return "copy_register";
  }
}

inline Role role_from(const std::string& s) {
  if (s == "message") return Role::message;
  if (s == "gate_qubit") return Role::gate_qubit;
  if (s == "ancilla") return Role::ancilla;
  if (s == "copy_register") return Role::copy_register;
  throw std::invalid_argument("unknown role: " + s);
}

inline json layout_json(const SubsystemLayout& layout) {
  json out = json::array();
  for (std::size_t k = 0; k < layout.size(); ++k) {
    out.push_back(json{{"dim", layout[k].dim},
                       {"party", party_name(layout[k].party)},
                       {"role", role_name(layout[k].role)}});
  }
  return out;
}

inline SubsystemLayout layout_from(const json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected a subsystem array");
  std::vector<Subsystem> subs;
  for (const json& e : j) {
    subs.push_back(Subsystem{e.at("dim").get<Eigen::Index>(),
                             party_from(e.at("party").get<std::string>()),
                             role_from(e.at("role").get<std::string>())});
  }
  return SubsystemLayout(std::move(subs));
}

inline Gate named_gate(const std::string& name) {
  if (name == "identity") return gates::identity();
  if (name == "cnot") return gates::cnot();
  if (name == "swap") return gates::swap();
  throw std::invalid_argument("unknown gate name: " + name);
}

// Gate files hold one of: {"name": ...}, {"alphas": [a1, a2, a3]},
// {"matrix": [[...], ...]}.
inline Gate gate_from_json(const json& j) {
  if (j.contains("name")) return named_gate(j.at("name").get<std::string>());
  if (j.contains("alphas")) {
    const json& a = j.at("alphas");
    if (!a.is_array() || a.size() != 3) {
      throw std::invalid_argument("alphas must hold three numbers");
    }
    return make_ud(a.at(0).get<double>(), a.at(1).get<double>(),
                   a.at(2).get<double>());
  }
  if (j.contains("matrix")) {
    const Eigen::MatrixXcd m = matrix_from(j.at("matrix"));
    if (m.rows() != 4 || m.cols() != 4) {
      throw std::invalid_argument("gate matrix must be 4x4");
    }
    // File-format contract: matrices written with ~12 significant digits must
    // round-trip, so the acceptance tolerance is looser than tol::unitary.
    return Gate(m, 1e-8);
  }
  throw std::invalid_argument("gate needs one of: name, alphas, matrix");
}

inline json gate_json(const Gate& g) {
  return json{{"matrix", matrix_json(g.matrix)}};
}

inline json script_json(const ProtocolScript& s) {
  json steps = json::array();
  for (const auto& step : s.steps) {
    json ops = json::array();
    for (const auto& op : step.ops) {
      ops.push_back(json{{"party", party_name(op.party)},
                         {"targets", op.targets},
                         {"matrix", matrix_json(op.matrix)}});
    }
    steps.push_back(json{{"ops", std::move(ops)}});
  }
  return json{{"alice_bits", s.alice_bits},
              {"bob_bits", s.bob_bits},
              {"gate_uses", s.gate_uses},
              {"gate", gate_json(s.gate)},
              {"layout", layout_json(s.layout)},
              {"ancilla", vector_json(s.ancilla_amplitudes)},
              {"steps", std::move(steps)}};
}

inline ProtocolScript script_from_json(const json& j) {
  ProtocolScript s;
  s.alice_bits = j.at("alice_bits").get<int>();
  s.bob_bits = j.at("bob_bits").get<int>();
  s.gate_uses = j.at("gate_uses").get<int>();
  s.gate = gate_from_json(j.at("gate"));
  s.layout = layout_from(j.at("layout"));
  s.ancilla_amplitudes = vector_from(j.at("ancilla"));
  for (const json& step : j.at("steps")) {
    ProtocolStep ps;
    for (const json& op : step.at("ops")) {
      ps.ops.push_back(
          LocalOp{party_from(op.at("party").get<std::string>()),
                  op.at("targets").get<std::vector<std::size_t>>(),
                  matrix_from(op.at("matrix"))});
    }
    s.steps.push_back(std::move(ps));
  }
  validate(s);
  return s;
}

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

inline void save_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

inline Gate load_gate(const std::string& path) {
  return gate_from_json(load_json(path));
}

inline ProtocolScript load_script(const std::string& path) {
  return script_from_json(load_json(path));
}

inline void save_script(const std::string& path, const ProtocolScript& s) {
  save_json(path, script_json(s));
}

// Fixed-width significant-digit formatting for report output.
inline std::string format_significant(double v, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

}  // namespace gatecap::io
