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

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <string>

#include "gatecap/io.hpp"
#include "gatecap/scripts.hpp"

namespace gatecap {
namespace {

using io::json;

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

TEST_CASE("complex numbers round-trip as [re, im] pairs") {
  const Complex z(1.25, -0.5);
  const json j = io::complex_json(z);
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  CHECK(io::complex_from(j) == z);
  CHECK_THROWS_AS(io::complex_from(json::array({1.0})),
                  std::invalid_argument);
}

TEST_CASE("matrices round-trip through JSON") {
  const Eigen::Matrix4cd m = gates::haar_random(5).matrix;
  const Eigen::MatrixXcd back = io::matrix_from(io::matrix_json(m));
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);

  json ragged = json::array();
  ragged.push_back(json::array({io::complex_json(Complex(1, 0))}));
  ragged.push_back(json::array());
  CHECK_THROWS_AS(io::matrix_from(ragged), std::invalid_argument);
}

TEST_CASE("named gates parse and unknown names are rejected") {
  CHECK((io::named_gate("cnot").matrix - gates::cnot().matrix).norm() == 0.0);
  CHECK((io::named_gate("swap").matrix - gates::swap().matrix).norm() == 0.0);
  CHECK((io::named_gate("identity").matrix - Eigen::Matrix4cd::Identity())
            .norm() == 0.0);
  CHECK_THROWS_AS(io::named_gate("toffoli"), std::invalid_argument);
}

TEST_CASE("gate files accept name, alphas, or matrix forms") {
  CHECK((io::gate_from_json(json{{"name", "swap"}}).matrix -
         gates::swap().matrix)
            .norm() == 0.0);

  const json alphas = json{{"alphas", {0.3, 0.2, 0.1}}};
  CHECK((io::gate_from_json(alphas).matrix -
         make_ud(0.3, 0.2, 0.1).matrix)
            .norm() < 1e-15);

  const Gate g = gates::haar_random(9);
  const Gate back = io::gate_from_json(io::gate_json(g));
  CHECK((back.matrix - g.matrix).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(io::gate_from_json(json{{"alphas", {0.3, 0.2}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(io::gate_from_json(json::object()), std::invalid_argument);
}

TEST_CASE("gate files enforce the documented unitarity tolerance") {
  Eigen::Matrix4cd nearly = gates::cnot().matrix;
  nearly(0, 0) += 1e-9;
  CHECK_NOTHROW(io::gate_from_json(json{{"matrix", io::matrix_json(nearly)}}));

  Eigen::Matrix4cd off = gates::cnot().matrix;
  off(0, 0) += 1e-6;
  CHECK_THROWS_AS(io::gate_from_json(json{{"matrix", io::matrix_json(off)}}),
                  std::invalid_argument);
}

TEST_CASE("layouts round-trip with party and role tags") {
  const SubsystemLayout layout({{4, Party::alice, Role::message},
                                {2, Party::alice, Role::gate_qubit},
                                {3, Party::bob, Role::ancilla},
                                {2, Party::bob, Role::copy_register}});
  const SubsystemLayout back = io::layout_from(io::layout_json(layout));
  CHECK(back == layout);

  CHECK_THROWS_AS(io::party_from("carol"), std::invalid_argument);
  CHECK_THROWS_AS(io::role_from("scratch"), std::invalid_argument);
}

TEST_CASE("scripts serialize deterministically and reparse") {
  for (const ProtocolScript& s :
       {scripts::cnot_forward(), scripts::swap_assisted()}) {
    const json first = io::script_json(s);
    const ProtocolScript parsed = io::script_from_json(first);
    const json second = io::script_json(parsed);
    CHECK(first.dump() == second.dump());

    CHECK(parsed.alice_bits == s.alice_bits);
    CHECK(parsed.bob_bits == s.bob_bits);
    CHECK(parsed.gate_uses == s.gate_uses);
    CHECK(parsed.layout == s.layout);
    CHECK((parsed.ancilla_amplitudes - s.ancilla_amplitudes).norm() == 0.0);
    REQUIRE(parsed.steps.size() == s.steps.size());
    CHECK(message_fidelity(parsed).eps < 1e-12);
  }
}

TEST_CASE("script parsing validates the reconstructed procedure") {
  json j = io::script_json(scripts::swap_exchange());
  j["alice_bits"] = 5;
  CHECK_THROWS_AS(io::script_from_json(j), std::invalid_argument);

  json missing = io::script_json(scripts::swap_exchange());
  missing.erase("steps");
  CHECK_THROWS(io::script_from_json(missing));
}

TEST_CASE("gate and script files round-trip on disk") {
  const auto gate_path = temp_file("gatecap_test_gate.json");
  const auto script_path = temp_file("gatecap_test_script.json");

  io::save_json(gate_path.string(), io::gate_json(gates::cnot()));
  const Gate g = io::load_gate(gate_path.string());
  CHECK((g.matrix - gates::cnot().matrix).norm() == 0.0);

  io::save_script(script_path.string(), scripts::cnot_assisted());
  const ProtocolScript s = io::load_script(script_path.string());
  CHECK(message_fidelity(s).eps < 1e-12);

  std::filesystem::remove(gate_path);
  std::filesystem::remove(script_path);

  CHECK_THROWS_AS(io::load_json("/nonexistent/gatecap.json"),
                  std::runtime_error);
}

TEST_CASE("significant-digit formatting") {
  CHECK(io::format_significant(1.0) == "1");
  CHECK(io::format_significant(0.5) == "0.5");
  CHECK(io::format_significant(1.52587890625e-05) == "1.52587890625e-05");
  CHECK(io::format_significant(2.0 / 3.0) == "0.666666666667");
  CHECK(io::format_significant(2.0 / 3.0, 3) == "0.667");
}

}  // namespace
}  // namespace gatecap
