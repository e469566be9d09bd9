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

#include <cmath>

#include "gatecap/capacity.hpp"

namespace gatecap {
namespace {

CapacitySearchConfig quick_config() {
  CapacitySearchConfig config;
  config.restarts = 8;
  return config;
}

TEST_CASE("identity gate moves no entanglement") {
  CapacitySearchConfig config = quick_config();
  config.restarts = 2;
  const CapacityReport up = entangling_capability(gates::identity(), config);
  CHECK(up.value == Catch::Approx(0.0).margin(1e-9));
  CHECK(up.converged);
}

TEST_CASE("controlled flip creates and removes one unit of entanglement") {
  const CapacityReport up =
      entangling_capability(gates::cnot(), quick_config());
  CHECK(up.value == Catch::Approx(1.0).margin(1e-3));
  CHECK(up.converged);
  REQUIRE(up.best_state.has_value());
  CHECK(entropy_gain(gates::cnot(), *up.best_state) ==
        Catch::Approx(up.value).margin(1e-12));

  const CapacityReport down =
      disentangling_capability(gates::cnot(), quick_config());
  CHECK(down.value == Catch::Approx(1.0).margin(1e-3));
  CHECK(down.converged);
  REQUIRE(down.best_state.has_value());
  CHECK(entropy_gain(gates::cnot(), *down.best_state) ==
        Catch::Approx(-down.value).margin(1e-12));
}

TEST_CASE("exchange gate moves two units of entanglement") {
  const CapacityReport up = entangling_capability(gates::swap(), quick_config());
  CHECK(up.value == Catch::Approx(2.0).margin(1e-3));
  CHECK(up.converged);
}

TEST_CASE("per-restart values are deterministic for a fixed seed") {
  CapacitySearchConfig config = quick_config();
  config.restarts = 4;
  config.seed = 42;
  const CapacityReport a = entangling_capability(gates::cnot(), config);
  const CapacityReport b = entangling_capability(gates::cnot(), config);
  REQUIRE(a.per_restart_values.size() == b.per_restart_values.size());
  for (std::size_t i = 0; i < a.per_restart_values.size(); ++i) {
    CHECK(a.per_restart_values[i] == b.per_restart_values[i]);
  }
  CHECK(a.best_restart == b.best_restart);

  config.seed = 43;
  const CapacityReport c = entangling_capability(gates::cnot(), config);
  bool any_differs = false;
  for (std::size_t i = 0; i < a.per_restart_values.size(); ++i) {
    if (a.per_restart_values[i] != c.per_restart_values[i]) any_differs = true;
  }
  CHECK(any_differs);
}

TEST_CASE("asymmetric ancilla dimensions are respected") {
  CapacitySearchConfig config = quick_config();
  config.alice_ancilla_dim = 3;
  config.bob_ancilla_dim = 2;
  config.restarts = 4;
  const CapacityReport up = entangling_capability(gates::cnot(), config);
  REQUIRE(up.best_state.has_value());
  CHECK(up.best_state->layout.total_dim() == 3 * 2 * 2 * 2);
  CHECK(up.value == Catch::Approx(1.0).margin(1e-3));
}

TEST_CASE("iteration starvation is reported as nonconvergence") {
  CapacitySearchConfig config;
  config.restarts = 1;
  config.max_iterations = 1;
  const CapacityReport up = entangling_capability(gates::swap(), config);
  CHECK_FALSE(up.converged);
  CHECK(up.value < 2.0 - 1e-3);
}

TEST_CASE("conjugate witness reverses the entropy change of symmetric gates") {
  const Gate g = make_ud(0.3, 0.2, 0.1);
  CapacitySearchConfig config = quick_config();
  config.restarts = 4;
  const CapacityReport up = entangling_capability(g, config);
  REQUIRE(up.best_state.has_value());

  const PartitionedState witness = conjugate_witness(g, *up.best_state);
  CHECK(entropy_gain(g, witness) == Catch::Approx(-up.value).margin(1e-9));
}

TEST_CASE("conjugate witness requires a symmetric gate") {
  CapacitySearchConfig config = quick_config();
  config.restarts = 1;
  // A generic random gate is not equal to its transpose.
  const Gate g = gates::haar_random(2);
  REQUIRE((g.matrix - g.matrix.transpose()).cwiseAbs().maxCoeff() > 1e-6);
  const CapacityReport up = entangling_capability(g, config);
  REQUIRE(up.best_state.has_value());
  CHECK_THROWS_AS(conjugate_witness(g, *up.best_state),
                  std::invalid_argument);
}

TEST_CASE("entangling and disentangling strengths agree for random gates") {
  CapacitySearchConfig config = quick_config();
  for (std::uint64_t seed = 10; seed < 13; ++seed) {
    const Gate g = gates::haar_random(seed);
    const CapacityReport up = entangling_capability(g, config);
    const CapacityReport down = disentangling_capability(g, config);
    CHECK(up.converged);
    CHECK(down.converged);
    CHECK(up.value == Catch::Approx(down.value).margin(2e-3));
  }
}

}  // namespace
}  // namespace gatecap
