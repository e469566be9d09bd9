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
#include <vector>

#include "gatecap/protocol.hpp"
#include "gatecap/scripts.hpp"

namespace gatecap {
namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<ProtocolScript> shipped_scripts() {
  return {scripts::cnot_forward(), scripts::swap_exchange(),
          scripts::cnot_assisted(), scripts::swap_assisted(),
          scripts::bell_spectator()};
}

// swap_exchange with the interaction angles detuned: the gate acquires a
// both-bits-flip component of weight sin^2(delta), so every message pair is
// delivered with that error.
ProtocolScript detuned_exchange(double delta) {
  ProtocolScript s = scripts::swap_exchange();
  s.gate = make_ud(kPi / 4.0 - delta, kPi / 4.0, kPi / 4.0);
  return s;
}

// Fidelity of the reversed script's output against x, y back in the message
// registers, both inputs and both received messages in the copy registers,
// and the original ancilla restored.
double round_trip_fidelity(const ProtocolScript& original,
                           const ProtocolScript& reversed, Eigen::Index x,
                           Eigen::Index y) {
  const PartitionedState fin = run(reversed, x, y);
  const SubsystemLayout& ext = fin.layout;
  const std::size_t a1 = ext.indices(Party::alice, Role::message).front();
  const std::size_t b1 = ext.indices(Party::bob, Role::message).front();
  const auto copies = ext.role_indices(Role::copy_register);
  REQUIRE(copies.size() == 4);

  Eigen::Index base = x * ext.stride(a1) + y * ext.stride(b1);
  base += x * ext.stride(copies[0]) + y * ext.stride(copies[1]);
  base += y * ext.stride(copies[2]) + x * ext.stride(copies[3]);

  std::vector<std::size_t> orig_anc;
  for (std::size_t k = 0; k < original.layout.size(); ++k) {
    if (original.layout[k].role != Role::message) orig_anc.push_back(k);
  }
  const auto anc_off = detail::subset_offsets(ext, orig_anc);
  Complex overlap(0.0, 0.0);
  for (std::size_t i = 0; i < anc_off.size(); ++i) {
    overlap += std::conj(original.ancilla_amplitudes(
                   static_cast<Eigen::Index>(i))) *
               fin.amplitudes(base + anc_off[i]);
  }
  return std::norm(overlap);
}

TEST_CASE("script validation rejects malformed procedures") {
  CHECK_NOTHROW(validate(scripts::swap_exchange()));

  ProtocolScript cross_party = scripts::swap_exchange();
  cross_party.steps[0].ops[0].targets = {0, 3};
  CHECK_THROWS_AS(validate(cross_party), std::invalid_argument);

  ProtocolScript bad_message_dim = scripts::swap_exchange();
  bad_message_dim.alice_bits = 2;
  CHECK_THROWS_AS(validate(bad_message_dim), std::invalid_argument);

  ProtocolScript missing_step = scripts::swap_exchange();
  missing_step.steps.pop_back();
  CHECK_THROWS_AS(validate(missing_step), std::invalid_argument);

  ProtocolScript not_unitary = scripts::swap_exchange();
  not_unitary.steps[0].ops[0].matrix(0, 0) = 2.0;
  CHECK_THROWS_AS(validate(not_unitary), std::invalid_argument);

  ProtocolScript duplicate_target = scripts::swap_exchange();
  duplicate_target.steps[0].ops[0].targets = {0, 0};
  CHECK_THROWS_AS(validate(duplicate_target), std::invalid_argument);

  ProtocolScript bad_ancilla = scripts::swap_exchange();
  bad_ancilla.ancilla_amplitudes *= 2.0;
  CHECK_THROWS_AS(validate(bad_ancilla), std::invalid_argument);

  ProtocolScript wrong_ancilla_size = scripts::swap_exchange();
  wrong_ancilla_size.ancilla_amplitudes = Eigen::VectorXcd::Ones(1);
  CHECK_THROWS_AS(validate(wrong_ancilla_size), std::invalid_argument);
}

TEST_CASE("run preserves the norm and rejects out-of-range messages") {
  const ProtocolScript s = scripts::cnot_assisted();
  const PartitionedState fin = run(s, 1, 0);
  CHECK(fin.amplitudes.norm() == Catch::Approx(1.0).margin(1e-12));
  CHECK_THROWS_AS(run(s, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(run(s, 0, -1), std::invalid_argument);
}

TEST_CASE("shipped scripts deliver every message pair") {
  for (const ProtocolScript& s : shipped_scripts()) {
    const RunResult r = message_fidelity(s);
    CHECK(r.eps < 1e-12);
    for (Eigen::Index x = 0; x < r.alice_messages; ++x) {
      for (Eigen::Index y = 0; y < r.bob_messages; ++y) {
        CHECK(r.eps_xy(x, y) < 1e-12);
      }
    }
  }
}

TEST_CASE("detuned gate delivers with the predicted error") {
  const double delta = 0.3;
  const ProtocolScript s = detuned_exchange(delta);
  const RunResult r = message_fidelity(s);
  const double expected = std::sin(delta) * std::sin(delta);
  CHECK(r.eps == Catch::Approx(expected).margin(1e-12));
  for (Eigen::Index x = 0; x < 2; ++x) {
    for (Eigen::Index y = 0; y < 2; ++y) {
      CHECK(r.eps_xy(x, y) == Catch::Approx(expected).margin(1e-12));
    }
  }
}

TEST_CASE("delivered-branch split reconstructs the output") {
  const ProtocolScript s = detuned_exchange(0.3);
  const PartitionedState fin = run(s, 1, 0);
  const UhlmannSplit split = uhlmann_split(fin, 1, 0);
  CHECK(split.eps > 0.01);
  CHECK(split.eps < 1.0);
  REQUIRE(split.error_state.has_value());

  const std::size_t a1 = s.layout.indices(Party::alice, Role::message).front();
  const std::size_t b1 = s.layout.indices(Party::bob, Role::message).front();
  std::vector<std::size_t> anc_pos;
  for (std::size_t k = 0; k < s.layout.size(); ++k) {
    if (s.layout[k].role != Role::message) anc_pos.push_back(k);
  }
  const auto anc_off = detail::subset_offsets(s.layout, anc_pos);
  const Eigen::Index base = 0 * s.layout.stride(a1) + 1 * s.layout.stride(b1);

  Eigen::VectorXcd ideal = Eigen::VectorXcd::Zero(s.layout.total_dim());
  for (std::size_t i = 0; i < anc_off.size(); ++i) {
    ideal(base + anc_off[i]) =
        split.ideal_ancilla.amplitudes(static_cast<Eigen::Index>(i));
  }

  const Eigen::VectorXcd rebuilt =
      std::sqrt(1.0 - split.eps) * ideal +
      std::sqrt(split.eps) * split.error_state->amplitudes;
  CHECK((rebuilt - fin.amplitudes).norm() < 1e-12);

  const Complex cross = ideal.adjoint() * split.error_state->amplitudes;
  CHECK(std::abs(cross) < 1e-12);
}

TEST_CASE("delivered-branch split edge cases") {
  const ProtocolScript s = scripts::cnot_forward();
  const PartitionedState fin = run(s, 1, 0);
  const UhlmannSplit split = uhlmann_split(fin, 1, 0);
  CHECK(split.eps < 1e-14);
  CHECK_FALSE(split.error_state.has_value());
  // The delivered block for the wrong message is empty.
  CHECK_THROWS_AS(uhlmann_split(fin, 0, 0), std::domain_error);
}

TEST_CASE("superposition accounting matches the closed form on all scripts") {
  const std::vector<double> expected = {1.0, 2.0, 2.0, 4.0, 3.0};
  const std::vector<ProtocolScript> all = shipped_scripts();
  for (std::size_t i = 0; i < all.size(); ++i) {
    const PartitionedState sup = superposition_state(all[i]);
    CHECK(sup.amplitudes.norm() == Catch::Approx(1.0).margin(1e-12));
    const double direct = entanglement_entropy(sup);
    const double closed = eta_entanglement(all[i]);
    CHECK(closed == Catch::Approx(expected[i]).margin(1e-9));
    CHECK(direct == Catch::Approx(closed).margin(1e-9));
  }
}

TEST_CASE("superposition overlap obeys the error bound") {
  const ProtocolScript exact = scripts::swap_exchange();
  const Complex same = ideal_superposition_state(exact).amplitudes.adjoint() *
                       superposition_state(exact).amplitudes;
  CHECK(std::abs(same) == Catch::Approx(1.0).margin(1e-12));

  for (double delta : {0.05, 0.1, 0.2, 0.4}) {
    const ProtocolScript s = detuned_exchange(delta);
    const double eps = message_fidelity(s).eps;
    const Complex overlap =
        ideal_superposition_state(s).amplitudes.adjoint() *
        superposition_state(s).amplitudes;
    CHECK(std::abs(overlap) >= std::sqrt(1.0 - eps) - 1e-12);
  }
}

TEST_CASE("receiver ensembles carry the delivered messages") {
  const ReceiverEnsembles re = receiver_ensembles(scripts::swap_exchange());
  REQUIRE(re.alice.members.size() == 2);
  REQUIRE(re.bob.members.size() == 2);
  // Perfect delivery of a uniform bit: one bit of Holevo information each way.
  CHECK(holevo_chi(re.alice) == Catch::Approx(1.0).margin(1e-12));
  CHECK(holevo_chi(re.bob) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("reversal restores the ancilla and both inputs") {
  for (const ProtocolScript& s :
       {scripts::cnot_assisted(), scripts::swap_assisted()}) {
    const ProtocolScript rev = reverse_protocol(s);
    CHECK(rev.gate_uses == 2 * s.gate_uses);
    CHECK(rev.alice_bits == s.alice_bits);
    CHECK(rev.bob_bits == s.bob_bits);
    for (Eigen::Index x = 0; x < (Eigen::Index{1} << s.alice_bits); ++x) {
      for (Eigen::Index y = 0; y < (Eigen::Index{1} << s.bob_bits); ++y) {
        CHECK(round_trip_fidelity(s, rev, x, y) >= 1.0 - 1e-9);
      }
    }
  }
}

TEST_CASE("reversal requires a symmetric gate") {
  ProtocolScript s = scripts::cnot_forward();
  // Dress the gate so it is no longer equal to its transpose; compensate
  // nothing, the script only needs to be structurally valid.
  Eigen::Matrix4cd m = s.gate.matrix;
  Eigen::Matrix4cd rot = Eigen::Matrix4cd::Identity();
  rot.block<2, 2>(0, 0) << Complex(std::cos(0.3), 0.0),
      Complex(-std::sin(0.3), 0.0), Complex(std::sin(0.3), 0.0),
      Complex(std::cos(0.3), 0.0);
  s.gate = Gate(rot * m);
  REQUIRE((s.gate.matrix - s.gate.matrix.transpose()).cwiseAbs().maxCoeff() >
          1e-6);
  CHECK_THROWS_AS(reverse_protocol(s), std::invalid_argument);
}

TEST_CASE("canonical-gate rewrite preserves the run") {
  const ProtocolScript s = scripts::cnot_assisted();
  const CanonicalForm form = decompose(s.gate);
  const ProtocolScript canon = canonicalize_script(s, form);
  CHECK((canon.gate.matrix - make_ud(form.alphas).matrix).norm() < 1e-12);
  CHECK(message_fidelity(canon).eps < 1e-9);
  CHECK(eta_entanglement(canon) ==
        Catch::Approx(eta_entanglement(s)).margin(1e-9));
}

TEST_CASE("rate-boost error threshold") {
  // Frozen by tests/oracles/frozen_constants.py: min((1/64)^2, (1/16)^4,
  // (1/2e)^2) = (1/16)^4.
  CHECK(epsilon_threshold(2.0, 2.0, 1.0, 1.0) ==
        Catch::Approx(1.52587890625e-05).margin(1e-18));
  // The absolute cap applies when the rate gaps vanish... negative gaps are
  // rejected instead.
  CHECK_THROWS_AS(epsilon_threshold(1.0, 1.0, 2.0, 2.0),
                  std::invalid_argument);
  // Zero gap gives a zero threshold.
  CHECK(epsilon_threshold(1.0, 1.0, 1.0, 1.0) == 0.0);
}

TEST_CASE("ancilla growth bound") {
  const AncillaBound ab = ancilla_bound(2, 4.0, 1.0);
  CHECK(ab.k == Catch::Approx(6.0).margin(1e-12));
  CHECK(ab.dimension_bound == Catch::Approx(64.0).margin(1e-9));

  const AncillaBound blocks = ancilla_bound(2, 4.0, 1.0, 10.0);
  CHECK(blocks.dimension_bound ==
        Catch::Approx(std::exp2(60.0)).epsilon(1e-12));

  CHECK_THROWS_AS(ancilla_bound(-1, 4.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ancilla_bound(2, 0.5, 1.0), std::invalid_argument);
}

TEST_CASE("chained fidelity bound") {
  // Frozen by tests/oracles/frozen_constants.py.
  CHECK(chained_fidelity_bound(10.0, 1e-6) ==
        Catch::Approx(0.96).margin(1e-12));
  CHECK(chained_fidelity_bound(10.0, 1e-6, 0.01) ==
        Catch::Approx(0.95).margin(1e-12));
  CHECK_THROWS_AS(chained_fidelity_bound(-1.0, 1e-6), std::invalid_argument);
}

TEST_CASE("superposition continuity bound") {
  // Frozen by tests/oracles/frozen_constants.py: log2(e)/e.
  CHECK(entanglement_continuity_bound(0.0, 3, 5.0, 7.0) ==
        Catch::Approx(0.5307378454230430).margin(1e-15));
  CHECK(entanglement_continuity_bound(0.01, 2, 6.0, 1.0) ==
        Catch::Approx(0.1 * (8.0 + 6.0) + 0.5307378454230430).margin(1e-12));
  CHECK_THROWS_AS(entanglement_continuity_bound(-0.1, 2, 6.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("rate witness") {
  const auto pair = rate_pair_achieved(scripts::swap_exchange(), 1e-9);
  REQUIRE(pair.has_value());
  CHECK(pair->first == 1.0);
  CHECK(pair->second == 1.0);

  CHECK_FALSE(rate_pair_achieved(detuned_exchange(0.3), 1e-9).has_value());

  ProtocolScript no_gate = scripts::swap_exchange();
  no_gate.gate_uses = 0;
  no_gate.steps.pop_back();
  CHECK_THROWS_AS(rate_pair_achieved(no_gate, 1e-9), std::invalid_argument);
}

TEST_CASE("unassisted rate check") {
  // Zero overhead: any strict improvement passes.
  const auto free = unassisted_rate_check(1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 2.0,
                                          2.0);
  CHECK(free.first);
  CHECK(free.second);

  // Enormous ancilla rate: the overhead swallows the gap.
  const auto heavy = unassisted_rate_check(1.0, 1e6, 1.0, 0.0, 1.0, 1.0, 2.0,
                                           2.0);
  CHECK_FALSE(heavy.first);
  CHECK_FALSE(heavy.second);

  CHECK_THROWS_AS(unassisted_rate_check(0.5, 1.0, 1.0, 0.0, 1.0, 1.0, 2.0,
                                        2.0),
                  std::invalid_argument);
}

TEST_CASE("bound report wires its inputs through") {
  BoundsInput in;
  in.rate_forward = 1.0;
  in.rate_backward = 1.0;
  in.rate_forward_higher = 2.0;
  in.rate_backward_higher = 2.0;
  in.alice_bits = 2;
  in.bob_bits = 2;
  in.ancilla_dim = 4.0;
  in.tau = 1.0;
  in.blocks = 10.0;
  in.epsilon = 1e-6;

  const BoundsReport out = evaluate_bounds(in);
  CHECK(out.epsilon_threshold ==
        Catch::Approx(epsilon_threshold(2.0, 2.0, 1.0, 1.0)).margin(1e-18));
  CHECK(out.delta_r == 1.0);
  CHECK(out.r_max == 2.0);
  CHECK(out.k_rate == Catch::Approx(6.0).margin(1e-12));
  CHECK(out.k_n == 4.0);
  CHECK(out.dimension_bound == Catch::Approx(std::exp2(60.0)).epsilon(1e-12));
  CHECK(out.fannes_message_term ==
        Catch::Approx(8.0 * std::sqrt(1e-6)).margin(1e-15));
  CHECK(out.fannes_eta_term ==
        Catch::Approx(4.0 * std::pow(1e-6, 0.25)).margin(1e-15));
  CHECK(out.chi_lower_forward ==
        Catch::Approx(2.0 - out.fannes_message_term - out.fannes_eta_term)
            .margin(1e-15));
  CHECK(out.chained_fidelity == Catch::Approx(0.96).margin(1e-12));
  CHECK(out.q_const == Catch::Approx(0.5307378454230430).margin(1e-15));
}

}  // namespace
}  // namespace gatecap
