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

#include "gatecap/protocol.hpp"

namespace gatecap::scripts {

namespace detail {

inline Eigen::MatrixXcd swap_matrix() {
  Eigen::Matrix4cd m;
  m << 1, 0, 0, 0,
       0, 0, 1, 0,
       0, 1, 0, 0,
       0, 0, 0, 1;
  return m;
}

inline Eigen::MatrixXcd cnot_matrix() {
  Eigen::Matrix4cd m;
  m << 1, 0, 0, 0,
       0, 1, 0, 0,
       0, 0, 0, 1,
       0, 0, 1, 0;
  return m;
}

inline Eigen::MatrixXcd cz_matrix() {
  Eigen::Vector4cd d;
  d << 1, 1, 1, -1;
  return d.asDiagonal();
}

inline Eigen::MatrixXcd hadamard_matrix() {
  Eigen::Matrix2cd m;
  const double s = 1.0 / std::sqrt(2.0);
  m << s, s, s, -s;
  return m;
}

// |0>|0> + |1>|1>, normalized, over two listed qubits.
inline Eigen::VectorXcd bell_pair() {
  Eigen::Vector4cd v;
  const double s = 1.0 / std::sqrt(2.0);
  v << s, 0, 0, s;
  return v;
}

// Two-bit messages ride on one half of a shared pair as I, X, Z, XZ.
inline Eigen::MatrixXcd dense_code_op(Eigen::Index i) {
  switch (i) {
    case 0: return pauli(0);
    case 1: return pauli(1);
    case 2: return pauli(3);
    default: return Eigen::MatrixXcd(pauli(1) * pauli(3));
  }
}

// Controlled encoder: the 4-dimensional control register picks which code
// operation acts on the qubit.
inline Eigen::MatrixXcd dense_code_encoder() {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(8, 8);
  for (Eigen::Index i = 0; i < 4; ++i) {
    m.block(2 * i, 2 * i, 2, 2) = dense_code_op(i);
  }
  return m;
}

// Rotates the four encoded pair states onto the computational basis.
inline Eigen::MatrixXcd dense_code_decoder() {
  Eigen::MatrixXcd m(4, 4);
  for (Eigen::Index i = 0; i < 4; ++i) {
    // Row i undoes code_i (x) identity applied to the shared pair, with the
    // coded qubit as the most significant digit.
    Eigen::Vector4cd coded = Eigen::Vector4cd::Zero();
    const Eigen::MatrixXcd op = dense_code_op(i);
    const Eigen::VectorXcd pair = bell_pair();
    for (Eigen::Index a = 0; a < 2; ++a) {
      for (Eigen::Index b = 0; b < 2; ++b) {
        for (Eigen::Index c = 0; c < 2; ++c) {
          coded(a * 2 + b) += op(a, c) * pair(c * 2 + b);
        }
      }
    }
    m.row(i) = coded.adjoint();
  }
  return m;
}

// Swaps a 4-dimensional register with a pair of qubits: |m>|u>|d> ->
// |2u+d>|m_high>|m_low>.
inline Eigen::MatrixXcd register_exchange() {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(16, 16);
  for (Eigen::Index r = 0; r < 4; ++r) {
    for (Eigen::Index u = 0; u < 2; ++u) {
      for (Eigen::Index d = 0; d < 2; ++d) {
        m((2 * u + d) * 4 + r, r * 4 + u * 2 + d) = 1.0;
      }
    }
  }
  return m;
}

}  // namespace detail

// One bit from Alice to Bob with a single controlled-flip use: load the bit
// onto the gate qubit, flip Bob's, unload.
inline ProtocolScript cnot_forward() {
  ProtocolScript s;
  s.alice_bits = 1;
  s.bob_bits = 0;
  s.gate_uses = 1;
  s.gate = gates::cnot();
  s.layout = SubsystemLayout({{2, Party::alice, Role::message},
                              {2, Party::alice, Role::gate_qubit},
                              {2, Party::bob, Role::gate_qubit},
                              {2, Party::bob, Role::message}});
  s.ancilla_amplitudes = Eigen::Vector4cd(1, 0, 0, 0);
  s.steps = {
      {{LocalOp{Party::alice, {0, 1}, detail::swap_matrix()}}},
      {{LocalOp{Party::bob, {2, 3}, detail::swap_matrix()}}},
  };
  validate(s);
  return s;
}

// One bit each way with a single swap use.
inline ProtocolScript swap_exchange() {
  ProtocolScript s;
  s.alice_bits = 1;
  s.bob_bits = 1;
  s.gate_uses = 1;
  s.gate = gates::swap();
  s.layout = SubsystemLayout({{2, Party::alice, Role::message},
                              {2, Party::alice, Role::gate_qubit},
                              {2, Party::bob, Role::gate_qubit},
                              {2, Party::bob, Role::message}});
  s.ancilla_amplitudes = Eigen::Vector4cd(1, 0, 0, 0);
  s.steps = {
      {{LocalOp{Party::alice, {0, 1}, detail::swap_matrix()},
        LocalOp{Party::bob, {2, 3}, detail::swap_matrix()}}},
      {{LocalOp{Party::alice, {0, 1}, detail::swap_matrix()},
        LocalOp{Party::bob, {2, 3}, detail::swap_matrix()}}},
  };
  validate(s);
  return s;
}

// One bit each way from a single controlled-flip use plus one shared pair,
// which the run consumes.
inline ProtocolScript cnot_assisted() {
  ProtocolScript s;
  s.alice_bits = 1;
  s.bob_bits = 1;
  s.gate_uses = 1;
  s.gate = gates::cnot();
  s.layout = SubsystemLayout({{2, Party::alice, Role::message},
                              {2, Party::alice, Role::gate_qubit},
                              {2, Party::bob, Role::gate_qubit},
                              {2, Party::bob, Role::message}});
  s.ancilla_amplitudes = detail::bell_pair();
  s.steps = {
      {{LocalOp{Party::alice, {0, 1}, detail::cnot_matrix()},
        LocalOp{Party::bob, {3, 2}, detail::cz_matrix()}}},
      {{LocalOp{Party::alice, {1}, detail::hadamard_matrix()},
        LocalOp{Party::alice, {0, 1}, detail::swap_matrix()},
        LocalOp{Party::bob, {2, 3}, detail::swap_matrix()}}},
  };
  validate(s);
  return s;
}

// Two bits each way from a single swap use plus two crossed shared pairs:
// each party codes its message onto its gate qubit, the swap carries the
// coded qubits across, and each party decodes against its kept half.
inline ProtocolScript swap_assisted() {
  ProtocolScript s;
  s.alice_bits = 2;
  s.bob_bits = 2;
  s.gate_uses = 1;
  s.gate = gates::swap();
  s.layout = SubsystemLayout({{4, Party::alice, Role::message},
                              {2, Party::alice, Role::ancilla},
                              {2, Party::alice, Role::gate_qubit},
                              {2, Party::bob, Role::gate_qubit},
                              {2, Party::bob, Role::ancilla},
                              {4, Party::bob, Role::message}});
  // Pairs: Alice's gate qubit with Bob's kept qubit, Bob's gate qubit with
  // Alice's kept qubit. Non-message order is (kept_A, gate_A, gate_B, kept_B).
  Eigen::VectorXcd anc = Eigen::VectorXcd::Zero(16);
  for (Eigen::Index a = 0; a < 2; ++a) {
    for (Eigen::Index u = 0; u < 2; ++u) {
      anc(a * 8 + u * 4 + a * 2 + u) = 0.5;
    }
  }
  s.ancilla_amplitudes = std::move(anc);
  s.steps = {
      {{LocalOp{Party::alice, {0, 2}, detail::dense_code_encoder()},
        LocalOp{Party::bob, {5, 3}, detail::dense_code_encoder()}}},
      {{LocalOp{Party::alice, {2, 1}, detail::dense_code_decoder()},
        LocalOp{Party::alice, {0, 2, 1}, detail::register_exchange()},
        LocalOp{Party::bob, {3, 4}, detail::dense_code_decoder()},
        LocalOp{Party::bob, {5, 3, 4}, detail::register_exchange()}}},
  };
  validate(s);
  return s;
}

// swap_exchange with an untouched shared pair alongside: the extra unit of
// entanglement shows up in the superposition-state accounting.
inline ProtocolScript bell_spectator() {
  ProtocolScript s;
  s.alice_bits = 1;
  s.bob_bits = 1;
  s.gate_uses = 1;
  s.gate = gates::swap();
  s.layout = SubsystemLayout({{2, Party::alice, Role::message},
                              {2, Party::alice, Role::gate_qubit},
                              {2, Party::alice, Role::ancilla},
                              {2, Party::bob, Role::ancilla},
                              {2, Party::bob, Role::gate_qubit},
                              {2, Party::bob, Role::message}});
  // Non-message order is (gate_A, kept_A, kept_B, gate_B).
  Eigen::VectorXcd anc = Eigen::VectorXcd::Zero(16);
  const double v = 1.0 / std::sqrt(2.0);
  anc(0) = v;
  anc(4 + 2) = v;
  s.ancilla_amplitudes = std::move(anc);
  s.steps = {
      {{LocalOp{Party::alice, {0, 1}, detail::swap_matrix()},
        LocalOp{Party::bob, {4, 5}, detail::swap_matrix()}}},
      {{LocalOp{Party::alice, {0, 1}, detail::swap_matrix()},
        LocalOp{Party::bob, {4, 5}, detail::swap_matrix()}}},
  };
  validate(s);
  return s;
}

}  // namespace gatecap::scripts
