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

#include <optional>
#include <utility>
#include <vector>

#include "gatecap/canonical.hpp"
#include "gatecap/ensembles.hpp"
#include "gatecap/qmath.hpp"

namespace gatecap {

// One unitary applied by a single party to the listed layout positions. The
// first target is the most significant digit of the operator's row index.
struct LocalOp {
  Party party = Party::alice;
  std::vector<std::size_t> targets;
  Eigen::MatrixXcd matrix;
};

// One local round: the listed operations applied in order. Operations of the
// two parties commute; same-party operations compose in list order.
struct ProtocolStep {
  std::vector<LocalOp> ops;
};

// Two-party communication procedure: local round V0, then gate_uses rounds of
// [gate on the two gate qubits, local step]. Message registers hold Alice's
// input x and Bob's input y; perfect delivery leaves y in Alice's register
// and x in Bob's.
struct ProtocolScript {
  int alice_bits = 0;  // bits Alice sends
  int bob_bits = 0;    // bits Bob sends
  int gate_uses = 0;
  Gate gate = gates::identity();
  SubsystemLayout layout;
  // State of all non-message subsystems, in layout order.
  Eigen::VectorXcd ancilla_amplitudes;
  std::vector<ProtocolStep> steps;  // gate_uses + 1 local rounds
};

namespace detail {

inline std::size_t single_position(const SubsystemLayout& layout, Party p,
                                   Role r, const char* what) {
  const auto v = layout.indices(p, r);
  if (v.size() != 1) {
    throw std::invalid_argument(std::string(what) +
                                ": expected exactly one such subsystem");
  }
  return v.front();
}

inline std::vector<std::size_t> non_message_positions(
    const SubsystemLayout& layout) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < layout.size(); ++k) {
    if (layout[k].role != Role::message) out.push_back(k);
  }
  return out;
}

}  // namespace detail

inline void validate(const ProtocolScript& s) {
  if (s.alice_bits < 0 || s.bob_bits < 0) {
    throw std::invalid_argument("ProtocolScript: negative message size");
  }
  if (s.gate_uses < 0) {
    throw std::invalid_argument("ProtocolScript: negative gate count");
  }
  if (s.steps.size() != static_cast<std::size_t>(s.gate_uses) + 1) {
    throw std::invalid_argument(
        "ProtocolScript: need one local round more than gate uses");
  }
  const Eigen::Index message_dim =
      Eigen::Index{1} << std::max(s.alice_bits, s.bob_bits);
  for (Party p : {Party::alice, Party::bob}) {
    const std::size_t msg = detail::single_position(
        s.layout, p, Role::message, "ProtocolScript message register");
    if (s.layout[msg].dim != message_dim) {
      throw std::invalid_argument(
          "ProtocolScript: message registers must have dimension "
          "2^max(alice_bits, bob_bits)");
    }
    const std::size_t gq = detail::single_position(
        s.layout, p, Role::gate_qubit, "ProtocolScript gate qubit");
    if (s.layout[gq].dim != 2) {
      throw std::invalid_argument("ProtocolScript: gate qubits must be qubits");
    }
  }
  const auto anc_pos = detail::non_message_positions(s.layout);
  Eigen::Index anc_dim = 1;
  for (std::size_t p : anc_pos) anc_dim *= s.layout[p].dim;
  if (s.ancilla_amplitudes.size() != anc_dim) {
    throw std::invalid_argument(
        "ProtocolScript: ancilla state does not match the non-message "
        "subsystems");
  }
  if (std::abs(s.ancilla_amplitudes.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("ProtocolScript: ancilla state not normalized");
  }
  for (const auto& step : s.steps) {
    for (const auto& op : step.ops) {
      if (op.targets.empty()) {
        throw std::invalid_argument("ProtocolScript: operation with no targets");
      }
      Eigen::Index dim = 1;
      std::vector<bool> seen(s.layout.size(), false);
      for (std::size_t t : op.targets) {
        if (t >= s.layout.size()) {
          throw std::invalid_argument("ProtocolScript: target out of range");
        }
        if (seen[t]) {
          throw std::invalid_argument("ProtocolScript: duplicate target");
        }
        seen[t] = true;
        if (s.layout[t].party != op.party) {
          throw std::invalid_argument(
              "ProtocolScript: operation crosses the party boundary");
        }
        dim *= s.layout[t].dim;
      }
      if (op.matrix.rows() != dim || op.matrix.cols() != dim) {
        throw std::invalid_argument(
            "ProtocolScript: operation shape does not match its targets");
      }
      const double err =
          (op.matrix.adjoint() * op.matrix -
           Eigen::MatrixXcd::Identity(dim, dim))
              .cwiseAbs()
              .maxCoeff();
      if (err > tol::unitary) {
        throw std::invalid_argument("ProtocolScript: operation is not unitary");
      }
    }
  }
}

namespace detail {

inline PartitionedState apply_step(const PartitionedState& psi,
                                   const ProtocolStep& step) {
  PartitionedState out = psi;
  for (const auto& op : step.ops) {
    out = apply_operator(out, op.matrix, op.targets);
  }
  return out;
}

}  // namespace detail

// Exact state-vector evolution of the script on messages (x, y).
inline PartitionedState run(const ProtocolScript& s, Eigen::Index x,
                            Eigen::Index y) {
  validate(s);
  if (x < 0 || x >= (Eigen::Index{1} << s.alice_bits)) {
    throw std::invalid_argument("run: Alice's message out of range");
  }
  if (y < 0 || y >= (Eigen::Index{1} << s.bob_bits)) {
    throw std::invalid_argument("run: Bob's message out of range");
  }
  const std::size_t a1 = detail::single_position(s.layout, Party::alice,
                                                 Role::message, "run");
  const std::size_t b1 =
      detail::single_position(s.layout, Party::bob, Role::message, "run");
  const auto anc_pos = detail::non_message_positions(s.layout);
  const auto anc_off = detail::subset_offsets(s.layout, anc_pos);

  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(s.layout.total_dim());
  const Eigen::Index base = x * s.layout.stride(a1) + y * s.layout.stride(b1);
  for (std::size_t i = 0; i < anc_off.size(); ++i) {
    amps(base + anc_off[i]) = s.ancilla_amplitudes(static_cast<Eigen::Index>(i));
  }

  PartitionedState state(std::move(amps), s.layout);
  state = detail::apply_step(state, s.steps[0]);
  const std::vector<std::size_t> gate_targets{
      detail::single_position(s.layout, Party::alice, Role::gate_qubit, "run"),
      detail::single_position(s.layout, Party::bob, Role::gate_qubit, "run")};
  for (int k = 1; k <= s.gate_uses; ++k) {
    state = apply_operator(state, s.gate.matrix, gate_targets);
    state = detail::apply_step(state, s.steps[static_cast<std::size_t>(k)]);
  }
  return state;
}

struct RunResult {
  Eigen::Index alice_messages = 0;  // 2^alice_bits
  Eigen::Index bob_messages = 0;    // 2^bob_bits
  std::vector<PartitionedState> final_states;  // index x * bob_messages + y
  Eigen::MatrixXd eps_xy;
  double eps = 0.0;
  Eigen::Index worst_x = 0, worst_y = 0;

  const PartitionedState& final_state(Eigen::Index x, Eigen::Index y) const {
    return final_states.at(
        static_cast<std::size_t>(x * bob_messages + y));
  }
};

// Runs every message pair and scores delivery: the fidelity of the message
// registers' reduced state against y in Alice's register and x in Bob's.
inline RunResult message_fidelity(const ProtocolScript& s) {
  RunResult out;
  out.alice_messages = Eigen::Index{1} << s.alice_bits;
  out.bob_messages = Eigen::Index{1} << s.bob_bits;
  out.eps_xy.resize(out.alice_messages, out.bob_messages);

  const std::size_t a1 = detail::single_position(s.layout, Party::alice,
                                                 Role::message, "fidelity");
  const std::size_t b1 = detail::single_position(s.layout, Party::bob,
                                                 Role::message, "fidelity");
  const auto anc_pos = detail::non_message_positions(s.layout);
  const auto anc_off = detail::subset_offsets(s.layout, anc_pos);

  for (Eigen::Index x = 0; x < out.alice_messages; ++x) {
    for (Eigen::Index y = 0; y < out.bob_messages; ++y) {
      PartitionedState final_state = run(s, x, y);
      const Eigen::Index target =
          y * s.layout.stride(a1) + x * s.layout.stride(b1);
      double overlap = 0.0;
      for (const Eigen::Index off : anc_off) {
        overlap += std::norm(final_state.amplitudes(target + off));
      }
      const double e = std::min(1.0, std::max(0.0, 1.0 - overlap));
      out.eps_xy(x, y) = e;
      if (e > out.eps) {
        out.eps = e;
        out.worst_x = x;
        out.worst_y = y;
      }
      out.final_states.push_back(std::move(final_state));
    }
  }
  return out;
}

struct ReceiverEnsembles {
  Ensemble alice;  // indexed by Bob's message y
  Ensemble bob;    // indexed by Alice's message x
};

// Each receiver's message-register state, averaged uniformly over the other
// party's message, with their own register traced out along with everything
// else.
inline ReceiverEnsembles receiver_ensembles(const ProtocolScript& s) {
  const RunResult r = message_fidelity(s);
  const std::size_t a1 = detail::single_position(s.layout, Party::alice,
                                                 Role::message, "receiver");
  const std::size_t b1 = detail::single_position(s.layout, Party::bob,
                                                 Role::message, "receiver");
  ReceiverEnsembles out;
  for (Eigen::Index y = 0; y < r.bob_messages; ++y) {
    Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(s.layout[a1].dim,
                                                  s.layout[a1].dim);
    for (Eigen::Index x = 0; x < r.alice_messages; ++x) {
      avg += partial_trace(r.final_state(x, y), {a1}).matrix;
    }
    avg /= static_cast<double>(r.alice_messages);
    out.alice.members.push_back(EnsembleMember{
        1.0 / static_cast<double>(r.bob_messages),
        DensityOperator(std::move(avg), s.layout.select({a1}))});
  }
  for (Eigen::Index x = 0; x < r.alice_messages; ++x) {
    Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(s.layout[b1].dim,
                                                  s.layout[b1].dim);
    for (Eigen::Index y = 0; y < r.bob_messages; ++y) {
      avg += partial_trace(r.final_state(x, y), {b1}).matrix;
    }
    avg /= static_cast<double>(r.bob_messages);
    out.bob.members.push_back(EnsembleMember{
        1.0 / static_cast<double>(r.alice_messages),
        DensityOperator(std::move(avg), s.layout.select({b1}))});
  }
  return out;
}

struct UhlmannSplit {
  // Normalized non-message component compatible with perfect delivery, with
  // the phase chosen so the overlap with the input state is real nonnegative.
  PartitionedState ideal_ancilla;
  double eps = 0.0;
  // Normalized orthogonal remainder on the full layout; absent when eps is
  // numerically zero.
  std::optional<PartitionedState> error_state;
};

// Split a protocol output as
//   sqrt(1 - eps) |y>|x>|ideal_ancilla> + sqrt(eps) |error_state>,
// reconstructing the input exactly.
inline UhlmannSplit uhlmann_split(const PartitionedState& final_state,
                                  Eigen::Index x, Eigen::Index y) {
  const SubsystemLayout& layout = final_state.layout;
  const std::size_t a1 = detail::single_position(layout, Party::alice,
                                                 Role::message, "uhlmann_split");
  const std::size_t b1 = detail::single_position(layout, Party::bob,
                                                 Role::message, "uhlmann_split");
  if (y < 0 || y >= layout[a1].dim || x < 0 || x >= layout[b1].dim) {
    throw std::invalid_argument("uhlmann_split: message out of range");
  }
  const auto anc_pos = detail::non_message_positions(layout);
  const auto anc_off = detail::subset_offsets(layout, anc_pos);
  const Eigen::Index base = y * layout.stride(a1) + x * layout.stride(b1);

  Eigen::VectorXcd projected(static_cast<Eigen::Index>(anc_off.size()));
  for (std::size_t i = 0; i < anc_off.size(); ++i) {
    projected(static_cast<Eigen::Index>(i)) =
        final_state.amplitudes(base + anc_off[i]);
  }
  const double weight = projected.norm();
  if (weight <= 1e-12) {
    throw std::domain_error(
        "uhlmann_split: no overlap with the delivered-message subspace");
  }
  UhlmannSplit out{
      PartitionedState(projected / weight, layout.select(anc_pos)),
      std::min(1.0, std::max(0.0, 1.0 - weight * weight)),
      std::nullopt};

  if (out.eps > 1e-14) {
    Eigen::VectorXcd rest = final_state.amplitudes;
    for (std::size_t i = 0; i < anc_off.size(); ++i) {
      rest(base + anc_off[i]) -=
          weight * (projected(static_cast<Eigen::Index>(i)) / weight);
    }
    out.error_state.emplace(PartitionedState::normalized(rest, layout));
  }
  return out;
}

namespace detail {

inline SubsystemLayout with_copy_registers(const SubsystemLayout& layout,
                                           int alice_bits, int bob_bits) {
  std::vector<Subsystem> subs;
  for (std::size_t k = 0; k < layout.size(); ++k) subs.push_back(layout[k]);
  subs.push_back(Subsystem{Eigen::Index{1} << alice_bits, Party::alice,
                           Role::copy_register});
  subs.push_back(Subsystem{Eigen::Index{1} << bob_bits, Party::bob,
                           Role::copy_register});
  return SubsystemLayout(std::move(subs));
}

}  // namespace detail

// Coherent superposition of all message pairs, with copies of each party's
// own message kept in appended registers:
//   2^{-(n_a+n_b)/2} sum_{x,y} (final state for x, y) (x) |x>|y>.
inline PartitionedState superposition_state(const ProtocolScript& s) {
  const RunResult r = message_fidelity(s);
  const SubsystemLayout ext =
      detail::with_copy_registers(s.layout, s.alice_bits, s.bob_bits);
  const Eigen::Index copies = r.alice_messages * r.bob_messages;
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(ext.total_dim());
  const double scale = 1.0 / std::sqrt(static_cast<double>(copies));
  for (Eigen::Index x = 0; x < r.alice_messages; ++x) {
    for (Eigen::Index y = 0; y < r.bob_messages; ++y) {
      const auto& fin = r.final_state(x, y).amplitudes;
      const Eigen::Index tag = x * r.bob_messages + y;
      for (Eigen::Index i = 0; i < fin.size(); ++i) {
        amps(i * copies + tag) = scale * fin(i);
      }
    }
  }
  return PartitionedState(std::move(amps), ext);
}

// The same superposition built from the ideal branches of the Uhlmann splits:
// message registers carry exactly (y, x) and the non-message part is the
// renormalized ideal_ancilla.
inline PartitionedState ideal_superposition_state(const ProtocolScript& s) {
  const RunResult r = message_fidelity(s);
  const SubsystemLayout ext =
      detail::with_copy_registers(s.layout, s.alice_bits, s.bob_bits);
  const std::size_t a1 = detail::single_position(s.layout, Party::alice,
                                                 Role::message, "superposition");
  const std::size_t b1 = detail::single_position(s.layout, Party::bob,
                                                 Role::message, "superposition");
  const auto anc_pos = detail::non_message_positions(s.layout);
  const auto anc_off = detail::subset_offsets(s.layout, anc_pos);
  const Eigen::Index copies = r.alice_messages * r.bob_messages;
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(ext.total_dim());
  const double scale = 1.0 / std::sqrt(static_cast<double>(copies));
  for (Eigen::Index x = 0; x < r.alice_messages; ++x) {
    for (Eigen::Index y = 0; y < r.bob_messages; ++y) {
      const UhlmannSplit split = uhlmann_split(r.final_state(x, y), x, y);
      const Eigen::Index base =
          y * s.layout.stride(a1) + x * s.layout.stride(b1);
      const Eigen::Index tag = x * r.bob_messages + y;
      for (std::size_t i = 0; i < anc_off.size(); ++i) {
        amps((base + anc_off[i]) * copies + tag) =
            scale *
            split.ideal_ancilla.amplitudes(static_cast<Eigen::Index>(i));
      }
    }
  }
  return PartitionedState(std::move(amps), ext);
}

// Entanglement of the ideal superposition in closed form:
//   n_a + n_b + 2^{-(n_a+n_b)} sum_{x,y} E(ideal_ancilla_xy).
// At eps = 0 this equals the entanglement entropy of superposition_state.
inline double eta_entanglement(const ProtocolScript& s) {
  const RunResult r = message_fidelity(s);
  double branch_sum = 0.0;
  for (Eigen::Index x = 0; x < r.alice_messages; ++x) {
    for (Eigen::Index y = 0; y < r.bob_messages; ++y) {
      branch_sum += entanglement_entropy(
          uhlmann_split(r.final_state(x, y), x, y).ideal_ancilla);
    }
  }
  const double pairs =
      static_cast<double>(r.alice_messages * r.bob_messages);
  return s.alice_bits + s.bob_bits + branch_sum / pairs;
}

namespace detail {

// Permutation adding the source register's value onto the destination
// register modulo its dimension; acts as a copy when the destination is 0.
inline LocalOp copy_op(const SubsystemLayout& layout, std::size_t src,
                       std::size_t dst, Party party) {
  const Eigen::Index ds = layout[src].dim;
  const Eigen::Index dd = layout[dst].dim;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(ds * dd, ds * dd);
  for (Eigen::Index v = 0; v < ds; ++v) {
    for (Eigen::Index c = 0; c < dd; ++c) {
      m(v * dd + (c + v) % dd, v * dd + c) = 1.0;
    }
  }
  return LocalOp{party, {src, dst}, std::move(m)};
}

inline std::vector<LocalOp> transposed_reversed(
    const std::vector<LocalOp>& ops) {
  std::vector<LocalOp> out;
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    out.push_back(LocalOp{it->party, it->targets, it->matrix.transpose()});
  }
  return out;
}

// Basis-change unitary sending each column of basis to its complex conjugate.
inline Eigen::MatrixXcd conjugation_in_basis(const Eigen::MatrixXcd& basis) {
  return basis.conjugate() * basis.adjoint();
}

}  // namespace detail

// Unassisted round trip: forward script, message copies, conditional
// conjugation of the ideal ancilla branches, then the transposed local
// rounds in reverse order with the same (symmetric) gate, and a final
// rotation returning the conjugated ancilla to its initial state. Uses 2t
// gate applications. At eps = 0 the final state holds x in Alice's message
// register and its appended copy, y in Bob's, the received y and x in the
// two last copy registers, and the ancilla restored exactly.
inline ProtocolScript reverse_protocol(const ProtocolScript& s) {
  validate(s);
  const double symmetry_err =
      (s.gate.matrix - s.gate.matrix.transpose()).cwiseAbs().maxCoeff();
  if (symmetry_err > 1e-10) {
    throw std::invalid_argument(
        "reverse_protocol: requires a symmetric gate so that running it on "
        "the conjugated state inverts it");
  }

  const std::size_t a1 = detail::single_position(s.layout, Party::alice,
                                                 Role::message, "reverse");
  const std::size_t b1 =
      detail::single_position(s.layout, Party::bob, Role::message, "reverse");
  const auto anc_pos = detail::non_message_positions(s.layout);

  // Original layout plus input copies (A3, B3) and output copies (A4, B4).
  std::vector<Subsystem> subs;
  for (std::size_t k = 0; k < s.layout.size(); ++k) subs.push_back(s.layout[k]);
  const std::size_t a3 = subs.size();
  subs.push_back(Subsystem{Eigen::Index{1} << s.alice_bits, Party::alice,
                           Role::copy_register});
  const std::size_t b3 = subs.size();
  subs.push_back(Subsystem{Eigen::Index{1} << s.bob_bits, Party::bob,
                           Role::copy_register});
  const std::size_t a4 = subs.size();
  subs.push_back(Subsystem{Eigen::Index{1} << s.bob_bits, Party::alice,
                           Role::copy_register});
  const std::size_t b4 = subs.size();
  subs.push_back(Subsystem{Eigen::Index{1} << s.alice_bits, Party::bob,
                           Role::copy_register});
  SubsystemLayout ext(std::move(subs));

  ProtocolScript out;
  out.alice_bits = s.alice_bits;
  out.bob_bits = s.bob_bits;
  out.gate_uses = 2 * s.gate_uses;
  out.gate = s.gate;
  out.layout = ext;

  // Copy registers start at |0>, appended behind the original ancilla.
  const Eigen::Index copy_dim =
      (Eigen::Index{1} << (2 * s.alice_bits)) *
      (Eigen::Index{1} << (2 * s.bob_bits));
  out.ancilla_amplitudes =
      Eigen::VectorXcd::Zero(s.ancilla_amplitudes.size() * copy_dim);
  for (Eigen::Index i = 0; i < s.ancilla_amplitudes.size(); ++i) {
    out.ancilla_amplitudes(i * copy_dim) = s.ancilla_amplitudes(i);
  }

  // Conditional conjugation of the ideal ancilla branch for every message
  // pair, controlled on each party's message register and input copy.
  const RunResult forward = message_fidelity(s);
  const auto alice_tail = [&] {
    std::vector<std::size_t> v;
    for (std::size_t p : anc_pos) {
      if (s.layout[p].party == Party::alice) v.push_back(p);
    }
    return v;
  }();
  const auto bob_tail = [&] {
    std::vector<std::size_t> v;
    for (std::size_t p : anc_pos) {
      if (s.layout[p].party == Party::bob) v.push_back(p);
    }
    return v;
  }();
  Eigen::Index alice_tail_dim = 1, bob_tail_dim = 1;
  for (std::size_t p : alice_tail) alice_tail_dim *= s.layout[p].dim;
  for (std::size_t p : bob_tail) bob_tail_dim *= s.layout[p].dim;

  const Eigen::Index msg_dim = s.layout[a1].dim;
  const Eigen::Index xs = Eigen::Index{1} << s.alice_bits;
  const Eigen::Index ys = Eigen::Index{1} << s.bob_bits;

  Eigen::MatrixXcd alice_cond = Eigen::MatrixXcd::Identity(
      msg_dim * xs * alice_tail_dim, msg_dim * xs * alice_tail_dim);
  Eigen::MatrixXcd bob_cond = Eigen::MatrixXcd::Identity(
      msg_dim * ys * bob_tail_dim, msg_dim * ys * bob_tail_dim);
  for (Eigen::Index x = 0; x < xs; ++x) {
    for (Eigen::Index y = 0; y < ys; ++y) {
      const UhlmannSplit split = uhlmann_split(forward.final_state(x, y), x, y);
      const SchmidtDecomposition schmidt =
          schmidt_decompose(split.ideal_ancilla);
      const Eigen::Index a_block = (y * xs + x) * alice_tail_dim;
      alice_cond.block(a_block, a_block, alice_tail_dim, alice_tail_dim) =
          detail::conjugation_in_basis(schmidt.alice_basis);
      const Eigen::Index b_block = (x * ys + y) * bob_tail_dim;
      bob_cond.block(b_block, b_block, bob_tail_dim, bob_tail_dim) =
          detail::conjugation_in_basis(schmidt.bob_basis);
    }
  }
  std::vector<std::size_t> alice_cond_targets{a1, a3};
  alice_cond_targets.insert(alice_cond_targets.end(), alice_tail.begin(),
                            alice_tail.end());
  std::vector<std::size_t> bob_cond_targets{b1, b3};
  bob_cond_targets.insert(bob_cond_targets.end(), bob_tail.begin(),
                          bob_tail.end());

  // Final rotation taking the conjugated initial ancilla back to itself.
  const PartitionedState initial_anc(s.ancilla_amplitudes,
                                     s.layout.select(anc_pos));
  const SchmidtDecomposition anc_schmidt = schmidt_decompose(initial_anc);
  const auto unconjugate = [](const Eigen::MatrixXcd& basis) {
    return Eigen::MatrixXcd(basis * basis.transpose());
  };

  const int t = s.gate_uses;
  std::vector<ProtocolStep> steps(static_cast<std::size_t>(2 * t) + 1);
  const auto append = [&steps](int k, std::vector<LocalOp> ops) {
    auto& dst = steps[static_cast<std::size_t>(k)].ops;
    for (auto& op : ops) dst.push_back(std::move(op));
  };

  append(0, {detail::copy_op(ext, a1, a3, Party::alice),
             detail::copy_op(ext, b1, b3, Party::bob)});
  for (int k = 0; k <= t; ++k) {
    append(k, s.steps[static_cast<std::size_t>(k)].ops);
  }
  append(t, {detail::copy_op(ext, a1, a4, Party::alice),
             detail::copy_op(ext, b1, b4, Party::bob),
             LocalOp{Party::alice, alice_cond_targets, alice_cond},
             LocalOp{Party::bob, bob_cond_targets, bob_cond}});
  for (int k = t; k >= 0; --k) {
    append(2 * t - k,
           detail::transposed_reversed(s.steps[static_cast<std::size_t>(k)].ops));
  }
  append(2 * t,
         {LocalOp{Party::alice, alice_tail,
                  unconjugate(anc_schmidt.alice_basis)},
          LocalOp{Party::bob, bob_tail, unconjugate(anc_schmidt.bob_basis)}});

  out.steps = std::move(steps);
  validate(out);
  return out;
}

// Rewrites a script so it runs on the canonical gate: every use of the
// original gate becomes (post locals) canonical gate (pre locals), with the
// decomposition's global phase folded into one of Alice's operations.
inline ProtocolScript canonicalize_script(const ProtocolScript& s,
                                          const CanonicalForm& form) {
  validate(s);
  const std::size_t agq = detail::single_position(s.layout, Party::alice,
                                                  Role::gate_qubit, "canonical");
  const std::size_t bgq = detail::single_position(s.layout, Party::bob,
                                                  Role::gate_qubit, "canonical");
  ProtocolScript out = s;
  out.gate = make_ud(form.alphas);
  const Eigen::Matrix2cd post_alice = form.phase * form.post_alice;
  for (int k = 0; k <= s.gate_uses; ++k) {
    auto& ops = out.steps[static_cast<std::size_t>(k)].ops;
    if (k > 0) {
      ops.insert(ops.begin(),
                 {LocalOp{Party::alice, {agq}, post_alice},
                  LocalOp{Party::bob, {bgq}, form.post_bob}});
    }
    if (k < s.gate_uses) {
      ops.push_back(LocalOp{Party::alice, {agq}, form.pre_alice});
      ops.push_back(LocalOp{Party::bob, {bgq}, form.pre_bob});
    }
  }
  validate(out);
  return out;
}

// ---------------------------------------------------------------------------
// Closed-form bounds.

// Error level sufficient for boosting the rate pair to the nearby higher one:
// min{ (dR/32R_max)^2, (dR/16)^4, (1/2e)^2 } with dR the smaller of the two
// rate gaps and R_max = max{higher rates, 1}.
inline double epsilon_threshold(double rate_forward_higher,
                                double rate_backward_higher,
                                double rate_forward, double rate_backward) {
  const double d_forward = rate_forward_higher - rate_forward;
  const double d_backward = rate_backward_higher - rate_backward;
  if (d_forward < 0.0 || d_backward < 0.0) {
    throw std::invalid_argument(
        "epsilon_threshold: the primed rates must not be smaller");
  }
  const double delta_r = std::min(d_forward, d_backward);
  const double r_max =
      std::max({rate_forward_higher, rate_backward_higher, 1.0});
  const double a = delta_r / (32.0 * r_max);
  const double b = delta_r / 16.0;
  const double c = 1.0 / (2.0 * std::exp(1.0));
  return std::min({a * a, b * b * b * b, c * c});
}

struct AncillaBound {
  double k = 0.0;                // ancilla qubits per gate use
  double dimension_bound = 0.0;  // 2^(k M tau)
};

// K = (2n + log2 d) / tau; the ancilla for M blocks of tau gate uses fits in
// dimension 2^(K M tau).
inline AncillaBound ancilla_bound(int n, double ancilla_dim, double tau,
                                  double blocks = 1.0) {
  if (n < 0 || ancilla_dim < 1.0 || tau < 1.0 || blocks < 1.0) {
    throw std::invalid_argument("ancilla_bound: out-of-range parameter");
  }
  AncillaBound out;
  out.k = (2.0 * n + std::log2(ancilla_dim)) / tau;
  out.dimension_bound = std::exp2(out.k * blocks * tau);
  return out;
}

// Fidelity of M chained communicate-and-restore rounds, including an
// imperfect initial resource state: 1 - eps_psi - 4 M sqrt(eps).
inline double chained_fidelity_bound(double blocks, double eps,
                                     double eps_psi = 0.0) {
  if (blocks < 0.0 || eps < 0.0 || eps_psi < 0.0) {
    throw std::invalid_argument("chained_fidelity_bound: negative parameter");
  }
  return 1.0 - eps_psi - 4.0 * blocks * std::sqrt(eps);
}

// Whether halved rates survive the overhead of building the resource state:
//   R' - R >= R K / (4 M E0) + C R sqrt(K) / (2 M), per direction.
inline std::pair<bool, bool> unassisted_rate_check(
    double blocks, double k, double e0, double concentration_constant,
    double rate_forward, double rate_backward, double rate_forward_higher,
    double rate_backward_higher) {
  if (blocks < 1.0 || e0 <= 0.0 || k < 0.0 || concentration_constant < 0.0) {
    throw std::invalid_argument("unassisted_rate_check: out-of-range parameter");
  }
  const auto ok = [&](double rate, double higher) {
    const double need = rate * k / (4.0 * blocks * e0) +
                        concentration_constant * rate * std::sqrt(k) /
                            (2.0 * blocks);
    return higher - rate >= need;
  };
  return {ok(rate_forward, rate_forward_higher),
          ok(rate_backward, rate_backward_higher)};
}

// Entanglement perturbation of the message superposition at error eps:
// sqrt(eps) (4n + K t) + log2(e)/e.
inline double entanglement_continuity_bound(double eps, int n, double k,
                                            double t) {
  if (eps < 0.0 || n < 0 || k < 0.0 || t < 0.0) {
    throw std::invalid_argument(
        "entanglement_continuity_bound: negative parameter");
  }
  const double q = std::log2(std::exp(1.0)) / std::exp(1.0);
  return std::sqrt(eps) * (4.0 * n + k * t) + q;
}

// Finite-t rate witness: the script's rates when it meets the fidelity
// target, nothing otherwise.
inline std::optional<std::pair<double, double>> rate_pair_achieved(
    const ProtocolScript& s, double epsilon_target) {
  if (s.gate_uses < 1) {
    throw std::invalid_argument("rate_pair_achieved: script never uses the gate");
  }
  if (message_fidelity(s).eps > epsilon_target) {
    return std::nullopt;
  }
  const double t = static_cast<double>(s.gate_uses);
  return std::make_pair(s.alice_bits / t, s.bob_bits / t);
}

struct BoundsInput {
  double rate_forward = 0.0;
  double rate_backward = 0.0;
  double rate_forward_higher = 0.0;
  double rate_backward_higher = 0.0;
  int alice_bits = 0;
  int bob_bits = 0;
  double ancilla_dim = 1.0;
  double tau = 1.0;
  double blocks = 1.0;
  double epsilon = 0.0;
  double e0 = 1.0;
  double concentration_constant = 0.0;
  double eps_psi = 0.0;
};

struct BoundsReport {
  double epsilon = 0.0;
  double epsilon_threshold = 0.0;
  double delta_r = 0.0;
  double r_max = 0.0;
  double k_rate = 0.0;
  double k_n = 0.0;
  double dimension_bound = 0.0;
  double fannes_message_term = 0.0;  // 4 n sqrt(eps)
  double fannes_eta_term = 0.0;      // 4 eps^(1/4)
  double chi_lower_forward = 0.0;    // n_a - Fannes terms
  double chi_lower_backward = 0.0;   // n_b - Fannes terms
  double q_const = 0.0;
  double continuity_bound = 0.0;
  double chained_fidelity = 0.0;
  bool rate_check_forward = false;
  bool rate_check_backward = false;
};

inline BoundsReport evaluate_bounds(const BoundsInput& in) {
  BoundsReport out;
  out.epsilon = in.epsilon;
  out.epsilon_threshold =
      epsilon_threshold(in.rate_forward_higher, in.rate_backward_higher,
                        in.rate_forward, in.rate_backward);
  out.delta_r = std::min(in.rate_forward_higher - in.rate_forward,
                         in.rate_backward_higher - in.rate_backward);
  out.r_max = std::max({in.rate_forward_higher, in.rate_backward_higher, 1.0});
  const int n = std::max(in.alice_bits, in.bob_bits);
  const AncillaBound ab = ancilla_bound(n, in.ancilla_dim, in.tau, in.blocks);
  out.k_rate = ab.k;
  out.dimension_bound = ab.dimension_bound;
  out.k_n = 2.0 * out.r_max;
  out.fannes_message_term = 4.0 * n * std::sqrt(in.epsilon);
  out.fannes_eta_term = 4.0 * std::pow(in.epsilon, 0.25);
  out.chi_lower_forward =
      in.alice_bits - out.fannes_message_term - out.fannes_eta_term;
  out.chi_lower_backward =
      in.bob_bits - out.fannes_message_term - out.fannes_eta_term;
  out.q_const = std::log2(std::exp(1.0)) / std::exp(1.0);
  out.continuity_bound = entanglement_continuity_bound(
      in.epsilon, n, ab.k, in.blocks * in.tau);
  out.chained_fidelity =
      chained_fidelity_bound(in.blocks, in.epsilon, in.eps_psi);
  const auto checks = unassisted_rate_check(
      in.blocks, ab.k, in.e0, in.concentration_constant, in.rate_forward,
      in.rate_backward, in.rate_forward_higher, in.rate_backward_higher);
  out.rate_check_forward = checks.first;
  out.rate_check_backward = checks.second;
  return out;
}

}  // namespace gatecap
