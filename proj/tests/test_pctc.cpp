// Copyright 2026 The ctclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numbers>

#include "gtest/gtest.h"

#include "ctclab/experiments.hpp"
#include "ctclab/pctc.hpp"
#include "oracles.hpp"

using namespace ctclab;
using pctc::AcceptanceScale;

namespace {

const double kS = 1.0 / std::numbers::sqrt2;

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

StateVector ket(const std::string& label, cplx a, cplx b) {
  return StateVector::qubit(label, Eigen::Vector2cd(a, b));
}

}  // namespace

// ---------------------------------------------------------------------------
// pctc_contract
// ---------------------------------------------------------------------------

TEST(Contract, identity_gives_twice_identity) {
  const auto c = pctc::pctc_contract(gates::identity2(), {"q1"});
  EXPECT_EQ(c.in_layout().labels(), (std::vector<std::string>{"q0"}));
  EXPECT_LT(max_abs(c.entries() - 2.0 * CMatrix::Identity(2, 2)), 1e-15);
}

TEST(Contract, swap_gives_identity) {
  const auto c = pctc::pctc_contract(gates::swap(), {"q1"});
  EXPECT_LT(max_abs(c.entries() - CMatrix::Identity(2, 2)), 1e-15);
  EXPECT_LT(max_abs(c.entries() - oracle::contract_two_qubit(gates::swap().entries(), 1)), 1e-15);
}

TEST(Contract, cnot_both_orientations) {
  // Control = CR (first), target = CTC (second): 2|0><0|.
  const auto cr_control = pctc::pctc_contract(gates::cnot(0), {"q1"});
  CMatrix two_zero = CMatrix::Zero(2, 2);
  two_zero(0, 0) = 2.0;
  EXPECT_LT(max_abs(cr_control.entries() - two_zero), 1e-15);
  // Control = CTC (second), target = CR (first): I + X = 2|+><+|.
  const auto ctc_control = pctc::pctc_contract(gates::cnot(1), {"q1"});
  CMatrix i_plus_x(2, 2);
  i_plus_x << 1, 1, 1, 1;
  EXPECT_LT(max_abs(ctc_control.entries() - i_plus_x), 1e-15);
  for (int slot = 0; slot < 2; ++slot) {
    EXPECT_LT(max_abs(pctc::pctc_contract(gates::cnot(static_cast<std::size_t>(slot)), {"q1"}).entries() -
                      oracle::contract_two_qubit(gates::cnot(static_cast<std::size_t>(slot)).entries(), 1)),
              1e-15);
  }
}

TEST(Contract, tracing_the_first_slot) {
  Rng rng(12);
  const auto u = random_unitary(SubsystemLayout::qubits({"ctc", "cr"}), rng);
  const auto c = pctc::pctc_contract(u, {"ctc"});
  EXPECT_EQ(c.in_layout().labels(), (std::vector<std::string>{"cr"}));
  EXPECT_LT(max_abs(c.entries() - oracle::contract_two_qubit(u.entries(), 0)), 1e-12);
}

TEST(Contract, linear_in_the_unitary) {
  Rng rng(31);
  const auto layout = SubsystemLayout::qubits({"cr", "ctc"});
  for (int trial = 0; trial < 50; ++trial) {
    const auto u = random_unitary(layout, rng);
    const auto v = random_unitary(layout, rng);
    const CMatrix sum = pctc::pctc_contract(u, {"ctc"}).entries() + pctc::pctc_contract(v, {"ctc"}).entries();
    EXPECT_LT(max_abs(sum - oracle::contract_two_qubit(u.entries() + v.entries(), 1)), 1e-12);
  }
}

TEST(Contract, errors) {
  EXPECT_THROW(pctc::pctc_contract(gates::cnot(0), {"q0", "q1"}), LabelError);
  EXPECT_THROW(pctc::pctc_contract(gates::cnot(0), {}), LabelError);
  EXPECT_THROW(pctc::pctc_contract(gates::cnot(0), {"zz"}), LabelError);
  EXPECT_THROW(pctc::pctc_contract(gates::projector(bell_state(BellKind::phi_plus_paper)), {"B"}),
               InvariantError);
}

// ---------------------------------------------------------------------------
// pctc_evolve
// ---------------------------------------------------------------------------

TEST(Evolve, projection_onto_plus) {
  CMatrix two_plus(2, 2);
  two_plus << 1, 1, 1, 1;
  const LinearMap c(SubsystemLayout::qubits({"q"}), two_plus);
  const auto out = pctc::pctc_evolve(bell_state(BellKind::phi_plus_paper), c, {"B"});
  const auto expected = tensor(ket("A", kS, kS), ket("B", kS, kS));
  EXPECT_NEAR(phase_invariant_overlap(out.state, expected), 1.0, 1e-12);
  // ||C psi||^2 = 2, ||C||_op^2 = 4.
  EXPECT_NEAR(out.acceptance_prob, 0.5, 1e-12);
  EXPECT_NEAR(pctc::pctc_evolve(bell_state(BellKind::phi_plus_paper), c, {"B"}, AcceptanceScale::physical)
                  .acceptance_prob,
              2.0, 1e-12);
}

TEST(Evolve, orthogonal_input_is_paradoxical) {
  CMatrix two_plus(2, 2);
  two_plus << 1, 1, 1, 1;
  const LinearMap c(SubsystemLayout::qubits({"q"}), two_plus);
  const auto input = tensor(ket("A", 1, 0), ket("B", kS, -kS));
  EXPECT_THROW(pctc::pctc_evolve(input, c, {"B"}), ParadoxicalEvolution);
  EXPECT_THROW(pctc::pctc_evolve(DensityMatrix::from_pure(input), c, {"B"}), ParadoxicalEvolution);
}

TEST(Evolve, identity_leaves_state_alone) {
  Rng rng(2);
  const auto psi = random_state(SubsystemLayout::qubits({"A", "B"}), rng);
  const auto out = pctc::pctc_evolve(psi, LinearMap::identity(SubsystemLayout::qubits({"q"})), {"B"});
  EXPECT_LT((out.state.amplitudes() - psi.amplitudes()).norm(), 1e-12);
  EXPECT_NEAR(out.acceptance_prob, 1.0, 1e-12);
}

TEST(Evolve, mixed_input_matches_pure_input) {
  Rng rng(9);
  const auto layout = SubsystemLayout::qubits({"A", "B"});
  for (int trial = 0; trial < 30; ++trial) {
    const auto psi = random_state(layout, rng);
    const auto c = pctc::pctc_contract(random_unitary(SubsystemLayout::qubits({"x", "y"}), rng), {"y"});
    const auto pure = pctc::pctc_evolve(psi, c, {"B"});
    const auto mixed = pctc::pctc_evolve(DensityMatrix::from_pure(psi), c, {"B"});
    EXPECT_LT(max_abs(mixed.state.entries() - pure.state.amplitudes() * pure.state.amplitudes().adjoint()), 1e-12);
    EXPECT_NEAR(mixed.acceptance_prob, pure.acceptance_prob, 1e-12);
  }
}

// ---------------------------------------------------------------------------
// wormhole_operator
// ---------------------------------------------------------------------------

TEST(WormholeOperator, cnot_scenario) {
  const auto e = pctc::wormhole_operator(pctc::paper_scenario(false));
  EXPECT_EQ(e.in_layout().labels(), (std::vector<std::string>{"B"}));
  EXPECT_EQ(e.out_layout().labels(), (std::vector<std::string>{"C1"}));
  CMatrix expected(2, 2);
  expected << 0.5, 0.5, 0, 0;  // |0><+| / sqrt2
  EXPECT_LT(max_abs(e.entries() - expected), 1e-15);
  EXPECT_LT(max_abs(e.entries() - oracle::wormhole_operator(gates::cnot(0).entries(), false, 0)), 1e-15);
}

TEST(WormholeOperator, cnot_scenario_with_flip) {
  const auto e = pctc::wormhole_operator(pctc::paper_scenario(true));
  CMatrix expected(2, 2);
  expected << 0.5, -0.5, 0, 0;  // |0><-| / sqrt2
  EXPECT_LT(max_abs(e.entries() - expected), 1e-15);
}

TEST(WormholeOperator, identity_interaction_transfers_the_state) {
  auto s = pctc::paper_scenario();
  s.interaction = gates::identity2();
  const auto e = pctc::wormhole_operator(s);
  EXPECT_LT(max_abs(e.entries() - 0.5 * CMatrix::Identity(2, 2)), 1e-15);
}

TEST(WormholeOperator, matches_oracle_for_random_scenarios) {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = pctc::paper_scenario(rng.bit() == 1);
    s.interaction = random_unitary(SubsystemLayout::qubits({"x", "y"}), rng);
    s.bell = kAllBellKinds[rng.next() % 4];
    const CMatrix expected =
        oracle::wormhole_operator(s.interaction.entries(), s.flip, static_cast<int>(s.bell));
    EXPECT_LT(max_abs(pctc::wormhole_operator(s).entries() - expected), 1e-12);
  }
}

TEST(WormholeOperator, flip_covariance) {
  Rng rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = pctc::paper_scenario(false);
    s.interaction = random_unitary(SubsystemLayout::qubits({"x", "y"}), rng);
    s.bell = kAllBellKinds[rng.next() % 4];
    auto flipped = s;
    flipped.flip = true;
    const CMatrix z = gates::z().entries();
    EXPECT_LT(max_abs(pctc::wormhole_operator(flipped).entries() - pctc::wormhole_operator(s).entries() * z),
              1e-12);
  }
}

TEST(Scenario, validation) {
  auto s = pctc::paper_scenario();
  s.interaction = gates::projector(bell_state(BellKind::phi_plus_paper));
  EXPECT_THROW(s.validate(), InvariantError);
  s = pctc::paper_scenario();
  s.emerged = "B";
  EXPECT_THROW(s.validate(), LabelError);
  s = pctc::paper_scenario();
  s.interaction = gates::h();
  EXPECT_THROW(s.validate(), DimensionError);
}

// ---------------------------------------------------------------------------
// wormhole_evolve_circuit
// ---------------------------------------------------------------------------

TEST(Circuit, paper_output_without_flip) {
  const auto out = pctc::wormhole_evolve_circuit(experiments::shared_pair(), pctc::paper_scenario(false));
  EXPECT_EQ(out.state.layout().labels(), (std::vector<std::string>{"A", "B"}));
  const auto expected = tensor(ket("A", kS, kS), ket("B", 1, 0));
  EXPECT_GE(phase_invariant_overlap(out.state, expected), 1.0 - 1e-9);
  EXPECT_NEAR(out.acceptance_prob, 0.25, 1e-12);
}

TEST(Circuit, paper_output_with_flip) {
  const auto out = pctc::wormhole_evolve_circuit(experiments::shared_pair(), pctc::paper_scenario(true));
  const auto expected = tensor(ket("A", kS, -kS), ket("B", 1, 0));
  EXPECT_GE(phase_invariant_overlap(out.state, expected), 1.0 - 1e-9);
}

TEST(Circuit, minus_entering_qubit_is_paradoxical) {
  const auto input = tensor(ket("A", kS, kS), ket("B", kS, -kS));
  EXPECT_THROW(pctc::wormhole_evolve_circuit(input, pctc::paper_scenario(false)), ParadoxicalEvolution);
  const auto e = pctc::wormhole_operator(pctc::paper_scenario(false));
  EXPECT_LT((e.entries() * Eigen::Vector2cd(kS, -kS)).norm(), 1e-15);
}

TEST(Circuit, reversed_cnot_does_not_reproduce_paper_state) {
  auto s = pctc::paper_scenario(false);
  s.interaction = gates::cnot(1);
  const auto out = pctc::wormhole_evolve_circuit(experiments::shared_pair(), s);
  EXPECT_LT(phase_invariant_overlap(out.state, experiments::golden_output(false)), 1.0 - 1e-3);
}

TEST(Circuit, bell_distribution_matches_full_simulation) {
  Rng rng(52);
  const auto layout = SubsystemLayout::qubits({"A", "B"});
  for (int trial = 0; trial < 50; ++trial) {
    auto s = pctc::paper_scenario(rng.bit() == 1);
    s.interaction = random_unitary(SubsystemLayout::qubits({"x", "y"}), rng);
    s.bell = kAllBellKinds[rng.next() % 4];
    const auto psi = random_state(layout, rng);
    const auto dist = pctc::circuit_bell_distribution(psi, s);
    const auto ref = oracle::teleport_circuit(psi.amplitudes(), s.interaction.entries(), s.flip,
                                              static_cast<int>(s.bell));
    double total = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      EXPECT_NEAR(dist[k], ref.probs[k], 1e-12);
      total += dist[k];
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    const auto out = pctc::wormhole_evolve_circuit(psi, s);
    const auto& branch = ref.branches[static_cast<std::size_t>(s.bell)];
    EXPECT_NEAR(out.acceptance_prob, branch.squaredNorm(), 1e-12);
    EXPECT_NEAR(phase_invariant_overlap(out.state, StateVector(layout, branch / branch.norm())), 1.0, 1e-12);
  }
}

TEST(Circuit, input_label_errors) {
  EXPECT_THROW(pctc::wormhole_evolve_circuit(bell_state(BellKind::phi_plus_paper, "A", "X"),
                                             pctc::paper_scenario()),
               LabelError);
  EXPECT_THROW(pctc::wormhole_evolve_circuit(bell_state(BellKind::phi_plus_paper, "C1", "B"),
                                             pctc::paper_scenario()),
               LabelError);
}

// Circuit and operator formulations agree (200 random cases).
TEST(Equivalence, circuit_and_operator_formulations) {
  Rng rng(2011);
  const auto layout = SubsystemLayout::qubits({"A", "B"});
  for (int trial = 0; trial < 200; ++trial) {
    auto s = pctc::paper_scenario(rng.bit() == 1);
    s.interaction = random_unitary(SubsystemLayout::qubits({"x", "y"}), rng);
    s.bell = kAllBellKinds[rng.next() % 4];
    const auto psi = random_state(layout, rng);
    const auto circuit = pctc::wormhole_evolve_circuit(psi, s);
    const auto op = pctc::pctc_evolve(psi, pctc::wormhole_operator(s), {"B"}, AcceptanceScale::physical);
    EXPECT_GE(phase_invariant_overlap(circuit.state, op.state), 1.0 - 1e-9);
    EXPECT_NEAR(circuit.acceptance_prob, op.acceptance_prob, 1e-9);
    EXPECT_GE(circuit.acceptance_prob, 0.0);
    EXPECT_LE(circuit.acceptance_prob, 1.0);
    EXPECT_NEAR(circuit.state.norm(), 1.0, 1e-12);
    EXPECT_NEAR(op.state.norm(), 1.0, 1e-12);
  }
}

TEST(Equivalence, zero_norm_cases_fail_in_both) {
  const double s = kS;
  for (bool flip : {false, true}) {
    const auto scenario = pctc::paper_scenario(flip);
    // The annihilated input is |-> without a flip and |+> with one.
    const auto input = tensor(ket("A", 1, 0), ket("B", s, flip ? s : -s));
    EXPECT_THROW(pctc::wormhole_evolve_circuit(input, scenario), ParadoxicalEvolution);
    EXPECT_THROW(pctc::pctc_evolve(input, pctc::wormhole_operator(scenario), {"B"}, AcceptanceScale::physical),
                 ParadoxicalEvolution);
  }
}
