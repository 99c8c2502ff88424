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

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctclab/json_io.hpp"
#include "ctclab/qcore.hpp"

namespace ctclab::pctc {

/// Label of the teleporter half that is Bell-measured together with the
/// entering qubit.
inline constexpr const char* kResourcePartner = "C2";

/// A qubit that enters the future wormhole mouth, optionally phase flipped,
/// and meets its emerged past self through `interaction`.
///
/// `interaction` acts on (entering, emerged) in that order. The same Bell
/// state drives the teleporter and is the post-selected measurement outcome.
struct WormholeScenario {
  LinearMap interaction;
  bool flip = false;
  BellKind bell = BellKind::phi_plus_paper;
  std::string entering = "B";
  std::string emerged = "C1";

  void validate() const {
    if (interaction.in_layout().dims() != std::vector<std::size_t>{2, 2} || !interaction.is_square()) {
      throw DimensionError("wormhole interaction must be a two-qubit operator");
    }
    if (!interaction.is_unitary()) throw InvariantError("wormhole interaction is not unitary");
    if (entering == emerged || entering == kResourcePartner || emerged == kResourcePartner) {
      throw LabelError("wormhole roles must be distinct and differ from '" +
                       std::string(kResourcePartner) + "'");
    }
  }
};

/// CNOT with the entering qubit as control and the emerged qubit as target.
/// This orientation gives the anti-correlated pair the output
/// (|0> +- |1>)/sqrt2 (x) |0>; gates::cnot(1) is the reversed coupling.
inline WormholeScenario paper_scenario(bool flip = false) {
  return WormholeScenario{gates::cnot(0), flip, BellKind::phi_plus_paper, "B", "C1"};
}

struct PostSelectedOutcome {
  StateVector state;
  double acceptance_prob;
};

struct PostSelectedMixedOutcome {
  DensityMatrix state;
  double acceptance_prob;
};

/// How pctc_evolve reports acceptance probability.
enum class AcceptanceScale {
  /// ||C psi||^2 / ||C||_op^2. Tr_CTC[U] carries an arbitrary scale, so this
  /// number is only meaningful relative to other inputs.
  operator_norm,
  /// ||C psi||^2 as is; correct for wormhole_operator, whose scale comes from
  /// the explicit teleportation circuit.
  physical,
};

/// Tr over `ctc_labels` of a unitary: C_ij = sum_k <i,k|U|j,k>. No
/// normalization is applied.
inline LinearMap pctc_contract(const LinearMap& u, const std::vector<std::string>& ctc_labels) {
  if (!u.is_square()) throw DimensionError("contraction needs a square operator");
  if (!u.is_unitary()) throw InvariantError("contraction input is not unitary");
  const auto& layout = u.in_layout();
  if (ctc_labels.empty() || ctc_labels.size() >= layout.size()) {
    throw LabelError("CTC labels must be a non-empty proper subset of " + describe(layout));
  }
  std::vector<std::string> kept;
  for (const auto& l : layout.labels()) {
    if (std::find(ctc_labels.begin(), ctc_labels.end(), l) == ctc_labels.end()) kept.push_back(l);
  }
  for (const auto& l : ctc_labels) layout.index_of(l);
  if (kept.size() + ctc_labels.size() != layout.size()) {
    throw LabelError("duplicate label among CTC labels");
  }
  auto [kept_layout, c] = ctclab::detail::partial_trace_matrix(layout, u.entries(), kept);
  return LinearMap(kept_layout, c);
}

namespace detail {

// The emerged system continues the worldline of the one that entered, so a
// map with different output labels but identical dims hands the result back
// under the original target labels.
inline std::vector<std::string> relabel_back(const LinearMap& c,
                                             const std::vector<std::string>& targets) {
  if (c.is_square() || c.out_layout().dims() != c.in_layout().dims()) return {};
  return targets;
}

}  // namespace detail

/// Renormalized post-selected evolution psi -> C psi / ||C psi||.
inline PostSelectedOutcome pctc_evolve(const StateVector& state, const LinearMap& c,
                                       const std::vector<std::string>& targets,
                                       AcceptanceScale scale = AcceptanceScale::operator_norm) {
  StateVector branch = apply_map(state, c, targets);
  const double n = branch.norm();
  if (n < tol::zero_norm) {
    throw ParadoxicalEvolution("post-selection never succeeds: ||C psi|| = " + std::to_string(n));
  }
  const auto back = detail::relabel_back(c, targets);
  for (std::size_t i = 0; i < back.size(); ++i) {
    branch = branch.relabeled(c.out_layout().labels()[i], back[i]);
  }
  double p = n * n;
  if (scale == AcceptanceScale::operator_norm) p /= std::pow(c.operator_norm(), 2);
  return {branch.normalized(), p};
}

/// Mixed-input version: rho -> C rho C^dagger / Tr(C rho C^dagger).
inline PostSelectedMixedOutcome pctc_evolve(const DensityMatrix& rho, const LinearMap& c,
                                            const std::vector<std::string>& targets,
                                            AcceptanceScale scale = AcceptanceScale::operator_norm) {
  auto [layout, m] = apply_map(rho, c, targets);
  const double tr = m.trace().real();
  if (tr < tol::zero_norm * tol::zero_norm) {
    throw ParadoxicalEvolution("post-selection never succeeds: Tr(C rho C^dagger) = " +
                               std::to_string(tr));
  }
  const auto back = detail::relabel_back(c, targets);
  for (std::size_t i = 0; i < back.size(); ++i) {
    layout = layout.relabeled(c.out_layout().labels()[i], back[i]);
  }
  CMatrix normalized = m / tr;
  normalized = (normalized + normalized.adjoint()) / 2.0;
  double p = tr;
  if (scale == AcceptanceScale::operator_norm) p /= std::pow(c.operator_norm(), 2);
  return {DensityMatrix(std::move(layout), std::move(normalized)), p};
}

/// Effective map from the entering qubit to the emerged qubit,
///   E = <bell|_{entering,C2} U_{entering,emerged} Z^flip |bell>_{emerged,C2}.
/// Its scale is physical: ||E psi||^2 is the probability that the teleporter's
/// Bell measurement returns the resource state.
inline LinearMap wormhole_operator(const WormholeScenario& s) {
  s.validate();
  const auto entering_layout = SubsystemLayout::qubits({s.entering});
  const auto emerged_layout = SubsystemLayout::qubits({s.emerged});
  const StateVector resource = bell_state(s.bell, s.emerged, kResourcePartner);
  CMatrix e(2, 2);
  for (std::size_t j = 0; j < 2; ++j) {
    StateVector psi = tensor(StateVector::basis(entering_layout, j), resource);
    if (s.flip) psi = apply_map(psi, gates::z(), {s.entering});
    psi = apply_map(psi, s.interaction, {s.entering, s.emerged});
    psi = apply_map(psi, bell_bra(s.bell, s.entering, kResourcePartner), {s.entering, kResourcePartner});
    e.col(static_cast<Eigen::Index>(j)) = psi.amplitudes();
  }
  return LinearMap(entering_layout, emerged_layout, e);
}

namespace detail {

/// Runs the circuit up to the Bell measurement: input (x) bell(emerged, C2),
/// Z^flip on the entering qubit, then the interaction.
inline StateVector circuit_before_measurement(const StateVector& input, const WormholeScenario& s) {
  s.validate();
  const auto& layout = input.layout();
  if (!layout.contains(s.entering) || layout.dim_of(s.entering) != 2) {
    throw LabelError("input must contain the entering qubit '" + s.entering + "'");
  }
  if (layout.contains(s.emerged) || layout.contains(kResourcePartner)) {
    throw LabelError("input already uses a teleporter label ('" + s.emerged + "' or '" +
                     kResourcePartner + "')");
  }
  StateVector psi = tensor(input, bell_state(s.bell, s.emerged, kResourcePartner));
  if (s.flip) psi = apply_map(psi, gates::z(), {s.entering});
  return apply_map(psi, s.interaction, {s.entering, s.emerged});
}

}  // namespace detail

/// Born distribution of the teleporter's Bell measurement on (entering, C2),
/// indexed in kAllBellKinds order.
inline std::array<double, 4> circuit_bell_distribution(const StateVector& input,
                                                       const WormholeScenario& s) {
  const StateVector psi = detail::circuit_before_measurement(input, s);
  std::array<double, 4> p{};
  for (std::size_t k = 0; k < kAllBellKinds.size(); ++k) {
    p[k] = apply_map(psi, bell_bra(kAllBellKinds[k], s.entering, kResourcePartner),
                     {s.entering, kResourcePartner})
               .amplitudes()
               .squaredNorm();
  }
  return p;
}

/// Explicit teleportation-circuit simulation. The emerged qubit replaces the
/// entering one under the entering label; acceptance_prob is the Born
/// probability of detecting the resource Bell state.
inline PostSelectedOutcome wormhole_evolve_circuit(const StateVector& input,
                                                   const WormholeScenario& s,
                                                   Rng* rng = nullptr) {
  (void)rng;  // post-selection is deterministic given the input
  const StateVector psi = detail::circuit_before_measurement(input, s);
  StateVector branch =
      apply_map(psi, bell_bra(s.bell, s.entering, kResourcePartner), {s.entering, kResourcePartner});
  const double n = branch.norm();
  if (n < tol::zero_norm) {
    throw ParadoxicalEvolution("the resource Bell state is never detected for this input");
  }
  branch = branch.relabeled(s.emerged, s.entering);
  return {branch.normalized(), n * n};
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const WormholeScenario& s) {
  return nlohmann::json{{"interaction", io::to_json(s.interaction)},
                        {"flip", s.flip},
                        {"bell", std::string(to_string(s.bell))},
                        {"roles", {{"entering", s.entering}, {"emerged", s.emerged}}}};
}

inline WormholeScenario scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("interaction")) {
    throw FormatError("missing field \"interaction\"");
  }
  WormholeScenario s{io::map_from_json(j.at("interaction"))};
  if (j.contains("flip")) {
    if (!j.at("flip").is_boolean()) throw FormatError("field \"flip\" must be a boolean");
    s.flip = j.at("flip").get<bool>();
  }
  if (j.contains("bell")) {
    if (!j.at("bell").is_string()) throw FormatError("field \"bell\" must be a string");
    s.bell = bell_kind_from_string(j.at("bell").get<std::string>());
  }
  if (j.contains("roles")) {
    const auto& r = j.at("roles");
    s.entering = io::detail::require<std::string>(r, "entering");
    s.emerged = io::detail::require<std::string>(r, "emerged");
  }
  try {
    s.validate();
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(std::string("field \"interaction\": ") + e.what());
  }
  return s;
}

}  // namespace ctclab::pctc
