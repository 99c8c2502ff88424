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
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "ctclab/random.hpp"
#include "ctclab/types.hpp"

namespace ctclab {

// ---------------------------------------------------------------------------
// Bell states
// ---------------------------------------------------------------------------

/// The four maximally entangled two-qubit states, named in the convention
/// where phi is the anti-correlated pair:
///   phi_plus_paper  = (|01> + |10>)/sqrt2
///   phi_minus_paper = (|01> - |10>)/sqrt2
///   psi_plus_paper  = (|00> + |11>)/sqrt2
///   psi_minus_paper = (|00> - |11>)/sqrt2
enum class BellKind { phi_plus_paper, phi_minus_paper, psi_plus_paper, psi_minus_paper };

inline constexpr std::array<BellKind, 4> kAllBellKinds = {
    BellKind::phi_plus_paper, BellKind::phi_minus_paper, BellKind::psi_plus_paper,
    BellKind::psi_minus_paper};

inline std::string_view to_string(BellKind kind) {
  switch (kind) {
    case BellKind::phi_plus_paper: return "PHI_PLUS_PAPER";
    case BellKind::phi_minus_paper: return "PHI_MINUS_PAPER";
    case BellKind::psi_plus_paper: return "PSI_PLUS_PAPER";
    case BellKind::psi_minus_paper: return "PSI_MINUS_PAPER";
  }
  return "?";
}

inline BellKind bell_kind_from_string(std::string_view name) {
  for (auto k : kAllBellKinds) {
    if (to_string(k) == name) return k;
  }
  throw FormatError("unknown Bell state '" + std::string(name) + "'");
}

inline Eigen::Vector4cd bell_amplitudes(BellKind kind) {
  const double s = 1.0 / std::numbers::sqrt2;
  switch (kind) {
    case BellKind::phi_plus_paper: return Eigen::Vector4cd(0, s, s, 0);
    case BellKind::phi_minus_paper: return Eigen::Vector4cd(0, s, -s, 0);
    case BellKind::psi_plus_paper: return Eigen::Vector4cd(s, 0, 0, s);
    case BellKind::psi_minus_paper: return Eigen::Vector4cd(s, 0, 0, -s);
  }
  return Eigen::Vector4cd::Zero();
}

inline StateVector bell_state(BellKind kind, const std::string& first = "A",
                              const std::string& second = "B") {
  return StateVector(SubsystemLayout::qubits({first, second}), bell_amplitudes(kind));
}

/// <bell| as a map from the pair (first, second) to the scalar space.
inline LinearMap bell_bra(BellKind kind, const std::string& first, const std::string& second) {
  CMatrix row = bell_amplitudes(kind).adjoint();
  return LinearMap(SubsystemLayout::qubits({first, second}), SubsystemLayout{}, row);
}

// ---------------------------------------------------------------------------
// Gates
// ---------------------------------------------------------------------------

namespace gates {

inline LinearMap single(const std::string& label, cplx a, cplx b, cplx c, cplx d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return LinearMap(SubsystemLayout::qubits({label}), m);
}

inline LinearMap x(const std::string& label = "q") { return single(label, 0, 1, 1, 0); }
inline LinearMap y(const std::string& label = "q") {
  return single(label, 0, cplx(0, -1), cplx(0, 1), 0);
}
inline LinearMap z(const std::string& label = "q") { return single(label, 1, 0, 0, -1); }
inline LinearMap h(const std::string& label = "q") {
  const double s = 1.0 / std::numbers::sqrt2;
  return single(label, s, s, s, -s);
}

/// Controlled-X on the ordered pair (first, second); `control_slot` picks
/// which of the two is the control (0 = first).
inline LinearMap cnot(std::size_t control_slot = 0, const std::string& first = "q0",
                      const std::string& second = "q1") {
  CMatrix m = CMatrix::Zero(4, 4);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const int na = control_slot == 1 ? a ^ b : a;
      const int nb = control_slot == 0 ? b ^ a : b;
      m(na * 2 + nb, a * 2 + b) = 1.0;
    }
  }
  return LinearMap(SubsystemLayout::qubits({first, second}), m);
}

inline LinearMap swap(const std::string& first = "q0", const std::string& second = "q1") {
  CMatrix m = CMatrix::Zero(4, 4);
  m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
  return LinearMap(SubsystemLayout::qubits({first, second}), m);
}

inline LinearMap identity2(const std::string& first = "q0", const std::string& second = "q1") {
  return LinearMap::identity(SubsystemLayout::qubits({first, second}));
}

/// |psi><psi| on psi's layout.
inline LinearMap projector(const StateVector& psi) {
  return LinearMap(psi.layout(), psi.amplitudes() * psi.amplitudes().adjoint());
}

}  // namespace gates

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

inline StateVector tensor(const StateVector& a, const StateVector& b) {
  auto layout = a.layout().concat(b.layout());
  CVector v(a.amplitudes().size() * b.amplitudes().size());
  for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i) {
    v.segment(i * b.amplitudes().size(), b.amplitudes().size()) = a.amplitudes()(i) * b.amplitudes();
  }
  return StateVector(std::move(layout), std::move(v));
}

inline LinearMap tensor(const LinearMap& a, const LinearMap& b) {
  return LinearMap(a.in_layout().concat(b.in_layout()), a.out_layout().concat(b.out_layout()),
                   detail::kron(a.entries(), b.entries()));
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(a.layout().concat(b.layout()), detail::kron(a.entries(), b.entries()));
}

namespace detail {

inline CMatrix permute_matrix(const SubsystemLayout& layout, const CMatrix& m,
                              const std::vector<std::string>& order) {
  const auto idx = permutation_indices(layout, order);
  const auto n = static_cast<Eigen::Index>(idx.size());
  CMatrix out(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      out(r, c) = m(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(r)]),
                    static_cast<Eigen::Index>(idx[static_cast<std::size_t>(c)]));
    }
  }
  return out;
}

/// Partial trace of an arbitrary square operator; `keep` is returned in the
/// layout's relative order.
inline std::pair<SubsystemLayout, CMatrix> partial_trace_matrix(
    const SubsystemLayout& layout, const CMatrix& m, const std::vector<std::string>& keep) {
  if (keep.empty()) throw LabelError("partial trace needs at least one subsystem to keep");
  for (const auto& l : keep) layout.index_of(l);
  std::vector<std::string> kept;
  std::vector<std::string> traced;
  for (const auto& l : layout.labels()) {
    (std::find(keep.begin(), keep.end(), l) != keep.end() ? kept : traced).push_back(l);
  }
  if (kept.size() != keep.size()) throw LabelError("duplicate label in partial-trace keep set");
  auto order = kept;
  order.insert(order.end(), traced.begin(), traced.end());
  const CMatrix p = permute_matrix(layout, m, order);
  auto kept_layout = layout.select(kept);
  const auto dk = static_cast<Eigen::Index>(kept_layout.total_dim());
  const auto dt = static_cast<Eigen::Index>(layout.total_dim()) / dk;
  CMatrix out = CMatrix::Zero(dk, dk);
  for (Eigen::Index i = 0; i < dk; ++i) {
    for (Eigen::Index j = 0; j < dk; ++j) {
      for (Eigen::Index k = 0; k < dt; ++k) out(i, j) += p(i * dt + k, j * dt + k);
    }
  }
  return {std::move(kept_layout), std::move(out)};
}

struct MapPlan {
  std::vector<std::string> work_order;   // targets ++ rest
  std::vector<std::string> rest;
  SubsystemLayout work_out_layout;       // out labels ++ rest
  std::vector<std::string> final_order;
};

inline MapPlan plan_map(const SubsystemLayout& layout, const LinearMap& m,
                        const std::vector<std::string>& targets) {
  if (targets.size() != m.in_layout().size()) {
    throw DimensionError("map expects " + std::to_string(m.in_layout().size()) +
                         " target subsystems, got " + std::to_string(targets.size()));
  }
  std::size_t first_pos = layout.size();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto pos = layout.index_of(targets[i]);
    first_pos = std::min(first_pos, pos);
    if (layout.dims()[pos] != m.in_layout().dims()[i]) {
      throw DimensionError("target '" + targets[i] + "' has dimension " +
                           std::to_string(layout.dims()[pos]) + " but the map expects " +
                           std::to_string(m.in_layout().dims()[i]));
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (targets[j] == targets[i]) throw LabelError("target '" + targets[i] + "' repeated");
    }
  }
  MapPlan plan;
  for (const auto& l : layout.labels()) {
    if (std::find(targets.begin(), targets.end(), l) == targets.end()) plan.rest.push_back(l);
  }
  plan.work_order = targets;
  plan.work_order.insert(plan.work_order.end(), plan.rest.begin(), plan.rest.end());

  const bool keep_labels = m.is_square();
  const std::vector<std::string> out_labels =
      keep_labels ? targets : m.out_layout().labels();
  SubsystemLayout out_part(out_labels, m.out_layout().dims());
  plan.work_out_layout = out_part.concat(layout.select(plan.rest));

  if (keep_labels) {
    plan.final_order = layout.labels();
  } else {
    plan.final_order = plan.rest;
    const auto at = static_cast<std::ptrdiff_t>(first_pos);
    plan.final_order.insert(plan.final_order.begin() + at, out_labels.begin(), out_labels.end());
  }
  return plan;
}

}  // namespace detail

/// Applies `m` to the `targets` subsystems (identity elsewhere). Square maps
/// keep the target labels; maps whose output layout differs from their input
/// layout replace the targets by the map's output subsystems, inserted where
/// the first target sat. The result is not renormalized.
inline StateVector apply_map(const StateVector& state, const LinearMap& m,
                             const std::vector<std::string>& targets) {
  const auto plan = detail::plan_map(state.layout(), m, targets);
  const StateVector work = state.permuted(plan.work_order);
  const auto d_in = static_cast<Eigen::Index>(m.in_layout().total_dim());
  const auto d_out = static_cast<Eigen::Index>(m.out_layout().total_dim());
  const auto d_rest = work.amplitudes().size() / d_in;
  // Column-major view: psi_t(r, t) = amplitude of (t, r).
  Eigen::Map<const CMatrix> psi_t(work.amplitudes().data(), d_rest, d_in);
  CMatrix out_t = psi_t * m.entries().transpose();
  CVector out = Eigen::Map<CVector>(out_t.data(), d_rest * d_out);
  return StateVector(plan.work_out_layout, std::move(out)).permuted(plan.final_order);
}

/// rho -> M rho M^dagger on the targets; the result is generally not a unit-
/// trace state, so the raw operator is returned with its layout.
inline std::pair<SubsystemLayout, CMatrix> apply_map(const DensityMatrix& rho, const LinearMap& m,
                                                     const std::vector<std::string>& targets) {
  const auto plan = detail::plan_map(rho.layout(), m, targets);
  const CMatrix work = detail::permute_matrix(rho.layout(), rho.entries(), plan.work_order);
  const auto d_rest = static_cast<Eigen::Index>(work.rows()) /
                      static_cast<Eigen::Index>(m.in_layout().total_dim());
  const CMatrix full = detail::kron(m.entries(), CMatrix::Identity(d_rest, d_rest));
  const CMatrix out = full * work * full.adjoint();
  return {plan.work_out_layout.select(plan.final_order),
          detail::permute_matrix(plan.work_out_layout, out, plan.final_order)};
}

/// Reduced state on `keep`, listed in rho's relative order.
inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::string>& keep) {
  auto [layout, m] = detail::partial_trace_matrix(rho.layout(), rho.entries(), keep);
  m = (m + m.adjoint()) / 2.0;
  return DensityMatrix(std::move(layout), std::move(m));
}

// ---------------------------------------------------------------------------
// Measurement
// ---------------------------------------------------------------------------

/// Orthonormal single-qubit basis; outcome 0 is `first`.
struct QubitBasis {
  Eigen::Vector2cd first;
  Eigen::Vector2cd second;

  static QubitBasis computational() { return {Eigen::Vector2cd(1, 0), Eigen::Vector2cd(0, 1)}; }
  static QubitBasis diagonal() {
    const double s = 1.0 / std::numbers::sqrt2;
    return {Eigen::Vector2cd(s, s), Eigen::Vector2cd(s, -s)};
  }

  void validate() const {
    const double n0 = std::abs(first.squaredNorm() - 1.0);
    const double n1 = std::abs(second.squaredNorm() - 1.0);
    const double ip = std::abs(first.dot(second));
    if (n0 > tol::algebraic || n1 > tol::algebraic || ip > tol::algebraic) {
      throw InvariantError("measurement basis is not orthonormal");
    }
  }

  const Eigen::Vector2cd& operator[](int k) const { return k == 0 ? first : second; }
};

struct Measurement {
  int outcome;
  StateVector post_state;
  double prob;
};

namespace detail {
inline LinearMap basis_projector(const QubitBasis& basis, int k, const std::string& label) {
  return LinearMap(SubsystemLayout::qubits({label}), basis[k] * basis[k].adjoint());
}
}  // namespace detail

inline std::array<double, 2> born_probabilities(const StateVector& state, const std::string& target,
                                                const QubitBasis& basis) {
  basis.validate();
  std::array<double, 2> p{};
  for (int k = 0; k < 2; ++k) {
    p[static_cast<std::size_t>(k)] =
        apply_map(state, detail::basis_projector(basis, k, target), {target}).amplitudes().squaredNorm();
  }
  return p;
}

inline std::array<double, 2> born_probabilities(const DensityMatrix& rho, const std::string& target,
                                                const QubitBasis& basis) {
  basis.validate();
  const auto [layout, reduced] = detail::partial_trace_matrix(rho.layout(), rho.entries(), {target});
  if (layout.total_dim() != 2) throw DimensionError("target '" + target + "' is not a qubit");
  std::array<double, 2> p{};
  for (int k = 0; k < 2; ++k) {
    p[static_cast<std::size_t>(k)] =
        std::max(0.0, (basis[k].adjoint() * reduced * basis[k])(0, 0).real());
  }
  return p;
}

/// Samples a projective measurement of one qubit with Born probabilities and
/// returns the renormalized conditional state.
inline Measurement measure_projective(const StateVector& state, const std::string& target,
                                      const QubitBasis& basis, Rng& rng) {
  basis.validate();
  if (!state.is_normalized()) {
    throw InvariantError("measured state has norm " + std::to_string(state.norm()));
  }
  if (state.layout().dim_of(target) != 2) {
    throw DimensionError("target '" + target + "' is not a qubit");
  }
  const double u = rng.uniform();
  const StateVector branch0 = apply_map(state, detail::basis_projector(basis, 0, target), {target});
  const double p0 = branch0.amplitudes().squaredNorm();
  const int outcome = u < p0 ? 0 : 1;
  if (outcome == 0) return {0, branch0.normalized(), p0};
  const StateVector branch1 = apply_map(state, detail::basis_projector(basis, 1, target), {target});
  return {1, branch1.normalized(), branch1.amplitudes().squaredNorm()};
}

// ---------------------------------------------------------------------------
// Scalar functionals
// ---------------------------------------------------------------------------

/// Von Neumann entropy in bits; eigenvalues below 1e-12 contribute nothing.
inline double entropy_bits(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()(i);
    if (p > tol::algebraic) s -= p * std::log2(p);
  }
  return s;
}

inline double entropy_bits(const DensityMatrix& rho) { return entropy_bits(rho.entries()); }

/// |<a|b>|. Equal to 1 exactly when the (normalized) states agree up to a
/// global phase.
inline double phase_invariant_overlap(const StateVector& a, const StateVector& b) {
  if (a.layout() != b.layout()) {
    throw LabelError("overlap of states over different layouts " + describe(a.layout()) +
                     " and " + describe(b.layout()));
  }
  return std::abs(a.amplitudes().dot(b.amplitudes()));
}

/// (1/2) || a - b ||_1 for Hermitian operators of equal size.
inline double trace_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("trace distance between operators of different size");
  }
  const CMatrix diff = a - b;
  Eigen::SelfAdjointEigenSolver<CMatrix> es((diff + diff.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.layout() != b.layout()) throw LabelError("trace distance across different layouts");
  return trace_distance(a.entries(), b.entries());
}

}  // namespace ctclab
