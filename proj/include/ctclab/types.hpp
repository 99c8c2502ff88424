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

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ctclab/errors.hpp"
#include "ctclab/layout.hpp"

namespace ctclab {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Tolerances shared across the library.
namespace tol {
inline constexpr double algebraic = 1e-12;  // identities, norms, traces
inline constexpr double positivity = 1e-10; // minimum eigenvalue of a state
inline constexpr double iterative = 1e-9;   // optimized / iterated quantities
inline constexpr double zero_norm = 1e-12;  // post-selection branch cut-off
}  // namespace tol

namespace detail {

/// For a layout and a reordering of its labels, the old composite index of
/// every new composite index.
inline std::vector<std::size_t> permutation_indices(const SubsystemLayout& layout,
                                                    const std::vector<std::string>& order) {
  if (order.size() != layout.size()) {
    throw LabelError("reordering must name every subsystem of " + describe(layout));
  }
  const auto old_strides = layout.strides();
  std::vector<std::size_t> src_axis(order.size());
  std::vector<std::size_t> new_dims(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    src_axis[i] = layout.index_of(order[i]);
    new_dims[i] = layout.dims()[src_axis[i]];
  }
  SubsystemLayout(order, new_dims);  // validates distinctness
  const std::size_t total = layout.total_dim();
  std::vector<std::size_t> result(total);
  std::vector<std::size_t> digit(order.size(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    std::size_t old = 0;
    for (std::size_t a = 0; a < order.size(); ++a) old += digit[a] * old_strides[src_axis[a]];
    result[n] = old;
    for (std::size_t a = order.size(); a-- > 0;) {
      if (++digit[a] < new_dims[a]) break;
      digit[a] = 0;
    }
  }
  return result;
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline double min_eigenvalue(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace detail

/// Pure state over a layout. Operations that produce unnormalized branches
/// (e.g. apply_map with a projector) return a StateVector with norm != 1;
/// is_normalized() reports whether the unit-norm invariant holds.
class StateVector {
 public:
  StateVector(SubsystemLayout layout, CVector amplitudes)
      : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amplitudes_.size()) != layout_.total_dim()) {
      throw DimensionError("state over " + describe(layout_) + " needs " +
                           std::to_string(layout_.total_dim()) + " amplitudes, got " +
                           std::to_string(amplitudes_.size()));
    }
  }

  static StateVector basis(SubsystemLayout layout, std::size_t index) {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(layout.total_dim()));
    if (index >= layout.total_dim()) throw DimensionError("basis index out of range");
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return StateVector(std::move(layout), std::move(v));
  }

  static StateVector qubit(const std::string& label, const Eigen::Vector2cd& amps) {
    return StateVector(SubsystemLayout::qubits({label}), amps);
  }

  const SubsystemLayout& layout() const noexcept { return layout_; }
  const CVector& amplitudes() const noexcept { return amplitudes_; }
  cplx operator[](std::size_t i) const { return amplitudes_(static_cast<Eigen::Index>(i)); }

  double norm() const { return amplitudes_.norm(); }
  bool is_normalized(double tolerance = tol::algebraic) const {
    return std::abs(norm() - 1.0) <= tolerance;
  }

  StateVector normalized() const {
    const double n = norm();
    if (n < tol::zero_norm) throw ParadoxicalEvolution("cannot normalize a zero-norm state");
    return StateVector(layout_, amplitudes_ / n);
  }

  StateVector relabeled(const std::string& from, const std::string& to) const {
    return StateVector(layout_.relabeled(from, to), amplitudes_);
  }

  /// Same state with subsystems listed in `order`.
  StateVector permuted(const std::vector<std::string>& order) const {
    const auto idx = detail::permutation_indices(layout_, order);
    CVector out(amplitudes_.size());
    for (std::size_t n = 0; n < idx.size(); ++n) {
      out(static_cast<Eigen::Index>(n)) = amplitudes_(static_cast<Eigen::Index>(idx[n]));
    }
    return StateVector(layout_.select(order), std::move(out));
  }

 private:
  SubsystemLayout layout_;
  CVector amplitudes_;
};

/// Mixed state. Construction checks Hermiticity, unit trace and positivity.
class DensityMatrix {
 public:
  DensityMatrix(SubsystemLayout layout, CMatrix entries)
      : layout_(std::move(layout)), entries_(std::move(entries)) {
    check_shape();
    validate();
  }

  static DensityMatrix from_pure(const StateVector& psi) {
    if (!psi.is_normalized()) {
      throw InvariantError("density matrix from a state with norm " + std::to_string(psi.norm()));
    }
    return DensityMatrix(psi.layout(), psi.amplitudes() * psi.amplitudes().adjoint());
  }

  static DensityMatrix maximally_mixed(SubsystemLayout layout) {
    const auto d = static_cast<Eigen::Index>(layout.total_dim());
    return DensityMatrix(std::move(layout), CMatrix::Identity(d, d) / static_cast<double>(d));
  }

  const SubsystemLayout& layout() const noexcept { return layout_; }
  const CMatrix& entries() const noexcept { return entries_; }
  std::size_t dim() const noexcept { return layout_.total_dim(); }

  DensityMatrix relabeled(const std::string& from, const std::string& to) const {
    return DensityMatrix(layout_.relabeled(from, to), entries_, Unchecked{});
  }

  DensityMatrix permuted(const std::vector<std::string>& order) const {
    const auto idx = detail::permutation_indices(layout_, order);
    const auto n = static_cast<Eigen::Index>(idx.size());
    CMatrix out(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        out(r, c) = entries_(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(r)]),
                             static_cast<Eigen::Index>(idx[static_cast<std::size_t>(c)]));
      }
    }
    return DensityMatrix(layout_.select(order), std::move(out), Unchecked{});
  }

  /// Throws InvariantError naming the first violated invariant.
  void validate() const {
    const double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol::algebraic) {
      throw InvariantError("density matrix is not Hermitian (max deviation " +
                           std::to_string(herm) + ")");
    }
    const cplx tr = entries_.trace();
    if (std::abs(tr - 1.0) > tol::algebraic) {
      throw InvariantError("density matrix trace is " + std::to_string(tr.real()) + " (must be 1)");
    }
    const double lo = detail::min_eigenvalue(entries_);
    if (lo < -tol::positivity) {
      throw InvariantError("density matrix has negative eigenvalue " + std::to_string(lo));
    }
  }

 private:
  struct Unchecked {};
  DensityMatrix(SubsystemLayout layout, CMatrix entries, Unchecked)
      : layout_(std::move(layout)), entries_(std::move(entries)) {}

  void check_shape() const {
    const auto d = static_cast<Eigen::Index>(layout_.total_dim());
    if (entries_.rows() != d || entries_.cols() != d) {
      throw DimensionError("density matrix over " + describe(layout_) + " must be " +
                           std::to_string(d) + "x" + std::to_string(d));
    }
  }

  SubsystemLayout layout_;
  CMatrix entries_;
};

/// Complex matrix from the space of `in_layout` to the space of `out_layout`.
class LinearMap {
 public:
  LinearMap(SubsystemLayout in_layout, SubsystemLayout out_layout, CMatrix entries)
      : in_(std::move(in_layout)), out_(std::move(out_layout)), entries_(std::move(entries)) {
    if (static_cast<std::size_t>(entries_.rows()) != out_.total_dim() ||
        static_cast<std::size_t>(entries_.cols()) != in_.total_dim()) {
      throw DimensionError("map " + describe(in_) + " -> " + describe(out_) + " must be " +
                           std::to_string(out_.total_dim()) + "x" +
                           std::to_string(in_.total_dim()) + ", got " +
                           std::to_string(entries_.rows()) + "x" + std::to_string(entries_.cols()));
    }
  }

  /// Square operator on a single layout.
  LinearMap(SubsystemLayout layout, CMatrix entries)
      : LinearMap(layout, layout, std::move(entries)) {}

  static LinearMap identity(const SubsystemLayout& layout) {
    const auto d = static_cast<Eigen::Index>(layout.total_dim());
    return LinearMap(layout, CMatrix::Identity(d, d));
  }

  const SubsystemLayout& in_layout() const noexcept { return in_; }
  const SubsystemLayout& out_layout() const noexcept { return out_; }
  const CMatrix& entries() const noexcept { return entries_; }
  bool is_square() const noexcept { return in_ == out_; }

  bool is_unitary(double tolerance = tol::algebraic) const {
    if (entries_.rows() != entries_.cols()) return false;
    const auto d = entries_.rows();
    return ((entries_.adjoint() * entries_) - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() <=
           tolerance;
  }

  /// Same matrix with the subsystems renamed (dims must match).
  LinearMap with_layouts(SubsystemLayout in_layout, SubsystemLayout out_layout) const {
    if (in_layout.dims() != in_.dims() || out_layout.dims() != out_.dims()) {
      throw DimensionError("relabeling must preserve subsystem dimensions");
    }
    return LinearMap(std::move(in_layout), std::move(out_layout), entries_);
  }

  LinearMap adjoint() const { return LinearMap(out_, in_, entries_.adjoint()); }

  double operator_norm() const {
    if (entries_.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(entries_);
    return svd.singularValues()(0);
  }

 private:
  SubsystemLayout in_;
  SubsystemLayout out_;
  CMatrix entries_;
};

}  // namespace ctclab
