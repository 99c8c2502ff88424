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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctclab/json_io.hpp"
#include "ctclab/pctc.hpp"
#include "ctclab/qcore.hpp"

namespace ctclab::deutsch {

/// Matrix of a linear map on d x d operators, acting on column-stacked
/// vectors: vec(X)[i + d*j] = X(i, j), so vec(A X B) = (B^T (x) A) vec(X).
class Superoperator {
 public:
  static constexpr std::string_view kVecConvention =
      "column-stacking: vec(X)[i + d*j] = X(i,j); vec(A X B) = (B^T kron A) vec(X)";

  Superoperator(std::size_t dim, CMatrix matrix) : dim_(dim), matrix_(std::move(matrix)) {
    const auto n = static_cast<Eigen::Index>(dim_ * dim_);
    if (dim_ < 1 || matrix_.rows() != n || matrix_.cols() != n) {
      throw DimensionError("superoperator on " + std::to_string(dim_) + "x" + std::to_string(dim_) +
                           " operators must be " + std::to_string(n) + "x" + std::to_string(n));
    }
  }

  /// Tabulates `f` on the matrix-unit basis E_ij.
  template <typename F>
  static Superoperator from_map(std::size_t dim, F&& f) {
    const auto d = static_cast<Eigen::Index>(dim);
    CMatrix m(d * d, d * d);
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index i = 0; i < d; ++i) {
        CMatrix unit = CMatrix::Zero(d, d);
        unit(i, j) = 1.0;
        const CMatrix image = f(unit);
        if (image.rows() != d || image.cols() != d) {
          throw DimensionError("superoperator image has the wrong shape");
        }
        m.col(i + d * j) = Eigen::Map<const CVector>(image.data(), d * d);
      }
    }
    return Superoperator(dim, std::move(m));
  }

  static Superoperator identity(std::size_t dim) {
    const auto n = static_cast<Eigen::Index>(dim * dim);
    return Superoperator(dim, CMatrix::Identity(n, n));
  }

  std::size_t dim() const noexcept { return dim_; }
  const CMatrix& matrix() const noexcept { return matrix_; }

  CMatrix apply(const CMatrix& x) const {
    const auto d = static_cast<Eigen::Index>(dim_);
    if (x.rows() != d || x.cols() != d) throw DimensionError("operator has the wrong size");
    const CVector v = matrix_ * Eigen::Map<const CVector>(x.data(), d * d);
    return Eigen::Map<const CMatrix>(v.data(), d, d);
  }

  /// max_ij |Tr N(E_ij) - delta_ij|; zero iff N is trace preserving.
  double trace_preservation_error() const {
    const auto d = static_cast<Eigen::Index>(dim_);
    double err = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index i = 0; i < d; ++i) {
        cplx tr = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) tr += matrix_(k + d * k, i + d * j);
        err = std::max(err, std::abs(tr - (i == j ? 1.0 : 0.0)));
      }
    }
    return err;
  }

  /// max_ij |N(E_ji) - N(E_ij)^dagger|; zero iff N preserves Hermiticity.
  double hermiticity_error() const {
    const auto d = static_cast<Eigen::Index>(dim_);
    double err = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index i = 0; i < d; ++i) {
        CMatrix eij = CMatrix::Zero(d, d);
        eij(i, j) = 1.0;
        const CMatrix a = apply(eij.adjoint());
        const CMatrix b = apply(eij).adjoint();
        err = std::max(err, (a - b).cwiseAbs().maxCoeff());
      }
    }
    return err;
  }

 private:
  std::size_t dim_;
  CMatrix matrix_;
};

/// Which output slot of the two-qubit interaction is fed back into the CTC.
enum class FeedbackSlot {
  entering,  // slot 0: the chronology-respecting qubit heading into the wormhole
  emerged,   // slot 1: the qubit that came out of the past mouth
};

/// N(rho) = Tr_{other slot}[U (env (x) rho) U^dagger], with env in slot 0
/// (entering) and the CTC state rho in slot 1 (emerged).
inline Superoperator build_ctc_map(const LinearMap& interaction, const DensityMatrix& env,
                                   FeedbackSlot keep) {
  if (interaction.in_layout().dims() != std::vector<std::size_t>{2, 2} || !interaction.is_square()) {
    throw DimensionError("CTC interaction must be a two-qubit operator");
  }
  if (!interaction.is_unitary()) throw InvariantError("CTC interaction is not unitary");
  if (env.dim() != 2) throw DimensionError("environment state must be a single qubit");
  const auto pair = SubsystemLayout::qubits({"entering", "emerged"});
  const std::string kept = keep == FeedbackSlot::entering ? "entering" : "emerged";
  const CMatrix& u = interaction.entries();
  return Superoperator::from_map(2, [&](const CMatrix& rho) {
    const CMatrix joint = u * ctclab::detail::kron(env.entries(), rho) * u.adjoint();
    return ctclab::detail::partial_trace_matrix(pair, joint, {kept}).second;
  });
}

// ---------------------------------------------------------------------------
// Fixed points
// ---------------------------------------------------------------------------

namespace detail {

// Isometric real coordinates of a Hermitian matrix: the diagonal, then
// sqrt2 * (Re, Im) of each upper-triangle entry. Frobenius inner products
// become Euclidean ones.
inline Eigen::VectorXd hermitian_coords(const CMatrix& h) {
  const auto d = h.rows();
  Eigen::VectorXd v(d * d);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < d; ++i) v(k++) = h(i, i).real();
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      v(k++) = std::numbers::sqrt2 * h(i, j).real();
      v(k++) = std::numbers::sqrt2 * h(i, j).imag();
    }
  }
  return v;
}

inline CMatrix hermitian_from_coords(const Eigen::VectorXd& v, Eigen::Index d) {
  CMatrix h = CMatrix::Zero(d, d);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < d; ++i) h(i, i) = v(k++);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const double re = v(k++) / std::numbers::sqrt2;
      const double im = v(k++) / std::numbers::sqrt2;
      h(i, j) = cplx(re, im);
      h(j, i) = cplx(re, -im);
    }
  }
  return h;
}

inline CMatrix hermitize(const CMatrix& m) { return (m + m.adjoint()) / 2.0; }

}  // namespace detail

/// Affine set {base + sum_i x_i directions[i]} of Hermitian unit-trace fixed
/// points; its intersection with the PSD cone is the set of consistent CTC
/// states. Directions are traceless, Hermitian and Frobenius-orthonormal.
struct FixedPointSet {
  DensityMatrix base;
  std::vector<CMatrix> directions;

  CMatrix point(const Eigen::VectorXd& coeffs) const {
    CMatrix r = base.entries();
    for (std::size_t i = 0; i < directions.size(); ++i) {
      r += coeffs(static_cast<Eigen::Index>(i)) * directions[i];
    }
    return r;
  }

  /// Coefficients of the orthogonal projection of `m` onto the affine set.
  Eigen::VectorXd coordinates(const CMatrix& m) const {
    Eigen::VectorXd x(static_cast<Eigen::Index>(directions.size()));
    const CMatrix delta = m - base.entries();
    for (std::size_t i = 0; i < directions.size(); ++i) {
      x(static_cast<Eigen::Index>(i)) = (directions[i].adjoint() * delta).trace().real();
    }
    return x;
  }

  /// Frobenius distance from `m` to the affine set.
  double distance(const CMatrix& m) const { return (m - point(coordinates(m))).norm(); }
};

/// Residual ||N(rho) - rho||_F.
inline double fixed_point_residual(const Superoperator& n, const CMatrix& rho) {
  return (n.apply(rho) - rho).norm();
}

/// Limit of the Cesaro averages (1/K) sum_k N^k(I/d). For a trace-preserving
/// positive map this equals the limit of powers of the lazy map (I + N)/2,
/// which repeated squaring reaches in a few dozen steps.
inline CMatrix cesaro_fixed_point(const Superoperator& n) {
  const auto d = static_cast<Eigen::Index>(n.dim());
  const auto dd = d * d;
  CMatrix p = (CMatrix::Identity(dd, dd) + n.matrix()) / 2.0;
  // Rounding leaves the unit eigenvalue at 1 + O(eps), which squaring would
  // eventually amplify; stop once the change reaches its noise floor.
  double last_change = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 128; ++k) {
    CMatrix next = p * p;
    const double change = (next - p).cwiseAbs().maxCoeff();
    if (change > last_change && change < 1e-8) break;
    p = std::move(next);
    if (change < 1e-14) break;
    last_change = change;
  }
  const CMatrix start = CMatrix::Identity(d, d) / static_cast<double>(d);
  const CVector v = p * Eigen::Map<const CVector>(start.data(), dd);
  CMatrix rho = detail::hermitize(Eigen::Map<const CMatrix>(v.data(), d, d));
  const double tr = rho.trace().real();
  if (!(std::abs(tr) >= tol::algebraic)) throw FixedPointError("Cesaro limit has zero or undefined trace");
  return rho / tr;
}

/// Solves rho = N(rho). The eigenvalue-1 eigenspace (right singular vectors
/// of N - I with singular value <= tolerance) is intersected with the
/// Hermitian unit-trace operators; the base point comes independently from
/// Cesaro iteration and must lie in that affine set.
inline FixedPointSet fixed_points(const Superoperator& n, double tolerance = 1e-10) {
  const double check = std::max(tolerance, tol::positivity);
  if (n.trace_preservation_error() > check) {
    throw InvariantError("superoperator is not trace preserving");
  }
  if (n.hermiticity_error() > check) {
    throw InvariantError("superoperator does not preserve Hermiticity");
  }
  const auto d = static_cast<Eigen::Index>(n.dim());
  const auto dd = d * d;

  Eigen::JacobiSVD<CMatrix> svd(n.matrix() - CMatrix::Identity(dd, dd), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  std::vector<Eigen::VectorXd> herm;
  for (Eigen::Index k = 0; k < dd; ++k) {
    if (sv(k) > tolerance) continue;
    const CVector col = svd.matrixV().col(k);
    const CMatrix x = Eigen::Map<const CMatrix>(col.data(), d, d);
    herm.push_back(detail::hermitian_coords(detail::hermitize(x)));
    herm.push_back(detail::hermitian_coords((x - x.adjoint()) / cplx(0.0, 2.0)));
  }
  if (herm.empty()) throw FixedPointError("superoperator has no eigenvalue 1");

  // Orthonormal real basis of the Hermitian fixed-point space.
  Eigen::MatrixXd span(dd, static_cast<Eigen::Index>(herm.size()));
  for (std::size_t i = 0; i < herm.size(); ++i) span.col(static_cast<Eigen::Index>(i)) = herm[i];
  Eigen::JacobiSVD<Eigen::MatrixXd> span_svd(span, Eigen::ComputeThinU);
  const double top = span_svd.singularValues()(0);
  Eigen::Index rank = 0;
  while (rank < span_svd.singularValues().size() && span_svd.singularValues()(rank) > 1e-8 * top) {
    ++rank;
  }
  const Eigen::MatrixXd q = span_svd.matrixU().leftCols(rank);

  // Split off the trace direction; the traceless complement spans the affine
  // directions.
  const Eigen::VectorXd trace_coords = detail::hermitian_coords(CMatrix::Identity(d, d));
  const Eigen::VectorXd tau = q.transpose() * trace_coords;
  if (tau.norm() < tol::algebraic) throw FixedPointError("no unit-trace fixed point exists");
  Eigen::JacobiSVD<Eigen::MatrixXd> tau_svd(tau.transpose(), Eigen::ComputeFullV);
  std::vector<CMatrix> directions;
  for (Eigen::Index k = 1; k < rank; ++k) {
    directions.push_back(detail::hermitian_from_coords(q * tau_svd.matrixV().col(k), d));
  }
  const CMatrix particular =
      detail::hermitian_from_coords(q * (tau / tau.squaredNorm()), d);

  const CMatrix base = cesaro_fixed_point(n);
  const double residual = fixed_point_residual(n, base);
  if (!(residual <= tol::iterative)) {
    throw FixedPointError("iterated fixed point has residual " + std::to_string(residual));
  }
  FixedPointSet set{DensityMatrix(SubsystemLayout({"ctc"}, {n.dim()}), base),
                    std::move(directions)};
  const double gap = set.distance(particular);
  if (!(gap <= tol::iterative)) {
    throw FixedPointError("iterated and eigen-solved fixed points disagree by " + std::to_string(gap));
  }
  return set;
}

// ---------------------------------------------------------------------------
// Maximum-entropy selection
// ---------------------------------------------------------------------------

struct MaxEntropyResult {
  DensityMatrix state;
  double entropy;
  double gradient_norm;
  std::size_t iterations;
  bool boundary;  // ascent stopped on the PSD boundary of the set
};

namespace detail {

inline CMatrix clip_to_state(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(m));
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  const double total = lam.sum();
  if (total <= 0.0) return m;
  lam /= total;
  return es.eigenvectors() * lam.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Projected gradient ascent of the von Neumann entropy over the PSD part of
/// the fixed-point set, with backtracking (Armijo) line search. Stops when
/// the projected gradient has Frobenius norm <= 1e-8, when no step improves
/// the entropy, or after 10,000 iterations.
inline MaxEntropyResult maximize_entropy(const FixedPointSet& set) {
  constexpr double kGradTol = 1e-8;
  constexpr std::size_t kMaxIter = 10000;
  const auto& layout = set.base.layout();
  const auto d = static_cast<Eigen::Index>(set.base.dim());
  const auto m = static_cast<Eigen::Index>(set.directions.size());
  if (m == 0) return {set.base, entropy_bits(set.base), 0.0, 0, false};

  // Start from the projection of I/d, pulled back towards the base point
  // until it is a state.
  Eigen::VectorXd x = set.coordinates(CMatrix::Identity(d, d) / static_cast<double>(d));
  if (ctclab::detail::min_eigenvalue(set.point(x)) < 0.0) {
    double lo = 0.0;
    double hi = 1.0;
    for (int k = 0; k < 60; ++k) {
      const double mid = 0.5 * (lo + hi);
      (ctclab::detail::min_eigenvalue(set.point(mid * x)) >= 0.0 ? lo : hi) = mid;
    }
    x *= 0.5 * lo;
  }

  CMatrix rho = set.point(x);
  double s = entropy_bits(rho);
  double step = 1.0;
  double gnorm = 0.0;
  bool boundary = false;
  std::size_t iter = 0;
  for (; iter < kMaxIter; ++iter) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(detail::hermitize(rho));
    Eigen::VectorXd logs(d);
    for (Eigen::Index i = 0; i < d; ++i) logs(i) = std::log2(std::max(es.eigenvalues()(i), 1e-300));
    const CMatrix log_rho = es.eigenvectors() * logs.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    Eigen::VectorXd g(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      g(i) = -(set.directions[static_cast<std::size_t>(i)] * log_rho).trace().real();
    }
    gnorm = g.norm();
    if (gnorm <= kGradTol) break;

    bool accepted = false;
    step = std::min(1.0, step * 2.0);
    for (; step > 1e-16; step *= 0.5) {
      Eigen::VectorXd trial = x + step * g;
      CMatrix candidate = set.point(trial);
      if (ctclab::detail::min_eigenvalue(candidate) < 0.0) {
        trial = set.coordinates(detail::clip_to_state(candidate));
        candidate = set.point(trial);
        if (ctclab::detail::min_eigenvalue(candidate) < -tol::positivity) continue;
      }
      const double s_trial = entropy_bits(candidate);
      const double predicted = g.dot(trial - x);
      if (s_trial >= s + 1e-4 * std::max(predicted, 0.0) && s_trial > s) {
        x = trial;
        rho = candidate;
        s = s_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      boundary = ctclab::detail::min_eigenvalue(rho) < tol::positivity;
      break;
    }
  }
  CMatrix out = detail::hermitize(rho);
  out /= out.trace().real();
  return {DensityMatrix(layout, out), entropy_bits(out), gnorm, iter, boundary};
}

inline DensityMatrix max_entropy_fixed_point(const FixedPointSet& set) {
  return maximize_entropy(set).state;
}

// ---------------------------------------------------------------------------
// Evolution
// ---------------------------------------------------------------------------

struct DeutschSolution {
  DensityMatrix env;           // reduced state of the entering qubit
  Superoperator map;           // consistency map for the CTC qubit
  FixedPointSet fixed_set;
  MaxEntropyResult ctc;        // selected CTC state
  DensityMatrix emerged;       // emerged qubit after the interaction
  DensityMatrix output;        // Alice's marginal (x) emerged, in the joint's order
};

/// Deutsch evolution of a two-qubit joint state whose `s.entering` qubit
/// traverses the CTC. Alice's marginal is decorrelated from the new Bob qubit.
inline DeutschSolution deutsch_solve(const DensityMatrix& joint, const pctc::WormholeScenario& s) {
  s.validate();
  const auto& layout = joint.layout();
  if (layout.size() != 2 || layout.dims() != std::vector<std::size_t>{2, 2}) {
    throw DimensionError("Deutsch evolution expects a two-qubit joint state");
  }
  layout.index_of(s.entering);
  const std::string alice = layout.labels()[0] == s.entering ? layout.labels()[1] : layout.labels()[0];

  DensityMatrix flipped = joint;
  if (s.flip) {
    auto [l, m] = apply_map(joint, gates::z(), {s.entering});
    flipped = DensityMatrix(std::move(l), detail::hermitize(m));
  }
  DensityMatrix env = partial_trace(flipped, {s.entering});
  Superoperator n = build_ctc_map(s.interaction, env, FeedbackSlot::entering);
  FixedPointSet set = fixed_points(n);
  MaxEntropyResult ctc = maximize_entropy(set);

  const auto pair = SubsystemLayout::qubits({"entering", "emerged"});
  const CMatrix& u = s.interaction.entries();
  const CMatrix after = u * ctclab::detail::kron(env.entries(), ctc.state.entries()) * u.adjoint();
  CMatrix out_b = detail::hermitize(ctclab::detail::partial_trace_matrix(pair, after, {"emerged"}).second);
  DensityMatrix emerged(SubsystemLayout::qubits({s.entering}), out_b);

  DensityMatrix alice_marginal = partial_trace(joint, {alice});
  DensityMatrix output = layout.labels()[0] == alice ? tensor(alice_marginal, emerged)
                                                     : tensor(emerged, alice_marginal);
  return {std::move(env), std::move(n), std::move(set), std::move(ctc), std::move(emerged),
          std::move(output)};
}

inline DensityMatrix deutsch_evolve(const DensityMatrix& joint, const pctc::WormholeScenario& s) {
  return deutsch_solve(joint, s).output;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const Superoperator& n) {
  return nlohmann::json{{"dim", n.dim()},
                        {"vec_convention", std::string(Superoperator::kVecConvention)},
                        {"data", io::detail::write_matrix(n.matrix())}};
}

inline Superoperator superoperator_from_json(const nlohmann::json& j) {
  const auto dim = io::detail::require<std::size_t>(j, "dim");
  const auto n = static_cast<Eigen::Index>(dim * dim);
  return Superoperator(dim, io::detail::read_matrix(j, n, n));
}

inline nlohmann::json to_json(const FixedPointSet& set) {
  nlohmann::json dirs = nlohmann::json::array();
  for (const auto& dmat : set.directions) dirs.push_back(io::to_json(set.base.layout(), dmat));
  return nlohmann::json{{"base", io::to_json(set.base)},
                        {"directions", dirs},
                        {"vec_convention", std::string(Superoperator::kVecConvention)}};
}

}  // namespace ctclab::deutsch
