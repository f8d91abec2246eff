// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

/// @file linalg.hpp
/// @brief Gram-weighted dense linear algebra.
///
/// A `GramSpace` fixes the inner product <u,v>_X = v^H G u on coefficient
/// vectors.  Operators on X are represented either as operator matrices B
/// (acting on coefficients) or as form matrices F = G B, i.e. the Galerkin
/// matrix of the sesquilinear form (u,v) -> <Bu,v>_X.  Storage is always
/// dense; factorizations switch to a sparse backend when a matrix is mostly
/// zeros, which keeps finite element reference spaces of a few thousand
/// unknowns cheap without changing any result.

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace holofredholm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;
using SparseCMatrix = Eigen::SparseMatrix<Complex>;

/// Dimensions above which extreme spectral quantities are estimated with
/// Lanczos instead of dense decompositions.
inline constexpr Index kDenseLimit = 600;

/// Sparse copy of @p a if at most @p max_density of its entries are nonzero
/// and the matrix is large enough for sparsity to pay off.
std::shared_ptr<const SparseCMatrix> sparse_if_sparse(const CMatrix& a, double max_density = 0.05);

/// Matrix product helper that uses a cached sparse copy when available.
class MatrixApplier {
 public:
  MatrixApplier() = default;
  explicit MatrixApplier(const CMatrix& a);
  CMatrix operator()(const CMatrix& x) const;
  CMatrix adjoint_apply(const CMatrix& x) const;
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

 private:
  const CMatrix* dense_ = nullptr;
  std::shared_ptr<const SparseCMatrix> sparse_;
  Index rows_ = 0;
  Index cols_ = 0;
};

/// LU factorization with partial pivoting (dense or sparse backend).
class LuSolver {
 public:
  explicit LuSolver(const CMatrix& a);
  /// Always uses the sparse backend.
  explicit LuSolver(const SparseCMatrix& a);
  Index dim() const { return n_; }
  CMatrix solve(const CMatrix& b) const;
  /// Solves a^H x = b.
  CMatrix solve_adjoint(const CMatrix& b) const;
  /// Reciprocal 1-norm condition number estimate; 0 for a failed factorization.
  double rcond() const { return rcond_; }
  bool is_sparse() const { return static_cast<bool>(sparse_); }

 private:
  struct SparseImpl;
  void factor_sparse(const SparseCMatrix& a, double anorm);
  Index n_ = 0;
  double rcond_ = 0.0;
  std::shared_ptr<const Eigen::PartialPivLU<CMatrix>> dense_;
  std::shared_ptr<const SparseImpl> sparse_;
};

/// Coefficient space with Hermitian positive definite Gram matrix.
///
/// The Cholesky-type factor G = R R^H is computed once and shared by copies.
class GramSpace {
 public:
  /// Validates Hermitian symmetry (1e-13 relative) and positive definiteness.
  explicit GramSpace(CMatrix gram);
  static GramSpace identity(Index n);

  Index dim() const;
  const CMatrix& gram() const;
  bool same_as(const GramSpace& other) const { return impl_ == other.impl_; }

  /// G x
  CMatrix apply(const CMatrix& x) const;
  /// G^{-1} x
  CMatrix solve(const CMatrix& x) const;
  /// R^H x: maps coefficients to coordinates in which the X-norm is Euclidean.
  CMatrix to_iso(const CMatrix& x) const;
  /// R^{-H} y: inverse of to_iso.
  CMatrix from_iso(const CMatrix& y) const;
  /// R^{-1} y: turns a form matrix row side into isometric coordinates.
  CMatrix iso_left(const CMatrix& y) const;
  /// R^{-1} F R^{-H}: the operator G^{-1} F written in isometric coordinates.
  CMatrix form_to_iso(const CMatrix& form) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

Complex x_inner(const GramSpace& space, const CVector& u, const CVector& v);
double x_norm(const GramSpace& space, const CVector& u);

/// X-adjoint of an operator matrix: G^{-1} B^H G.
CMatrix x_adjoint(const GramSpace& space, const CMatrix& b);

struct GsvRange {
  double min = 0.0;
  double max = 0.0;
};

/// Extreme generalized singular values of the operator matrix @p b, i.e.
/// inf and sup of |Bu|_X / |u|_X.  min is 0 for singular B.
GsvRange min_max_gsv(const GramSpace& space, const CMatrix& b);

/// Same as min_max_gsv for the operator G^{-1} @p form.
GsvRange form_gsv(const GramSpace& space, const CMatrix& form);

/// Operator norm of G^{-1} @p form (largest value of form_gsv only).
double form_norm(const GramSpace& space, const CMatrix& form);

/// sup over c of |D c|_{out} / |c|_{in} for a map D between coefficient spaces.
double max_gsv_between(const GramSpace& out, const GramSpace& in, const CMatrix& d);

struct Orthonormalized {
  CMatrix basis;
  Index dropped = 0;
};

/// X-orthonormal basis of span(V) by twice-iterated Gram-Schmidt.  Columns
/// whose remainder falls below rel_tol times the largest input column norm
/// are dropped and counted.
Orthonormalized m_orthonormalize(const GramSpace& space, const CMatrix& v, double rel_tol = 1e-10);

/// Extreme eigenvalues of the Hermitian pencil (H, G) from a Lanczos run in
/// the G-inner product with full reorthogonalization.
struct PencilExtremes {
  double min = 0.0;
  double max = 0.0;
  int steps = 0;
};
PencilExtremes lanczos_extremes(const std::function<CVector(const CVector&)>& apply_h, const GramSpace& space,
                                int max_steps = 200, std::uint64_t seed = 7);

/// Smallest Ritz value of the pencil (H, G) with its X-normalized Ritz
/// vector, from Lanczos started at @p start.
struct RitzPair {
  double value = 0.0;
  CVector vector;
};
RitzPair lanczos_min_pair(const std::function<CVector(const CVector&)>& apply_h, const GramSpace& space,
                          const CVector& start, int max_steps);

/// Euclidean singular values, descending.
RVector singular_values(const CMatrix& a);

/// Orthonormal (Euclidean) basis of the numerical kernel of @p a: right
/// singular vectors with sigma <= rel_tol * sigma_max (or sigma <= abs_floor).
CMatrix kernel_basis(const CMatrix& a, double rel_tol, double abs_floor = 0.0);

/// Deterministic complex Gaussian matrix.
CMatrix random_matrix(Index rows, Index cols, std::uint64_t seed);

}  // namespace holofredholm
