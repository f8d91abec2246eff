// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

/// @file nep.hpp
/// @brief Contour-integral eigensolver and local spectral structure.
///
/// Eigenvalues inside an ellipse are extracted from block-Hankel moment
/// matrices of A(z)^{-1} V.  Jordan structure at an eigenvalue is read off
/// the kernel dimensions of block-Toeplitz matrices built from the Taylor
/// coefficients A^{(j)}/j!.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "holofredholm/opfun.hpp"

namespace holofredholm {

/// Axis-aligned ellipse with trapezoid quadrature nodes.
struct Contour {
  Complex center{0.0, 0.0};
  double rx = 1.0;
  double ry = 1.0;
  int nodes = 64;

  static Contour circle(Complex center, double radius, int nodes = 64) { return {center, radius, radius, nodes}; }
  double radius() const { return std::max(rx, ry); }
  /// Strictly inside the ellipse.
  bool contains(Complex z) const;
  Contour conjugate() const { return {std::conj(center), rx, ry, nodes}; }
  /// Throws UsageError for malformed contours (nonpositive radii, fewer than 16 nodes).
  void validate() const;
};

struct SolverOptions {
  /// Probe block width; clamped to the problem dimension.
  int probe_rank = 8;
  double rank_tol = 1e-8;
  /// Eigenvalues closer than cluster_tol * contour radius are merged.
  double cluster_tol = 1e-8;
  /// Residual bound relative to |A(lambda)|_X.
  double residual_tol = 1e-8;
  int min_moments = 2;
  int max_moments = 8;
  /// Quadrature nodes with reciprocal condition below 1/max_condition are rejected.
  double max_condition = 1e14;
  std::uint64_t seed = 20240607;
};

struct Eigenpair {
  Complex lambda{0.0, 0.0};
  int geo = 0;
  int alg = 0;
  int kappa = 0;
  /// X-orthonormal basis of ker A(lambda).
  CMatrix vectors;
  /// max over the basis of |A(lambda) v|_X.
  double residual = 0.0;
  /// Sum of |f_i(lambda)| |A_i|_X, the scale for relative tolerances.
  double scale = 0.0;
};

struct SpectralResult {
  std::vector<Eigenpair> eigenvalues;
  int total_alg = 0;
  std::uint64_t seed = 0;
  int moments = 0;
  /// X-orthonormal basis of the moment range (contains every generalized eigenvector).
  CMatrix moment_basis;
  std::string to_csv() const;
};

SpectralResult contour_eigensolve(const HolomorphicOpFunction& f, const Contour& c, const SolverOptions& opts = {});

struct KappaResult {
  int kappa = 0;
  int alg = 0;
  /// k_1, k_2, ...: kernel dimensions of the block-Toeplitz matrices.
  std::vector<Index> kernel_dims;
};

/// Chain length and algebraic multiplicity at an eigenvalue.  A nonempty
/// @p subspace (X-orthonormal columns containing the generalized eigenspace)
/// restricts the chain unknowns, which keeps large problems cheap.
KappaResult jordan_kappa(const HolomorphicOpFunction& f, Complex lambda0, int max_m = 8, double rank_tol = 1e-8,
                         const CMatrix& subspace = CMatrix());

/// X-orthonormal basis of the generalized eigenspace at lambda0.
CMatrix generalized_eigenspace(const HolomorphicOpFunction& f, Complex lambda0, int max_m = 8,
                               double rank_tol = 1e-8, const CMatrix& subspace = CMatrix());

/// sum lambda * alg / dim_ref over the eigenvalues in @p r.
Complex weighted_mean(const SpectralResult& r, int dim_ref);

}  // namespace holofredholm
