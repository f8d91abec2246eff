// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

/// @file galerkin.hpp
/// @brief Nested Galerkin subspaces of a reference space.
///
/// Level n is spanned by the columns of an embedding E_n (reference
/// coefficients of the level basis).  Its own Gram matrix is E_n^H G E_n.

#pragma once

#include <vector>

#include "holofredholm/linalg.hpp"
#include "holofredholm/opfun.hpp"

namespace holofredholm {

class GalerkinHierarchy {
 public:
  /// Validates full column rank, strictly increasing dimensions and
  /// nestedness (columns of E_n in span E_{n+1} within 1e-10).
  GalerkinHierarchy(GramSpace reference, std::vector<CMatrix> embeddings);

  const GramSpace& reference() const { return reference_; }
  std::size_t num_levels() const { return levels_.size(); }
  Index level_dim(std::size_t n) const;
  const CMatrix& embedding(std::size_t n) const;
  /// Coarse space with Gram E_n^H G E_n (factorized once).
  const GramSpace& level_space(std::size_t n) const;

  /// Orthogonal projection P_n u, returned as reference coefficients.
  CMatrix project(std::size_t n, const CMatrix& u) const;
  /// Level coefficients c with E_n c = P_n u.
  CMatrix coarse_coefficients(std::size_t n, const CMatrix& u) const;
  /// E_n^H F E_n for a reference form matrix F.
  CMatrix compress_form(std::size_t n, const CMatrix& form) const;
  /// Operator matrix of P_n B restricted to X_n, for a reference operator B.
  CMatrix compress_operator(std::size_t n, const CMatrix& op) const;

 private:
  struct Level {
    CMatrix embedding;
    GramSpace space;
    // E_n^H G, reused by every projection.
    CMatrix embedding_gram_adj;
  };
  void check_level(std::size_t n) const;

  GramSpace reference_;
  std::vector<Level> levels_;
};

/// A_n(z) = P_n A(z)|_{X_n} on the level space.
HolomorphicOpFunction compress(const GalerkinHierarchy& h, std::size_t n, const HolomorphicOpFunction& f);

/// max over unit u in span(Q) of |(I - P_n) u|_X for X-orthonormal Q.
double best_approx_defect(const GalerkinHierarchy& h, std::size_t n, const CMatrix& q);

/// For each probe column u, checks that |u - P_n u|_X is non-increasing in n
/// up to `slack`.  Returns the largest violation (0 when monotone).
double projection_monotonicity_violation(const GalerkinHierarchy& h, const CMatrix& probes, double slack = 1e-12);

}  // namespace holofredholm
