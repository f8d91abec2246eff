// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

/// @file opfun.hpp
/// @brief Holomorphic operator functions in sum-of-products form.
///
/// A(z) = sum_i f_i(z) A_i with scalar holomorphic f_i and constant matrices.
/// The constant parts are stored as form matrices F_i = G A_i, which is what
/// Galerkin assembly produces; operator matrices are recovered on demand.

#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "holofredholm/linalg.hpp"

namespace holofredholm {

/// Poles closer than this to an evaluation point raise DomainError.
inline constexpr double kPoleGuard = 1e-12;

/// Scalar holomorphic factor: polynomial, rational, or an opaque callable.
class ScalarHolo {
 public:
  enum class Kind { Polynomial, Rational, Opaque };

  /// Coefficients in ascending powers.
  static ScalarHolo polynomial(std::vector<Complex> coeffs);
  static ScalarHolo constant(Complex c) { return polynomial({c}); }
  /// f(z) = z
  static ScalarHolo identity() { return polynomial({0.0, 1.0}); }
  /// num / den, both in ascending powers.  Poles are the roots of den.
  static ScalarHolo rational(std::vector<Complex> num, std::vector<Complex> den);
  /// Black-box function; derivatives up to max_order via Cauchy quadrature.
  static ScalarHolo opaque(std::function<Complex(Complex)> f, std::vector<Complex> poles, int max_order,
                           std::string label = "opaque");

  Kind kind() const { return kind_; }
  const std::vector<Complex>& poles() const { return poles_; }
  const std::vector<Complex>& numerator() const { return num_; }
  const std::vector<Complex>& denominator() const { return den_; }
  int max_order() const { return max_order_; }

  /// Distance from z to the nearest pole (infinity without poles).
  double pole_distance(Complex z) const;
  /// Throws DomainError naming the pole if z is within kPoleGuard of one.
  void check_point(Complex z) const;

  Complex operator()(Complex z) const;
  /// j-th derivative: exact for closed forms, Cauchy quadrature for opaque.
  Complex derivative(Complex z, int j) const;
  /// (j!/2 pi i) integral of f(w)/(w-z)^{j+1} on |w-z| = radius, trapezoid rule.
  Complex cauchy_derivative(Complex z, int j, double radius, int nodes = 64) const;
  /// z -> conj(f(conj z)).
  ScalarHolo conj_reflected() const;
  /// True if conj_reflected() is the same function (real coefficients).
  bool is_real() const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::Polynomial;
  std::vector<Complex> num_;
  std::vector<Complex> den_;
  std::vector<Complex> poles_;
  std::function<Complex(Complex)> fn_;
  int max_order_ = 0;
  std::string label_;
};

/// Bounding disk plus excluded points.
struct Domain {
  Complex center{0.0, 0.0};
  double radius = std::numeric_limits<double>::infinity();
  std::vector<Complex> poles;
  bool contains(Complex z) const;
};

class HolomorphicOpFunction {
 public:
  /// Terms given as form matrices F_i = G A_i.
  HolomorphicOpFunction(GramSpace space, std::vector<ScalarHolo> scalars, std::vector<CMatrix> forms,
                        Domain domain = {});
  /// Terms given as operator matrices A_i.
  static HolomorphicOpFunction from_operators(const GramSpace& space, std::vector<ScalarHolo> scalars,
                                              const std::vector<CMatrix>& ops, Domain domain = {});

  const GramSpace& space() const { return space_; }
  Index dim() const { return space_.dim(); }
  std::size_t num_terms() const { return scalars_.size(); }
  const ScalarHolo& scalar(std::size_t i) const { return scalars_.at(i); }
  const CMatrix& form(std::size_t i) const { return forms_.at(i); }
  /// Operator matrix G^{-1} F_i.
  CMatrix op_matrix(std::size_t i) const;
  const Domain& domain() const { return domain_; }

  /// Throws DomainError outside the domain or near a pole.
  void check_point(Complex z) const;
  double pole_distance(Complex z) const;

  CMatrix evaluate(Complex z) const;
  CMatrix evaluate_form(Complex z) const;
  CMatrix derivative(Complex z, int j) const;
  CMatrix derivative_form(Complex z, int j) const;
  /// LU of the form F(z); assembled sparsely when every term is sparse.
  LuSolver factorize(Complex z) const;

  /// z -> A(conj z)^*, adjoint in the X-inner product.
  HolomorphicOpFunction adjoint_function() const;
  /// True if the function coincides with its adjoint function.
  bool is_self_adjoint(double rel_tol = 1e-13) const;

  /// X-operator norms of the A_i, computed once.
  const std::vector<double>& term_norms() const;
  /// Upper bound sum_i |f_i(z)| |A_i|_X for the operator norm of A(z).
  double norm_bound(Complex z) const;

 private:
  GramSpace space_;
  std::vector<ScalarHolo> scalars_;
  std::vector<CMatrix> forms_;
  Domain domain_;
  struct Cache;
  std::shared_ptr<Cache> cache_;
};

/// Trapezoid approximation of the contour integral of A(z) dz over the circle
/// |z - center| = radius; vanishes for holomorphic A.
CMatrix contour_integral(const HolomorphicOpFunction& f, Complex center, double radius, int nodes = 64);

}  // namespace holofredholm
