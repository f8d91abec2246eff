// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

/// @file convlab.hpp
/// @brief Convergence studies of Galerkin eigenvalue approximations.
///
/// The finest space of the hierarchy serves as the exact problem.  For an
/// isolated reference eigenvalue lambda0 inside a contour, each level is
/// solved in the same contour and compared against the reference data.

#pragma once

#include <string>
#include <vector>

#include "holofredholm/galerkin.hpp"
#include "holofredholm/nep.hpp"
#include "holofredholm/tco.hpp"

namespace holofredholm {

/// Reference spectral data at the unique eigenvalue inside a contour.
struct ReferenceData {
  Complex lambda0{0.0, 0.0};
  int kappa = 0;
  int dim_g = 0;
  /// X-orthonormal bases: generalized eigenspace, its adjoint counterpart, ker A(lambda0).
  CMatrix g_basis;
  CMatrix g_star_basis;
  CMatrix ker_basis;
};

/// Solves on the reference space.  Throws SetupError unless exactly one
/// eigenvalue lies in the contour.
ReferenceData reference_data(const HolomorphicOpFunction& f, const Contour& c, const SolverOptions& opts = {});

struct Deltas {
  std::vector<double> delta;
  std::vector<double> delta_star;
};

Deltas deltas(const GalerkinHierarchy& h, const ReferenceData& ref);
Deltas deltas(const GalerkinHierarchy& h, const HolomorphicOpFunction& f, const Contour& c,
              const SolverOptions& opts = {});

struct LevelErrors {
  std::size_t n = 0;
  Index dim = 0;
  std::vector<Complex> eigenvalues;
  std::vector<int> algs;
  std::vector<double> eig_errors;
  double err_min = 0.0;
  double err_max = 0.0;
  double mean_error = 0.0;
  double vec_error = 0.0;
  /// Best-approximation defect of ker A(lambda0).
  double ker_defect = 0.0;
  int mult_sum = 0;
  bool empty = true;
};

std::vector<LevelErrors> eigen_errors(const GalerkinHierarchy& h, const HolomorphicOpFunction& f,
                                      const ReferenceData& ref, const Contour& c, const SolverOptions& opts = {});

struct FittedOrders {
  double eig = std::numeric_limits<double>::quiet_NaN();
  double mean = std::numeric_limits<double>::quiet_NaN();
  double vec = std::numeric_limits<double>::quiet_NaN();
  double delta = std::numeric_limits<double>::quiet_NaN();
  double delta_star = std::numeric_limits<double>::quiet_NaN();
};

struct ConvergenceRow {
  std::size_t n = 0;
  Index dim = 0;
  double h = 0.0;
  double delta = 0.0;
  double delta_star = 0.0;
  LevelErrors errors;
};

struct ConvergenceRecord {
  Complex lambda0{0.0, 0.0};
  int kappa = 0;
  int dim_g = 0;
  std::vector<ConvergenceRow> rows;
  FittedOrders orders;
  /// Empty when the fit succeeded, else the reason.
  std::string fit_note;
  std::string to_csv() const;
  std::string to_svg() const;
};

/// Least-squares slope of log(err) against log(h), using points with both
/// positive and finite.  Throws InsufficientDataError with fewer than 3.
double fit_order(const std::vector<double>& h, const std::vector<double>& err);

/// Fills record.orders from its rows (mesh widths taken from the rows).
FittedOrders fit_orders(const ConvergenceRecord& record);

ConvergenceRecord convergence_study(const GalerkinHierarchy& h, const HolomorphicOpFunction& f, const Contour& c,
                                    const std::vector<double>& mesh_widths, const SolverOptions& opts = {});

/// Uniform samples on a circle.
std::vector<Complex> circle_samples(Complex center, double radius, int count);

/// Per level: max over samples of |A_n(z)^{-1}|, infinity when singular.
std::vector<double> resolvent_stability_scan(const GalerkinHierarchy& h, const HolomorphicOpFunction& f,
                                             const std::vector<Complex>& samples);

struct PollutionLevel {
  std::size_t n = 0;
  std::vector<Complex> eigenvalues;
  std::vector<Complex> spurious;
};

/// Discrete eigenvalues in the window farther than tol_match from every
/// reference eigenvalue.
std::vector<PollutionLevel> pollution_scan(const GalerkinHierarchy& h, const HolomorphicOpFunction& f,
                                           const Contour& window, const std::vector<Complex>& reference_spectrum,
                                           double tol_match, const SolverOptions& opts = {});

/// 10x the finest-level error predicted by extrapolating the fitted order, floored at 1e-8.
double pollution_tolerance(const ConvergenceRecord& record);

/// Same rule from a scan: per reference eigenvalue inside the window, the
/// distance to the nearest discrete eigenvalue is fitted against h and
/// extrapolated to the finest level.  NaN when no such eigenvalue admits a fit.
double pollution_tolerance(const std::vector<PollutionLevel>& levels, const std::vector<Complex>& reference_spectrum,
                           const Contour& window, const std::vector<double>& mesh_widths);

/// Recomputes `spurious` on every level for a new matching tolerance.
void flag_spurious(std::vector<PollutionLevel>& levels, const std::vector<Complex>& reference_spectrum,
                   double tol_match);

// Checks on a finished record.  "Late" levels are the final half (rounded up).

/// mult_sum == dim G on every level after the first level with an eigenvalue
/// in the contour, allowing `transitional` exceptions right after it.
CheckResult check_multiplicity(const ConvergenceRecord& r, int transitional = 1);
/// Nearest-eigenvalue distance decreasing over late levels up to 10% slack.
CheckResult check_approximability(const ConvergenceRecord& r);
/// delta_n and delta_n^* non-increasing.
CheckResult check_delta_monotone(const ConvergenceRecord& r, double slack = 1e-12);
/// Fitted eigenvalue order at least (order of delta * delta^*) / kappa - 0.2.
CheckResult check_order_law(const ConvergenceRecord& r);
/// vec_error / (err_max + ker_defect) over late levels exceeds the finest ratio by < 10x.
CheckResult check_vector_bound(const ConvergenceRecord& r);

}  // namespace holofredholm
