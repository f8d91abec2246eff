// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

/// @file tco.hpp
/// @brief Coercivity constants, T-coercivity witnesses and compatibility reports.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "holofredholm/galerkin.hpp"
#include "holofredholm/opfun.hpp"

namespace holofredholm {

/// Numerical-range sweep resolution.
struct CoercivityOptions {
  int angles = 360;
  /// Points of the local refinement around the best angle (spanning +-1 grid step).
  int refine_points = 41;
};

/// inf over unit u of |<Bu,u>_X| for the operator matrix B.
double coercivity_constant(const GramSpace& space, const CMatrix& b, const CoercivityOptions& opts = {});
/// Same for the operator G^{-1} form.
double coercivity_constant_form(const GramSpace& space, const CMatrix& form, const CoercivityOptions& opts = {});

/// sup over unit u_n in X_n of |T u_n - E_n T_n u_n|_X.
double discrete_norm(const GalerkinHierarchy& h, std::size_t n, const CMatrix& t, const CMatrix& tn);

/// P_n T restricted to X_n.
CMatrix default_tn(const GalerkinHierarchy& h, std::size_t n, const CMatrix& t);

using TnBuilder = std::function<CMatrix(const GalerkinHierarchy&, std::size_t, const CMatrix&)>;

/// Bijective T with a compact shift K such that T^*A(z) + K is coercive at
/// the probe points.  K is stored as the form matrix G K.
struct TCWitness {
  CMatrix t;
  CMatrix k_form;
  TnBuilder tn_builder = default_tn;
  std::vector<Complex> probes;
  /// Scale factor found by the shift search (informational).
  double k_scale = 0.0;
  /// Coercivity constant of T^*A + K at the first probe (informational).
  double constant = 0.0;
};

/// Form matrix of T^*A(z) + K.
CMatrix witness_form(const HolomorphicOpFunction& f, const TCWitness& w, Complex z);

/// Checks invertibility of T and positivity of the coercivity constant at
/// every probe.  Returns an empty string when valid, else the reason.
std::string validate_witness(const HolomorphicOpFunction& f, const TCWitness& w);

struct CompatibilityRecord {
  std::size_t n = 0;
  Index dim = 0;
  double disc_norm = 0.0;
  double tn_norm = 0.0;
  double tn_inv_norm = 0.0;
  double stability = 0.0;
};

struct CompatibilityReport {
  std::vector<CompatibilityRecord> records;
  bool verdict = false;
  double tol = 1e-2;
  Complex lambda{0.0, 0.0};
  double t_norm = 0.0;
  double t_inv_norm = 0.0;
  /// |(A + T^{-*}K)^{-1}| on the reference space.
  double reference_stability = 0.0;
  std::string to_csv() const;
};

/// Verdict rule: last discrete norm <= tol and either a tenfold decrease
/// from the first level or every discrete norm below 1e-10.
bool compatibility_verdict(const std::vector<CompatibilityRecord>& records, double tol);

CompatibilityReport compatibility_report(const GalerkinHierarchy& h, const HolomorphicOpFunction& f,
                                         const TCWitness& w, Complex lambda, double tol = 1e-2);

struct CheckResult {
  std::string name;
  bool ok = false;
  std::string detail;
};

/// Norm estimates for T_n on the last half of the levels.
CheckResult check_norm_estimates(const CompatibilityReport& report);
/// Stability entries on the last half of the levels bounded by twice the reference value.
CheckResult check_stability_bound(const CompatibilityReport& report);

}  // namespace holofredholm
