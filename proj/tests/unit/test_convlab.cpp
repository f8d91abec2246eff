// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "holofredholm/convlab.hpp"
#include "holofredholm/errors.hpp"
#include "holofredholm/models.hpp"

using namespace holofredholm;

namespace {

const double kPi2 = M_PI * M_PI;

// Laplacian with a reference of 256 cells; the last level is the reference itself.
const ModelProblem& laplacian() {
  static const ModelProblem mp = build_laplacian({8, 16, 32, 64, 256}, 256);
  return mp;
}

Contour first_mode() { return Contour::circle(kPi2, 4.0, 64); }

ConvergenceRecord synthetic(const std::vector<double>& h, const std::vector<double>& err) {
  ConvergenceRecord r;
  r.kappa = 1;
  r.dim_g = 1;
  for (std::size_t i = 0; i < h.size(); ++i) {
    ConvergenceRow row;
    row.n = i;
    row.h = h[i];
    row.delta = row.delta_star = h[i];
    row.errors.n = i;
    row.errors.empty = false;
    row.errors.err_min = row.errors.err_max = row.errors.mean_error = err[i];
    row.errors.vec_error = h[i];
    row.errors.ker_defect = h[i];
    row.errors.mult_sum = 1;
    r.rows.push_back(row);
  }
  return r;
}

}  // namespace

TEST_CASE("fit_order examples") {
  CHECK(fit_order({0.1, 0.05, 0.025}, {1e-2, 2.5e-3, 6.25e-4}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(fit_order({0.1, 0.05, 0.025}, {3e-3, 3e-3, 3e-3})) < 1e-12);
  CHECK_THROWS_AS(fit_order({0.1, 0.05}, {1e-2, 2.5e-3}), InsufficientDataError);
  // Zero errors are ignored, so only two points remain.
  CHECK_THROWS_AS(fit_order({0.1, 0.05, 0.025}, {1e-2, 0.0, 6.25e-4}), InsufficientDataError);
}

TEST_CASE("fit_orders on a record") {
  const ConvergenceRecord r = synthetic({0.1, 0.05, 0.025, 0.0125}, {1e-2, 2.5e-3, 6.25e-4, 1.5625e-4});
  const FittedOrders o = fit_orders(r);
  CHECK(o.eig == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(o.mean == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(o.vec == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(o.delta == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reference data and deltas on the Laplacian") {
  const ModelProblem& mp = laplacian();
  const ReferenceData ref = reference_data(mp.f, first_mode());
  CHECK(ref.kappa == 1);
  CHECK(ref.dim_g == 1);
  CHECK(std::abs(ref.lambda0 - kPi2) < 1e-3 * kPi2);
  const Deltas d = deltas(mp.hierarchy, ref);
  REQUIRE(d.delta.size() == 5);
  // Self-adjoint: G = G*.
  for (std::size_t n = 0; n < d.delta.size(); ++n) CHECK(std::abs(d.delta[n] - d.delta_star[n]) <= 1e-10);
  // Reference level contains G.
  CHECK(d.delta.back() < 1e-12);
  // First-order decay in h.
  for (std::size_t n = 0; n + 2 < d.delta.size(); ++n) CHECK(d.delta[n + 1] / d.delta[n] == doctest::Approx(0.5).epsilon(0.2));
  CHECK_THROWS_AS(reference_data(mp.f, Contour::circle(2.5 * kPi2, 2.0 * kPi2, 64)), SetupError);
}

TEST_CASE("eigen_errors on the Laplacian") {
  const ModelProblem& mp = laplacian();
  const ReferenceData ref = reference_data(mp.f, first_mode());
  const Deltas d = deltas(mp.hierarchy, ref);
  const std::vector<LevelErrors> errs = eigen_errors(mp.hierarchy, mp.f, ref, first_mode());
  REQUIRE(errs.size() == 5);
  const LevelErrors& last = errs.back();
  CHECK_FALSE(last.empty);
  CHECK(last.err_max < 1e-9 * kPi2);
  CHECK(last.mult_sum == ref.dim_g);
  double lo = 1e300, hi = 0.0;
  for (std::size_t n = 0; n + 1 < errs.size(); ++n) {
    CHECK(errs[n].mult_sum == 1);
    const double ratio = errs[n].err_max / (d.delta[n] * d.delta_star[n]);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  CHECK(hi < 2.0 * lo);
}

TEST_CASE("split Jordan family: cluster radius and mean error") {
  for (double eps : {1e-2, 1e-4}) {
    const ModelProblem mp = build_jordan_split_family(eps);
    const ReferenceData ref = reference_data(mp.f, mp.suggested_contours.back());
    CHECK(ref.kappa == 2);
    CHECK(ref.dim_g == 2);
    const std::vector<LevelErrors> errs = eigen_errors(mp.hierarchy, mp.f, ref, mp.suggested_contours.back());
    const LevelErrors& coarse = errs.front();
    REQUIRE(coarse.eigenvalues.size() == 2);
    // Closed form: -eps +- sqrt(eps (1 + eps)), mean -eps.
    const double root = std::sqrt(eps * (1.0 + eps));
    CHECK(coarse.err_max == doctest::Approx(eps + root).epsilon(1e-6));
    CHECK(coarse.mean_error == doctest::Approx(eps).epsilon(1e-6));
    CHECK(coarse.mult_sum == 2);
  }
}

TEST_CASE("convergence study record and outputs") {
  // Without the reference level, whose errors are pure rounding.
  const ModelProblem mp = build_laplacian({8, 16, 32, 64}, 256);
  const ConvergenceRecord rec = convergence_study(mp.hierarchy, mp.f, first_mode(), mp.mesh_widths);
  CHECK(rec.kappa == 1);
  CHECK(rec.orders.eig == doctest::Approx(2.0).epsilon(0.1));
  CHECK(rec.orders.delta == doctest::Approx(1.0).epsilon(0.1));
  CHECK(check_multiplicity(rec, 0).ok);
  CHECK(check_approximability(rec).ok);
  CHECK(check_delta_monotone(rec).ok);
  CHECK(check_order_law(rec).ok);
  CHECK(check_vector_bound(rec).ok);
  const std::string csv = rec.to_csv();
  CHECK(csv.rfind("n,dim,h,delta,delta_star,err_min,err_max,err_mean,vec_err,mult\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(rec.to_svg().find("<svg") != std::string::npos);
  CHECK_THROWS_AS(convergence_study(mp.hierarchy, mp.f, first_mode(), {0.1}), UsageError);
}

TEST_CASE("checks flag synthetic violations") {
  ConvergenceRecord growing = synthetic({0.1, 0.05, 0.025, 0.0125}, {1e-2, 2.5e-3, 6.25e-4, 1e-3});
  growing.orders = fit_orders(growing);
  CHECK_FALSE(check_approximability(growing).ok);

  ConvergenceRecord lost = synthetic({0.1, 0.05, 0.025, 0.0125}, {1e-2, 2.5e-3, 6.25e-4, 1.5625e-4});
  lost.rows[3].errors.mult_sum = 2;
  CHECK_FALSE(check_multiplicity(lost, 1).ok);
  lost.rows[3].errors.mult_sum = 1;
  lost.rows[1].errors.mult_sum = 0;
  CHECK(check_multiplicity(lost, 1).ok);
  CHECK_FALSE(check_multiplicity(lost, 0).ok);

  ConvergenceRecord delta_up = synthetic({0.1, 0.05, 0.025}, {1e-2, 2.5e-3, 6.25e-4});
  delta_up.rows[2].delta = 1.0;
  CHECK_FALSE(check_delta_monotone(delta_up).ok);

  ConvergenceRecord slow = synthetic({0.1, 0.05, 0.025, 0.0125}, {1e-2, 7e-3, 5e-3, 3.5e-3});
  slow.orders = fit_orders(slow);
  CHECK_FALSE(check_order_law(slow).ok);
}

TEST_CASE("resolvent stability scan") {
  const ModelProblem& mp = laplacian();
  // Between the first two eigenvalues the pencil is invertible; bounded by 1/dist in the energy norm.
  const std::vector<Complex> samples = circle_samples(2.5 * kPi2, 0.5, 16);
  CHECK(samples.size() == 16);
  CHECK(std::abs(samples[0] - (2.5 * kPi2 + 0.5)) < 1e-14);
  const std::vector<double> sups = resolvent_stability_scan(mp.hierarchy, mp.f, samples);
  for (double s : sups) CHECK(std::isfinite(s));

  // Coercive case: shift far left of the spectrum, sup <= 1/coercivity constant.
  const std::vector<Complex> left = circle_samples(-5.0, 1.0, 8);
  const std::vector<double> coercive = resolvent_stability_scan(mp.hierarchy, mp.f, left);
  for (double s : coercive) CHECK(s <= 1.0 + 1e-12);

  // A coarse space whose Rayleigh quotient 1.5 is not an eigenvalue of diag(1, 2, 3).
  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  d(2, 2) = 3.0;
  const HolomorphicOpFunction f(GramSpace::identity(3), {ScalarHolo::constant(1.0), ScalarHolo::polynomial({0.0, -1.0})},
                                {d, CMatrix::Identity(3, 3)});
  CMatrix e0 = CMatrix::Zero(3, 1);
  e0(0, 0) = e0(1, 0) = 1.0;
  const GalerkinHierarchy h(GramSpace::identity(3), {e0, CMatrix::Identity(3, 3)});
  const std::vector<double> spurious = resolvent_stability_scan(h, f, {Complex(1.5, 0.0)});
  CHECK(std::isinf(spurious[0]));
  CHECK(std::isfinite(spurious[1]));
}

TEST_CASE("pollution scan on a coercive pencil") {
  const ModelProblem& mp = laplacian();
  const Contour window = Contour::circle(2.5 * kPi2, 2.0 * kPi2, 64);
  const std::vector<Complex> reference = {kPi2, 4.0 * kPi2};
  // P1 overshoots 4 pi^2 by about 2 on the coarsest level.
  const std::vector<PollutionLevel> levels = pollution_scan(mp.hierarchy, mp.f, window, reference, 5.0);
  REQUIRE(levels.size() == 5);
  for (const auto& l : levels) CHECK(l.spurious.empty());
  CHECK(levels.back().eigenvalues.size() == 2);
  const double tol = pollution_tolerance(levels, reference, window, mp.mesh_widths);
  CHECK(std::isfinite(tol));
  CHECK(tol >= 1e-8);
  std::vector<PollutionLevel> strict = levels;
  flag_spurious(strict, reference, 1e-12);
  CHECK_FALSE(strict.front().spurious.empty());
  CHECK_THROWS_AS(pollution_scan(mp.hierarchy, mp.f, window, reference, 0.0), UsageError);
}

TEST_CASE("pollution tolerance rules") {
  const ConvergenceRecord r = synthetic({0.1, 0.05, 0.025}, {1e-2, 2.5e-3, 6.25e-4});
  CHECK(pollution_tolerance(r) == doctest::Approx(6.25e-3).epsilon(1e-10));
  const ConvergenceRecord tiny = synthetic({0.1, 0.05, 0.025}, {1e-12, 1e-13, 1e-14});
  CHECK(pollution_tolerance(tiny) == 1e-8);

  std::vector<PollutionLevel> two(2);
  two[0].eigenvalues = {1.1};
  two[1].eigenvalues = {1.01};
  CHECK(std::isnan(pollution_tolerance(two, {1.0}, Contour::circle(1.0, 0.5), {0.1, 0.05})));
  std::vector<PollutionLevel> three(3);
  three[0].eigenvalues = {1.04};
  three[1].eigenvalues = {1.01};
  three[2].eigenvalues = {1.0025};
  CHECK(pollution_tolerance(three, {1.0, 5.0}, Contour::circle(1.0, 0.5), {0.1, 0.05, 0.025}) == doctest::Approx(0.025).epsilon(1e-8));
}
