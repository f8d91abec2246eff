// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

#include "holofredholm/tco.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "holofredholm/errors.hpp"
#include "holofredholm/parallel.hpp"
#include "holofredholm/report.hpp"

namespace holofredholm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr Index kExactSweepLimit = 64;
constexpr int kColdSteps = 40;
constexpr int kWarmSteps = 10;
constexpr int kFinalSteps = 200;
constexpr int kProbeDirections = 8;

// s(theta) = smallest eigenvalue of cos(theta) A - sin(theta) B, where A and B
// are the Hermitian and skew-Hermitian parts of the form, in the X-inner product.
class HermitianSweep {
 public:
  HermitianSweep(const GramSpace& space, const CMatrix& form) : space_(space) {
    if (space.dim() <= kDenseLimit) {
      const CMatrix iso = space.form_to_iso(form);
      re_ = 0.5 * (iso + iso.adjoint());
      im_ = Complex(0.0, -0.5) * (iso - iso.adjoint());
      iso_space_ = std::make_unique<GramSpace>(GramSpace::identity(space.dim()));
    } else {
      re_ = 0.5 * (form + form.adjoint());
      im_ = Complex(0.0, -0.5) * (form - form.adjoint());
    }
    apply_re_ = MatrixApplier(re_);
    apply_im_ = MatrixApplier(im_);
  }

  bool dense() const { return space_.dim() <= kExactSweepLimit; }

  double exact(double theta) const {
    const CMatrix h = std::cos(theta) * re_ - std::sin(theta) * im_;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(h, Eigen::EigenvaluesOnly);
    return eig.eigenvalues()(0);
  }

  // Final value at theta; iterative above kDenseLimit.
  double final_value(double theta, const CVector& start) const {
    if (space_.dim() <= kDenseLimit) return exact(theta);
    return ritz(theta, start, kFinalSteps).value;
  }

  RitzPair ritz(double theta, const CVector& start, int steps) const {
    const double c = std::cos(theta), s = std::sin(theta);
    return lanczos_min_pair([&](const CVector& u) { return CVector(c * apply_re_(u) - s * apply_im_(u)); }, sp(),
                            start, steps);
  }

  // Point <B u, u> of the numerical range for an X-unit vector u.
  Complex range_point(const CVector& u) const {
    const double a = std::real(u.dot(apply_re_(u).col(0)));
    const double b = std::real(u.dot(apply_im_(u).col(0)));
    return {a, b};
  }

  CVector random_start() const { return random_matrix(space_.dim(), 1, 7).col(0); }

 private:
  const GramSpace& sp() const { return iso_space_ ? *iso_space_ : space_; }

  const GramSpace& space_;
  std::unique_ptr<GramSpace> iso_space_;
  CMatrix re_;
  CMatrix im_;
  MatrixApplier apply_re_;
  MatrixApplier apply_im_;
};

// True when the origin lies in the convex hull of the points (a segment
// through the origin counts, which covers Hermitian forms).
bool origin_enclosed(const std::vector<Complex>& pts) {
  std::vector<double> angles;
  for (const Complex& p : pts) {
    if (std::abs(p) == 0.0) return false;
    angles.push_back(std::arg(p));
  }
  if (angles.size() < 2) return false;
  std::sort(angles.begin(), angles.end());
  double gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
  return gap <= std::numbers::pi + 1e-12;
}

template <class Eval>
std::pair<std::size_t, double> argmax(std::size_t count, Eval eval) {
  std::size_t best = 0;
  double best_value = -kInf;
  for (std::size_t k = 0; k < count; ++k) {
    const double v = eval(k);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  return {best, best_value};
}

}  // namespace

double coercivity_constant_form(const GramSpace& space, const CMatrix& form, const CoercivityOptions& opts) {
  if (form.rows() != space.dim() || form.cols() != space.dim()) {
    throw UsageError("coercivity_constant: matrix does not match the space dimension");
  }
  if (opts.angles < 1 || opts.refine_points < 1) throw UsageError("coercivity_constant: need positive sweep sizes");
  const HermitianSweep sweep(space, form);
  const double step = 2.0 * std::numbers::pi / opts.angles;
  const double fine_step = opts.refine_points > 1 ? 2.0 * step / (opts.refine_points - 1) : 0.0;

  if (sweep.dense()) {
    std::vector<double> values(static_cast<size_t>(opts.angles));
    parallel_for(values.size(), [&](std::size_t k) { values[k] = sweep.exact(step * static_cast<double>(k)); });
    auto [best, best_value] = argmax(values.size(), [&](std::size_t k) { return values[k]; });
    double theta = step * static_cast<double>(best);
    if (opts.refine_points > 1) {
      std::vector<double> fine(static_cast<size_t>(opts.refine_points));
      parallel_for(fine.size(), [&](std::size_t k) {
        fine[k] = sweep.exact(theta - step + fine_step * static_cast<double>(k));
      });
      best_value = std::max(best_value, argmax(fine.size(), [&](std::size_t k) { return fine[k]; }).second);
    }
    return std::max(0.0, best_value);
  }

  // Iterative path.  Points of the numerical range enclosing the origin
  // certify a zero constant before any sweep.
  std::vector<Complex> pts;
  for (int k = 0; k < kProbeDirections; ++k) {
    const RitzPair r = sweep.ritz(2.0 * std::numbers::pi * k / kProbeDirections, sweep.random_start(), kColdSteps);
    pts.push_back(sweep.range_point(r.vector));
  }
  if (origin_enclosed(pts)) return 0.0;

  // Sequential sweep; each angle starts from the previous Ritz vector.
  CVector v = sweep.ritz(0.0, sweep.random_start(), kColdSteps).vector;
  double best_theta = 0.0, best_value = -kInf;
  CVector best_vec = v;
  for (int k = 0; k < opts.angles; ++k) {
    const double theta = step * k;
    const RitzPair r = sweep.ritz(theta, v, kWarmSteps);
    v = r.vector;
    if (r.value > best_value) {
      best_value = r.value;
      best_theta = theta;
      best_vec = v;
    }
  }
  if (opts.refine_points > 1) {
    const double centre = best_theta;
    v = best_vec;
    for (int k = 0; k < opts.refine_points; ++k) {
      const double theta = centre - step + fine_step * k;
      const RitzPair r = sweep.ritz(theta, v, kWarmSteps);
      v = r.vector;
      if (r.value > best_value) {
        best_value = r.value;
        best_theta = theta;
        best_vec = v;
      }
    }
  }
  return std::max(0.0, sweep.final_value(best_theta, best_vec));
}

double coercivity_constant(const GramSpace& space, const CMatrix& b, const CoercivityOptions& opts) {
  if (b.rows() != space.dim() || b.cols() != space.dim()) {
    throw UsageError("coercivity_constant: matrix does not match the space dimension");
  }
  return coercivity_constant_form(space, space.apply(b), opts);
}

double discrete_norm(const GalerkinHierarchy& h, std::size_t n, const CMatrix& t, const CMatrix& tn) {
  const Index dim = h.level_dim(n);
  const Index ref = h.reference().dim();
  if (t.rows() != ref || t.cols() != ref) throw UsageError("discrete_norm: T does not match the reference dimension");
  if (tn.rows() != dim || tn.cols() != dim) throw UsageError("discrete_norm: T_n does not match the level dimension");
  const CMatrix& e = h.embedding(n);
  const CMatrix d = MatrixApplier(t)(e) - e * tn;
  return max_gsv_between(h.reference(), h.level_space(n), d);
}

CMatrix default_tn(const GalerkinHierarchy& h, std::size_t n, const CMatrix& t) { return h.compress_operator(n, t); }

CMatrix witness_form(const HolomorphicOpFunction& f, const TCWitness& w, Complex z) {
  // Form of T^*A is T^H G A = T^H F.
  return MatrixApplier(w.t).adjoint_apply(f.evaluate_form(z)) + w.k_form;
}

std::string validate_witness(const HolomorphicOpFunction& f, const TCWitness& w) {
  const Index n = f.dim();
  if (w.t.rows() != n || w.t.cols() != n || w.k_form.rows() != n || w.k_form.cols() != n) {
    return "witness matrices do not match the space dimension";
  }
  const GsvRange r = min_max_gsv(f.space(), w.t);
  if (!(r.min > 1e-10)) return "T is not invertible";
  for (const auto& z : w.probes) {
    const double c = coercivity_constant_form(f.space(), witness_form(f, w, z));
    if (!(c > 0.0)) {
      std::ostringstream msg;
      msg << "T^*A + K is not coercive at " << z;
      return msg.str();
    }
  }
  return {};
}

bool compatibility_verdict(const std::vector<CompatibilityRecord>& records, double tol) {
  if (records.empty()) return false;
  const double first = records.front().disc_norm;
  const double last = records.back().disc_norm;
  if (!(last <= tol)) return false;
  bool all_exact = true;
  for (const auto& r : records) all_exact = all_exact && r.disc_norm <= 1e-10;
  return all_exact || first >= 10.0 * last;
}

CompatibilityReport compatibility_report(const GalerkinHierarchy& h, const HolomorphicOpFunction& f,
                                         const TCWitness& w, Complex lambda, double tol) {
  if (!(tol > 0.0)) throw UsageError("compatibility_report: tolerance must be positive");
  const GramSpace& ref = h.reference();
  if (f.dim() != ref.dim()) throw UsageError("compatibility_report: function does not live on the reference");
  if (w.t.rows() != ref.dim() || w.t.cols() != ref.dim()) throw UsageError("compatibility_report: T has wrong shape");
  f.check_point(lambda);

  CompatibilityReport report;
  report.tol = tol;
  report.lambda = lambda;
  const GsvRange tr = min_max_gsv(ref, w.t);
  if (!(tr.min > 1e-10)) throw UsageError("compatibility_report: T is not invertible");
  report.t_norm = tr.max;
  report.t_inv_norm = 1.0 / tr.min;

  // Form of T^{-*}K is T^{-H} G K.
  const CMatrix shift_form = LuSolver(w.t).solve_adjoint(w.k_form);
  const CMatrix a_form = f.evaluate_form(lambda);
  {
    const GsvRange s = form_gsv(ref, a_form + shift_form);
    report.reference_stability = s.min > 0.0 ? 1.0 / s.min : kInf;
  }

  report.records.resize(h.num_levels());
  parallel_for(h.num_levels(), [&](std::size_t n) {
    CompatibilityRecord& rec = report.records[n];
    rec.n = n;
    rec.dim = h.level_dim(n);
    const CMatrix tn = w.tn_builder(h, n, w.t);
    rec.disc_norm = discrete_norm(h, n, w.t, tn);
    const GsvRange g = min_max_gsv(h.level_space(n), tn);
    rec.tn_norm = g.max;
    rec.tn_inv_norm = g.min > 0.0 ? 1.0 / g.min : kInf;
    const CMatrix level_form = h.compress_form(n, a_form) + h.compress_form(n, shift_form);
    const GsvRange s = form_gsv(h.level_space(n), level_form);
    rec.stability = s.min > 0.0 ? 1.0 / s.min : kInf;
  });
  report.verdict = compatibility_verdict(report.records, tol);
  return report;
}

std::string CompatibilityReport::to_csv() const {
  std::string out = csv_line({"n", "dim", "disc_norm", "tn_norm", "tn_inv_norm", "stability"});
  for (const auto& r : records) {
    out += csv_line({std::to_string(r.n), std::to_string(r.dim), format_double(r.disc_norm), format_double(r.tn_norm),
                     format_double(r.tn_inv_norm), format_double(r.stability)});
  }
  return out;
}

namespace {

std::size_t late_start(std::size_t count) { return count / 2; }

}  // namespace

CheckResult check_norm_estimates(const CompatibilityReport& report) {
  CheckResult res{"norm estimates for T_n", true, {}};
  std::ostringstream detail;
  const auto& recs = report.records;
  for (std::size_t i = late_start(recs.size()); i < recs.size(); ++i) {
    const auto& r = recs[i];
    const double upper = report.t_norm + r.disc_norm + 1e-10 * report.t_norm;
    const bool ok = r.tn_norm >= report.t_norm / 3.0 && r.tn_norm <= upper && r.tn_inv_norm <= 2.0 * report.t_inv_norm;
    if (!ok) {
      res.ok = false;
      detail << "level " << r.n << ": |T_n|=" << r.tn_norm << " |T_n^-1|=" << r.tn_inv_norm << "; ";
    }
  }
  if (res.ok) {
    detail << "|T|=" << report.t_norm << ", |T^-1|=" << report.t_inv_norm << "; bounds hold on the last "
           << recs.size() - late_start(recs.size()) << " levels";
  }
  res.detail = detail.str();
  return res;
}

CheckResult check_stability_bound(const CompatibilityReport& report) {
  CheckResult res{"uniform stability bound", true, {}};
  const auto& recs = report.records;
  double worst = 0.0;
  for (std::size_t i = late_start(recs.size()); i < recs.size(); ++i) worst = std::max(worst, recs[i].stability);
  res.ok = std::isfinite(report.reference_stability) && worst <= 2.0 * report.reference_stability;
  std::ostringstream detail;
  detail << "late sup " << worst << " vs reference " << report.reference_stability;
  res.detail = detail.str();
  return res;
}

}  // namespace holofredholm
