// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

#include "holofredholm/convlab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "holofredholm/errors.hpp"
#include "holofredholm/parallel.hpp"
#include "holofredholm/report.hpp"

namespace holofredholm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

struct LineFit {
  double slope = kNaN;
  double intercept = kNaN;
};

LineFit fit_line(const std::vector<double>& h, const std::vector<double>& err) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < std::min(h.size(), err.size()); ++i) {
    if (h[i] > 0 && err[i] > 0 && std::isfinite(h[i]) && std::isfinite(err[i])) {
      xs.push_back(std::log(h[i]));
      ys.push_back(std::log(err[i]));
    }
  }
  if (xs.size() < 3) {
    std::ostringstream msg;
    msg << "order fit needs at least 3 levels with positive errors, got " << xs.size();
    throw InsufficientDataError(msg.str());
  }
  const double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw InsufficientDataError("order fit needs distinct mesh widths");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

double try_fit(const std::vector<double>& h, const std::vector<double>& err) {
  try {
    return fit_line(h, err).slope;
  } catch (const InsufficientDataError&) {
    return kNaN;
  }
}

std::size_t late_start(std::size_t count) { return count / 2; }

// Largest |(I - P_ker) E v| over unit v in span(vectors).
double kernel_distance(const GramSpace& ref, const CMatrix& ker, const CMatrix& lifted) {
  if (lifted.cols() == 0) return 0.0;
  const CMatrix d = lifted - ker * (ker.adjoint() * ref.apply(lifted));
  return max_gsv_between(ref, GramSpace::identity(lifted.cols()), d);
}

SpectralResult solve_single(const HolomorphicOpFunction& f, const Contour& c, const SolverOptions& opts,
                            const char* what, Complex* lambda) {
  SpectralResult r = contour_eigensolve(f, c, opts);
  if (r.eigenvalues.size() != 1) {
    std::ostringstream msg;
    msg << what << ": the contour must contain exactly one eigenvalue, found " << r.eigenvalues.size();
    throw SetupError(msg.str());
  }
  *lambda = r.eigenvalues[0].lambda;
  return r;
}

CMatrix eigenspace_basis(const HolomorphicOpFunction& f, const SpectralResult& r, double rank_tol) {
  const Eigenpair& e = r.eigenvalues[0];
  if (e.alg == e.geo) return e.vectors;
  const CMatrix sub = f.dim() > 64 ? r.moment_basis : CMatrix();
  return generalized_eigenspace(f, e.lambda, e.alg + 1, rank_tol, sub);
}

}  // namespace

ReferenceData reference_data(const HolomorphicOpFunction& f, const Contour& c, const SolverOptions& opts) {
  ReferenceData ref;
  const SpectralResult r = solve_single(f, c, opts, "reference solve", &ref.lambda0);
  const Eigenpair& e = r.eigenvalues[0];
  ref.kappa = e.kappa;
  ref.dim_g = e.alg;
  ref.ker_basis = e.vectors;
  ref.g_basis = eigenspace_basis(f, r, opts.rank_tol);
  if (f.is_self_adjoint() && c.center.imag() == 0.0 && c.rx > 0 && c.ry > 0) {
    // A symmetric contour with a unique eigenvalue forces it to be real, so
    // the adjoint problem has the same generalized eigenspace.
    ref.g_star_basis = ref.g_basis;
  } else {
    const HolomorphicOpFunction adj = f.adjoint_function();
    Complex mu;
    const SpectralResult ra = solve_single(adj, c.conjugate(), opts, "adjoint reference solve", &mu);
    ref.g_star_basis = eigenspace_basis(adj, ra, opts.rank_tol);
  }
  return ref;
}

Deltas deltas(const GalerkinHierarchy& h, const ReferenceData& ref) {
  Deltas d;
  d.delta.resize(h.num_levels());
  d.delta_star.resize(h.num_levels());
  parallel_for(h.num_levels(), [&](std::size_t n) {
    d.delta[n] = best_approx_defect(h, n, ref.g_basis);
    d.delta_star[n] = best_approx_defect(h, n, ref.g_star_basis);
  });
  return d;
}

Deltas deltas(const GalerkinHierarchy& h, const HolomorphicOpFunction& f, const Contour& c, const SolverOptions& opts) {
  return deltas(h, reference_data(f, c, opts));
}

std::vector<LevelErrors> eigen_errors(const GalerkinHierarchy& h, const HolomorphicOpFunction& f,
                                      const ReferenceData& ref, const Contour& c, const SolverOptions& opts) {
  std::vector<LevelErrors> out(h.num_levels());
  const GramSpace& rs = h.reference();
  parallel_for(h.num_levels(), [&](std::size_t n) {
    LevelErrors& row = out[n];
    row.n = n;
    row.dim = h.level_dim(n);
    row.ker_defect = best_approx_defect(h, n, ref.ker_basis);
    const SpectralResult r = contour_eigensolve(compress(h, n, f), c, opts);
    if (r.eigenvalues.empty()) {
      row.err_min = row.err_max = row.mean_error = row.vec_error = kNaN;
      return;
    }
    row.empty = false;
    row.err_min = kInf;
    for (const auto& e : r.eigenvalues) {
      const double err = std::abs(e.lambda - ref.lambda0);
      row.eigenvalues.push_back(e.lambda);
      row.algs.push_back(e.alg);
      row.eig_errors.push_back(err);
      row.err_min = std::min(row.err_min, err);
      row.err_max = std::max(row.err_max, err);
      row.mult_sum += e.alg;
      row.vec_error = std::max(row.vec_error, kernel_distance(rs, ref.ker_basis, h.embedding(n) * e.vectors));
    }
    row.mean_error = std::abs(weighted_mean(r, ref.dim_g) - ref.lambda0);
  });
  return out;
}

double fit_order(const std::vector<double>& h, const std::vector<double>& err) { return fit_line(h, err).slope; }

FittedOrders fit_orders(const ConvergenceRecord& record) {
  std::vector<double> h, eig, mean, vec, d, ds;
  for (const auto& row : record.rows) {
    if (row.errors.empty) continue;
    h.push_back(row.h);
    eig.push_back(row.errors.err_max);
    mean.push_back(row.errors.mean_error);
    vec.push_back(row.errors.vec_error);
    d.push_back(row.delta);
    ds.push_back(row.delta_star);
  }
  FittedOrders o;
  o.eig = fit_order(h, eig);
  o.mean = try_fit(h, mean);
  o.vec = try_fit(h, vec);
  o.delta = try_fit(h, d);
  o.delta_star = try_fit(h, ds);
  return o;
}

ConvergenceRecord convergence_study(const GalerkinHierarchy& h, const HolomorphicOpFunction& f, const Contour& c,
                                    const std::vector<double>& mesh_widths, const SolverOptions& opts) {
  if (mesh_widths.size() != h.num_levels()) throw UsageError("convergence_study: one mesh width per level is required");
  const ReferenceData ref = reference_data(f, c, opts);
  const Deltas d = deltas(h, ref);
  const std::vector<LevelErrors> errs = eigen_errors(h, f, ref, c, opts);
  ConvergenceRecord rec;
  rec.lambda0 = ref.lambda0;
  rec.kappa = ref.kappa;
  rec.dim_g = ref.dim_g;
  for (std::size_t n = 0; n < h.num_levels(); ++n) {
    rec.rows.push_back(ConvergenceRow{n, h.level_dim(n), mesh_widths[n], d.delta[n], d.delta_star[n], errs[n]});
  }
  try {
    rec.orders = fit_orders(rec);
  } catch (const InsufficientDataError& e) {
    rec.fit_note = e.what();
    std::vector<double> hs, ds, dss;
    for (const auto& row : rec.rows) {
      hs.push_back(row.h);
      ds.push_back(row.delta);
      dss.push_back(row.delta_star);
    }
    rec.orders.delta = try_fit(hs, ds);
    rec.orders.delta_star = try_fit(hs, dss);
  }
  return rec;
}

std::string ConvergenceRecord::to_csv() const {
  std::string out = csv_line({"n", "dim", "h", "delta", "delta_star", "err_min", "err_max", "err_mean", "vec_err", "mult"});
  for (const auto& r : rows) {
    out += csv_line({std::to_string(r.n), std::to_string(r.dim), format_double(r.h), format_double(r.delta),
                     format_double(r.delta_star), format_double(r.errors.err_min), format_double(r.errors.err_max),
                     format_double(r.errors.mean_error), format_double(r.errors.vec_error),
                     std::to_string(r.errors.mult_sum)});
  }
  return out;
}

std::string ConvergenceRecord::to_svg() const {
  PlotSeries delta{"delta_n", {}, {}, orders.delta};
  PlotSeries delta_star{"delta_n*", {}, {}, orders.delta_star};
  PlotSeries eig{"eigenvalue error", {}, {}, orders.eig};
  PlotSeries mean{"mean error", {}, {}, orders.mean};
  PlotSeries vec{"eigenvector error", {}, {}, orders.vec};
  for (const auto& r : rows) {
    delta.x.push_back(r.h);
    delta.y.push_back(r.delta);
    delta_star.x.push_back(r.h);
    delta_star.y.push_back(r.delta_star);
    eig.x.push_back(r.h);
    eig.y.push_back(r.errors.err_max);
    mean.x.push_back(r.h);
    mean.y.push_back(r.errors.mean_error);
    vec.x.push_back(r.h);
    vec.y.push_back(r.errors.vec_error);
  }
  std::ostringstream title;
  title << "convergence at lambda0 = " << lambda0.real();
  if (lambda0.imag() != 0.0) title << (lambda0.imag() < 0 ? " - " : " + ") << std::abs(lambda0.imag()) << "i";
  title << " (kappa " << kappa << ")";
  return loglog_svg(title.str(), "mesh width h", "error", {delta, delta_star, eig, mean, vec});
}

std::vector<Complex> circle_samples(Complex center, double radius, int count) {
  if (count < 1 || !(radius > 0.0)) throw UsageError("circle_samples: need positive radius and count");
  std::vector<Complex> out;
  for (int k = 0; k < count; ++k) out.push_back(center + std::polar(radius, 2.0 * std::numbers::pi * k / count));
  return out;
}

std::vector<double> resolvent_stability_scan(const GalerkinHierarchy& h, const HolomorphicOpFunction& f,
                                             const std::vector<Complex>& samples) {
  std::vector<double> sups(h.num_levels(), 0.0);
  parallel_for(h.num_levels(), [&](std::size_t n) {
    const HolomorphicOpFunction fn = compress(h, n, f);
    double worst = 0.0;
    for (const auto& z : samples) {
      const GsvRange g = form_gsv(fn.space(), fn.evaluate_form(z));
      worst = std::max(worst, g.min > 0.0 ? 1.0 / g.min : kInf);
    }
    sups[n] = worst;
  });
  return sups;
}

void flag_spurious(std::vector<PollutionLevel>& levels, const std::vector<Complex>& reference, double tol) {
  for (auto& lv : levels) {
    lv.spurious.clear();
    for (const auto& z : lv.eigenvalues) {
      double nearest = kInf;
      for (const auto& r : reference) nearest = std::min(nearest, std::abs(z - r));
      if (nearest > tol) lv.spurious.push_back(z);
    }
  }
}

std::vector<PollutionLevel> pollution_scan(const GalerkinHierarchy& h, const HolomorphicOpFunction& f,
                                           const Contour& window, const std::vector<Complex>& reference_spectrum,
                                           double tol_match, const SolverOptions& opts) {
  if (!(tol_match > 0.0)) throw UsageError("pollution_scan: tol_match must be positive");
  std::vector<PollutionLevel> levels(h.num_levels());
  parallel_for(h.num_levels(), [&](std::size_t n) {
    levels[n].n = n;
    const SpectralResult r = contour_eigensolve(compress(h, n, f), window, opts);
    for (const auto& e : r.eigenvalues) levels[n].eigenvalues.push_back(e.lambda);
  });
  flag_spurious(levels, reference_spectrum, tol_match);
  return levels;
}

double pollution_tolerance(const ConvergenceRecord& record) {
  double predicted = kNaN;
  std::vector<double> h, err;
  for (const auto& row : record.rows) {
    if (row.errors.empty) continue;
    h.push_back(row.h);
    err.push_back(row.errors.err_max);
  }
  try {
    const LineFit fit = fit_line(h, err);
    predicted = std::exp(fit.intercept + fit.slope * std::log(h.back()));
  } catch (const InsufficientDataError&) {
    if (!err.empty()) predicted = err.back();
  }
  if (!std::isfinite(predicted)) return 1e-8;
  return std::max(1e-8, 10.0 * predicted);
}

double pollution_tolerance(const std::vector<PollutionLevel>& levels, const std::vector<Complex>& reference,
                           const Contour& window, const std::vector<double>& mesh_widths) {
  if (mesh_widths.size() != levels.size()) throw UsageError("pollution_tolerance: one mesh width per level");
  double predicted = kNaN;
  for (const Complex& r : reference) {
    if (!window.contains(r)) continue;
    std::vector<double> h, err;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      double nearest = kInf;
      for (const Complex& z : levels[i].eigenvalues) nearest = std::min(nearest, std::abs(z - r));
      if (std::isfinite(nearest) && nearest > 0.0) {
        h.push_back(mesh_widths[i]);
        err.push_back(nearest);
      }
    }
    try {
      const LineFit fit = fit_line(h, err);
      const double p = std::exp(fit.intercept + fit.slope * std::log(mesh_widths.back()));
      if (std::isfinite(p)) predicted = std::isnan(predicted) ? p : std::max(predicted, p);
    } catch (const InsufficientDataError&) {
    }
  }
  if (std::isnan(predicted)) return kNaN;
  return std::max(1e-8, 10.0 * predicted);
}

CheckResult check_multiplicity(const ConvergenceRecord& r, int transitional) {
  CheckResult res{"multiplicity conservation", true, {}};
  std::ostringstream detail;
  std::size_t first = r.rows.size();
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (!r.rows[i].errors.empty) {
      first = i;
      break;
    }
  }
  if (first == r.rows.size()) {
    res.ok = false;
    res.detail = "no level captured an eigenvalue";
    return res;
  }
  for (std::size_t i = first + 1 + static_cast<std::size_t>(std::max(transitional, 0)); i < r.rows.size(); ++i) {
    if (r.rows[i].errors.mult_sum != r.dim_g) {
      res.ok = false;
      detail << "level " << r.rows[i].n << " has multiplicity " << r.rows[i].errors.mult_sum << " vs " << r.dim_g
             << "; ";
    }
  }
  if (res.ok) detail << "dim G = " << r.dim_g << " matched after level " << r.rows[first].n;
  res.detail = detail.str();
  return res;
}

CheckResult check_approximability(const ConvergenceRecord& r) {
  CheckResult res{"approximability", true, {}};
  std::ostringstream detail;
  double prev = kInf;
  for (std::size_t i = late_start(r.rows.size()); i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    if (row.errors.empty) {
      res.ok = false;
      detail << "level " << row.n << " has no eigenvalue in the contour; ";
      continue;
    }
    if (row.errors.err_min > 1.1 * prev + 1e-14) {
      res.ok = false;
      detail << "distance grows at level " << row.n << "; ";
    }
    prev = row.errors.err_min;
  }
  if (res.ok) detail << "nearest-eigenvalue distance decreasing on late levels";
  res.detail = detail.str();
  return res;
}

CheckResult check_delta_monotone(const ConvergenceRecord& r, double slack) {
  CheckResult res{"delta monotonicity", true, {}};
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    if (r.rows[i].delta > r.rows[i - 1].delta + slack || r.rows[i].delta_star > r.rows[i - 1].delta_star + slack) {
      res.ok = false;
      res.detail += "increase at level " + std::to_string(r.rows[i].n) + "; ";
    }
  }
  if (res.ok) res.detail = "delta_n and delta_n* non-increasing";
  return res;
}

CheckResult check_order_law(const ConvergenceRecord& r) {
  CheckResult res{"eigenvalue order law", true, {}};
  std::vector<double> h, dd;
  for (const auto& row : r.rows) {
    if (row.errors.empty) continue;
    h.push_back(row.h);
    dd.push_back(row.delta * row.delta_star);
  }
  const double order_dd = try_fit(h, dd);
  std::ostringstream detail;
  if (!std::isfinite(order_dd) || !std::isfinite(r.orders.eig) || r.kappa < 1) {
    res.ok = false;
    detail << "orders unavailable" << (r.fit_note.empty() ? "" : ": " + r.fit_note);
  } else {
    const double floor = order_dd / r.kappa - 0.2;
    res.ok = r.orders.eig >= floor;
    detail << "order_eig " << r.orders.eig << " vs floor " << floor;
  }
  res.detail = detail.str();
  return res;
}

CheckResult check_vector_bound(const ConvergenceRecord& r) {
  CheckResult res{"eigenvector bound", true, {}};
  std::vector<double> ratios;
  for (std::size_t i = late_start(r.rows.size()); i < r.rows.size(); ++i) {
    const auto& e = r.rows[i].errors;
    if (e.empty) continue;
    const double denom = e.err_max + e.ker_defect;
    ratios.push_back(denom > 0.0 ? e.vec_error / denom : (e.vec_error > 0.0 ? kInf : 0.0));
  }
  std::ostringstream detail;
  if (ratios.empty()) {
    res.ok = false;
    res.detail = "no late level with eigenvalues";
    return res;
  }
  const double worst = *std::max_element(ratios.begin(), ratios.end());
  const double finest = ratios.back();
  res.ok = std::isfinite(worst) && (finest == 0.0 ? worst == 0.0 : worst < 10.0 * finest);
  detail << "late max ratio " << worst << ", finest ratio " << finest;
  res.detail = detail.str();
  return res;
}

}  // namespace holofredholm
