// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

#include "holofredholm/galerkin.hpp"

#include <sstream>

#include <Eigen/QR>

#include "holofredholm/errors.hpp"

namespace holofredholm {

namespace {

bool full_column_rank(const CMatrix& e) {
  if (e.cols() > e.rows()) return false;
  if (e.rows() == e.cols()) return LuSolver(e).rcond() > 1e-10;
  Eigen::ColPivHouseholderQR<CMatrix> qr(e);
  qr.setThreshold(1e-10);
  return qr.rank() == e.cols();
}

}  // namespace

GalerkinHierarchy::GalerkinHierarchy(GramSpace reference, std::vector<CMatrix> embeddings)
    : reference_(std::move(reference)) {
  if (embeddings.empty()) throw UsageError("GalerkinHierarchy: at least one level is required");
  Index prev = 0;
  for (std::size_t n = 0; n < embeddings.size(); ++n) {
    CMatrix& e = embeddings[n];
    std::ostringstream where;
    where << "GalerkinHierarchy level " << n << ": ";
    if (e.rows() != reference_.dim() || e.cols() == 0) throw UsageError(where.str() + "embedding has wrong shape");
    if (e.cols() <= prev) throw UsageError(where.str() + "dimensions must be strictly increasing");
    if (!full_column_rank(e)) throw UsageError(where.str() + "embedding is rank deficient");
    prev = e.cols();
    CMatrix ge_adj = reference_.apply(e).adjoint();
    CMatrix coarse = ge_adj * e;
    coarse = 0.5 * (coarse + coarse.adjoint());
    GramSpace space(std::move(coarse));
    levels_.push_back(Level{std::move(e), std::move(space), std::move(ge_adj)});
  }
  for (std::size_t n = 0; n + 1 < levels_.size(); ++n) {
    const CMatrix& e = levels_[n].embedding;
    const CMatrix residual = e - project(n + 1, e);
    double largest = 0.0;
    double worst = 0.0;
    for (Index j = 0; j < e.cols(); ++j) {
      largest = std::max(largest, x_norm(reference_, e.col(j)));
      worst = std::max(worst, x_norm(reference_, residual.col(j)));
    }
    if (worst > 1e-10 * largest) {
      std::ostringstream msg;
      msg << "GalerkinHierarchy: level " << n << " is not contained in level " << n + 1 << " (relative defect "
          << worst / largest << ")";
      throw UsageError(msg.str());
    }
  }
}

void GalerkinHierarchy::check_level(std::size_t n) const {
  if (n >= levels_.size()) {
    std::ostringstream msg;
    msg << "level index " << n << " out of range (hierarchy has " << levels_.size() << " levels)";
    throw UsageError(msg.str());
  }
}

Index GalerkinHierarchy::level_dim(std::size_t n) const {
  check_level(n);
  return levels_[n].embedding.cols();
}

const CMatrix& GalerkinHierarchy::embedding(std::size_t n) const {
  check_level(n);
  return levels_[n].embedding;
}

const GramSpace& GalerkinHierarchy::level_space(std::size_t n) const {
  check_level(n);
  return levels_[n].space;
}

CMatrix GalerkinHierarchy::coarse_coefficients(std::size_t n, const CMatrix& u) const {
  check_level(n);
  if (u.rows() != reference_.dim()) throw UsageError("coarse_coefficients: vector length does not match reference");
  return levels_[n].space.solve(levels_[n].embedding_gram_adj * u);
}

CMatrix GalerkinHierarchy::project(std::size_t n, const CMatrix& u) const {
  return levels_[n].embedding * coarse_coefficients(n, u);
}

CMatrix GalerkinHierarchy::compress_form(std::size_t n, const CMatrix& form) const {
  check_level(n);
  if (form.rows() != reference_.dim() || form.cols() != reference_.dim()) {
    throw UsageError("compress_form: matrix does not match the reference dimension");
  }
  const CMatrix& e = levels_[n].embedding;
  const CMatrix fe = MatrixApplier(form)(e);
  return e.adjoint() * fe;
}

CMatrix GalerkinHierarchy::compress_operator(std::size_t n, const CMatrix& op) const {
  check_level(n);
  if (op.rows() != reference_.dim() || op.cols() != reference_.dim()) {
    throw UsageError("compress_operator: matrix does not match the reference dimension");
  }
  const CMatrix be = MatrixApplier(op)(levels_[n].embedding);
  return levels_[n].space.solve(levels_[n].embedding_gram_adj * be);
}

HolomorphicOpFunction compress(const GalerkinHierarchy& h, std::size_t n, const HolomorphicOpFunction& f) {
  if (f.dim() != h.reference().dim()) throw UsageError("compress: operator function does not live on the reference");
  std::vector<ScalarHolo> scalars;
  std::vector<CMatrix> forms;
  for (std::size_t i = 0; i < f.num_terms(); ++i) {
    scalars.push_back(f.scalar(i));
    forms.push_back(h.compress_form(n, f.form(i)));
  }
  Domain dom = f.domain();
  // Scalar poles are re-added by the constructor.
  dom.poles.clear();
  return HolomorphicOpFunction(h.level_space(n), std::move(scalars), std::move(forms), std::move(dom));
}

double best_approx_defect(const GalerkinHierarchy& h, std::size_t n, const CMatrix& q) {
  const GramSpace& ref = h.reference();
  if (q.rows() != ref.dim()) throw UsageError("best_approx_defect: basis does not live on the reference");
  if (q.cols() == 0) return 0.0;
  const CMatrix gram = q.adjoint() * ref.apply(q);
  if ((gram - CMatrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff() > 1e-10) {
    throw UsageError("best_approx_defect: basis is not X-orthonormal");
  }
  const CMatrix d = q - h.project(n, q);
  return max_gsv_between(ref, GramSpace::identity(q.cols()), d);
}

double projection_monotonicity_violation(const GalerkinHierarchy& h, const CMatrix& probes, double slack) {
  double worst = 0.0;
  for (Index j = 0; j < probes.cols(); ++j) {
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < h.num_levels(); ++n) {
      const CVector u = probes.col(j);
      const double err = x_norm(h.reference(), u - h.project(n, u));
      worst = std::max(worst, err - prev - slack);
      prev = err;
    }
  }
  return std::max(0.0, worst);
}

}  // namespace holofredholm
