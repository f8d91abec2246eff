// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

#include "holofredholm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "holofredholm/errors.hpp"

namespace holofredholm {

namespace {

constexpr Index kSparseMinDim = 96;

double max_abs(const CMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

double norm1(const CMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().colwise().sum().maxCoeff(); }

void require_square(const CMatrix& b, Index n, const char* what) {
  if (b.rows() != n || b.cols() != n) {
    std::ostringstream msg;
    msg << what << ": expected " << n << "x" << n << " matrix, got " << b.rows() << "x" << b.cols();
    throw UsageError(msg.str());
  }
}

}  // namespace

std::shared_ptr<const SparseCMatrix> sparse_if_sparse(const CMatrix& a, double max_density) {
  if (std::min(a.rows(), a.cols()) < kSparseMinDim) return nullptr;
  const Index limit = static_cast<Index>(max_density * static_cast<double>(a.size()));
  Index nnz = 0;
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (a(i, j) != Complex(0.0, 0.0) && ++nnz > limit) return nullptr;
    }
  }
  auto sparse = std::make_shared<SparseCMatrix>(a.rows(), a.cols());
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<size_t>(nnz));
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (a(i, j) != Complex(0.0, 0.0)) triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), a(i, j));
    }
  }
  sparse->setFromTriplets(triplets.begin(), triplets.end());
  sparse->makeCompressed();
  return sparse;
}

// ---------------------------------------------------------------------------
// MatrixApplier

MatrixApplier::MatrixApplier(const CMatrix& a)
    : dense_(&a), sparse_(sparse_if_sparse(a)), rows_(a.rows()), cols_(a.cols()) {}

CMatrix MatrixApplier::operator()(const CMatrix& x) const {
  if (sparse_) return (*sparse_) * x;
  return (*dense_) * x;
}

CMatrix MatrixApplier::adjoint_apply(const CMatrix& x) const {
  if (sparse_) return sparse_->adjoint() * x;
  return dense_->adjoint() * x;
}

// ---------------------------------------------------------------------------
// LuSolver

struct LuSolver::SparseImpl {
  // adjoint() is non-const in Eigen although it only wraps the factors.
  mutable Eigen::SparseLU<SparseCMatrix, Eigen::COLAMDOrdering<int>> lu;
  bool ok = false;
};

LuSolver::LuSolver(const CMatrix& a) : n_(a.rows()) {
  require_square(a, a.rows(), "LuSolver");
  if (n_ == 0) {
    rcond_ = 1.0;
    return;
  }
  const double anorm = norm1(a);
  if (anorm == 0.0) {
    rcond_ = 0.0;
    dense_ = std::make_shared<Eigen::PartialPivLU<CMatrix>>(a);
    return;
  }
  if (auto sparse = sparse_if_sparse(a)) {
    factor_sparse(*sparse, anorm);
    return;
  }
  auto lu = std::make_shared<Eigen::PartialPivLU<CMatrix>>(a);
  rcond_ = lu->rcond();
  if (!std::isfinite(rcond_)) rcond_ = 0.0;
  dense_ = lu;
}

LuSolver::LuSolver(const SparseCMatrix& a) : n_(a.rows()) {
  if (a.rows() != a.cols()) throw UsageError("LuSolver: matrix must be square");
  if (n_ == 0) {
    rcond_ = 1.0;
    return;
  }
  double anorm = 0.0;
  for (Index j = 0; j < a.outerSize(); ++j) {
    double col = 0.0;
    for (SparseCMatrix::InnerIterator it(a, j); it; ++it) col += std::abs(it.value());
    anorm = std::max(anorm, col);
  }
  if (anorm == 0.0) {
    rcond_ = 0.0;
    dense_ = std::make_shared<Eigen::PartialPivLU<CMatrix>>(CMatrix(a));
    return;
  }
  factor_sparse(a, anorm);
}

void LuSolver::factor_sparse(const SparseCMatrix& a, double anorm) {
  auto impl = std::make_shared<SparseImpl>();
  impl->lu.analyzePattern(a);
  impl->lu.factorize(a);
  impl->ok = impl->lu.info() == Eigen::Success;
  sparse_ = impl;
  if (!impl->ok) {
    rcond_ = 0.0;
    return;
  }
  // Hager-Higham estimate of |A^{-1}|_1.
  CVector x = CVector::Constant(n_, Complex(1.0 / static_cast<double>(n_), 0.0));
  double est = 0.0;
  for (int iter = 0; iter < 5; ++iter) {
    CVector y = impl->lu.solve(x);
    est = y.cwiseAbs().sum();
    if (!std::isfinite(est)) {
      rcond_ = 0.0;
      return;
    }
    CVector xi(n_);
    for (Index i = 0; i < n_; ++i) xi(i) = std::abs(y(i)) > 0.0 ? y(i) / std::abs(y(i)) : Complex(1.0, 0.0);
    CVector z = impl->lu.adjoint().solve(xi);
    Index j = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (iter > 0 && zmax <= std::real(z.dot(x))) break;
    x.setZero();
    x(j) = 1.0;
  }
  rcond_ = est > 0.0 ? 1.0 / (anorm * est) : 0.0;
}

CMatrix LuSolver::solve(const CMatrix& b) const {
  if (b.rows() != n_) throw UsageError("LuSolver::solve: right-hand side has wrong row count");
  if (n_ == 0) return b;
  if (sparse_) return sparse_->lu.solve(b);
  return dense_->solve(b);
}

CMatrix LuSolver::solve_adjoint(const CMatrix& b) const {
  if (b.rows() != n_) throw UsageError("LuSolver::solve_adjoint: right-hand side has wrong row count");
  if (n_ == 0) return b;
  if (sparse_) return sparse_->lu.adjoint().solve(b);
  return dense_->adjoint().solve(b);
}

// ---------------------------------------------------------------------------
// GramSpace

struct GramSpace::Impl {
  CMatrix gram;
  std::shared_ptr<const SparseCMatrix> sparse;
  // Dense backend: gram = L L^H.
  Eigen::LLT<CMatrix> dense_llt;
  // Sparse backend: gram = P^{-1} L L^H P.
  SparseCMatrix lower;
  SparseCMatrix upper;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm_inv;
};

GramSpace::GramSpace(CMatrix gram) {
  if (gram.rows() != gram.cols() || gram.rows() == 0) throw UsageError("GramSpace: gram must be a nonempty square matrix");
  const double scale = max_abs(gram);
  if (!(scale > 0.0) || !std::isfinite(scale)) throw UsageError("GramSpace: gram must be finite and nonzero");
  if (max_abs(gram - gram.adjoint()) > 1e-13 * scale) throw UsageError("GramSpace: gram is not Hermitian");

  auto impl = std::make_shared<Impl>();
  impl->sparse = sparse_if_sparse(gram);
  if (impl->sparse) {
    Eigen::SimplicialLLT<SparseCMatrix> llt(*impl->sparse);
    if (llt.info() != Eigen::Success) throw UsageError("GramSpace: gram is not positive definite");
    impl->lower = llt.matrixL();
    impl->upper = impl->lower.adjoint();
    impl->perm = llt.permutationP();
    impl->perm_inv = llt.permutationPinv();
  } else {
    impl->dense_llt.compute(gram);
    if (impl->dense_llt.info() != Eigen::Success) throw UsageError("GramSpace: gram is not positive definite");
    const RVector diag = impl->dense_llt.matrixLLT().diagonal().real();
    if (!(diag.minCoeff() > 0.0)) throw UsageError("GramSpace: gram is not positive definite");
  }
  impl->gram = std::move(gram);
  impl_ = std::move(impl);
}

GramSpace GramSpace::identity(Index n) { return GramSpace(CMatrix::Identity(n, n)); }

Index GramSpace::dim() const { return impl_->gram.rows(); }

const CMatrix& GramSpace::gram() const { return impl_->gram; }

CMatrix GramSpace::apply(const CMatrix& x) const {
  if (impl_->sparse) return (*impl_->sparse) * x;
  return impl_->gram * x;
}

CMatrix GramSpace::solve(const CMatrix& x) const {
  if (impl_->sparse) {
    CMatrix y = impl_->perm * x;
    y = impl_->lower.triangularView<Eigen::Lower>().solve(y);
    y = impl_->upper.triangularView<Eigen::Upper>().solve(y);
    return impl_->perm_inv * y;
  }
  return impl_->dense_llt.solve(x);
}

CMatrix GramSpace::to_iso(const CMatrix& x) const {
  if (impl_->sparse) return impl_->upper * (impl_->perm * x);
  return impl_->dense_llt.matrixU() * x;
}

CMatrix GramSpace::from_iso(const CMatrix& y) const {
  if (impl_->sparse) {
    CMatrix z = impl_->upper.triangularView<Eigen::Upper>().solve(y);
    return impl_->perm_inv * z;
  }
  return impl_->dense_llt.matrixU().solve(y);
}

CMatrix GramSpace::iso_left(const CMatrix& y) const {
  if (impl_->sparse) {
    CMatrix z = impl_->perm * y;
    return impl_->lower.triangularView<Eigen::Lower>().solve(z);
  }
  return impl_->dense_llt.matrixL().solve(y);
}

CMatrix GramSpace::form_to_iso(const CMatrix& form) const {
  const CMatrix left = iso_left(form);
  return iso_left(left.adjoint()).adjoint();
}

// ---------------------------------------------------------------------------
// Inner products and adjoints

Complex x_inner(const GramSpace& space, const CVector& u, const CVector& v) {
  if (u.size() != space.dim() || v.size() != space.dim()) throw UsageError("x_inner: vector length does not match space dimension");
  const CVector gu = space.apply(u);
  return v.dot(gu);
}

double x_norm(const GramSpace& space, const CVector& u) {
  return std::sqrt(std::max(0.0, std::real(x_inner(space, u, u))));
}

CMatrix x_adjoint(const GramSpace& space, const CMatrix& b) {
  require_square(b, space.dim(), "x_adjoint");
  return space.solve(b.adjoint() * space.gram());
}

// ---------------------------------------------------------------------------
// Generalized singular values

namespace {

GsvRange range_from_singular_values(const RVector& s) {
  if (s.size() == 0) return {};
  GsvRange r;
  r.max = s(0);
  r.min = s(s.size() - 1);
  if (r.max == 0.0 || r.min <= r.max * std::numeric_limits<double>::epsilon()) r.min = 0.0;
  return r;
}

}  // namespace

GsvRange min_max_gsv(const GramSpace& space, const CMatrix& b) {
  require_square(b, space.dim(), "min_max_gsv");
  if (space.dim() <= kDenseLimit) {
    const CMatrix left = space.to_iso(b);
    const CMatrix iso = space.iso_left(left.adjoint()).adjoint();
    return range_from_singular_values(singular_values(iso));
  }
  GsvRange r;
  const MatrixApplier apply_b(b);
  r.max = std::sqrt(std::max(0.0, lanczos_extremes(
                                      [&](const CVector& u) {
                                        const CVector bu = apply_b(u);
                                        return CVector(apply_b.adjoint_apply(space.apply(bu)));
                                      },
                                      space)
                                      .max));
  if (r.max == 0.0) return r;
  const LuSolver lu(b);
  if (lu.rcond() < 1e-15) return r;
  const double inv_sq = lanczos_extremes(
                            [&](const CVector& u) {
                              const CVector x = lu.solve(u);
                              return CVector(lu.solve_adjoint(space.apply(x)));
                            },
                            space)
                            .max;
  r.min = inv_sq > 0.0 ? 1.0 / std::sqrt(inv_sq) : 0.0;
  return r;
}

GsvRange form_gsv(const GramSpace& space, const CMatrix& form) {
  require_square(form, space.dim(), "form_gsv");
  if (space.dim() <= kDenseLimit) return range_from_singular_values(singular_values(space.form_to_iso(form)));
  GsvRange r;
  const MatrixApplier apply_f(form);
  r.max = std::sqrt(std::max(0.0, lanczos_extremes(
                                      [&](const CVector& u) {
                                        const CVector fu = apply_f(u);
                                        return CVector(apply_f.adjoint_apply(space.solve(fu)));
                                      },
                                      space)
                                      .max));
  if (r.max == 0.0) return r;
  const LuSolver lu(form);
  if (lu.rcond() < 1e-15) return r;
  const double inv_sq = lanczos_extremes(
                            [&](const CVector& u) {
                              const CVector x = lu.solve(space.apply(u));
                              return CVector(space.apply(lu.solve_adjoint(space.apply(x))));
                            },
                            space)
                            .max;
  r.min = inv_sq > 0.0 ? 1.0 / std::sqrt(inv_sq) : 0.0;
  return r;
}

double form_norm(const GramSpace& space, const CMatrix& form) {
  require_square(form, space.dim(), "form_norm");
  if (space.dim() <= kDenseLimit) {
    const RVector s = singular_values(space.form_to_iso(form));
    return s.size() > 0 ? s(0) : 0.0;
  }
  const MatrixApplier apply_f(form);
  return std::sqrt(std::max(0.0, lanczos_extremes(
                                     [&](const CVector& u) {
                                       const CVector fu = apply_f(u);
                                       return CVector(apply_f.adjoint_apply(space.solve(fu)));
                                     },
                                     space)
                                     .max));
}

double max_gsv_between(const GramSpace& out, const GramSpace& in, const CMatrix& d) {
  if (d.rows() != out.dim() || d.cols() != in.dim()) throw UsageError("max_gsv_between: map has wrong shape");
  if (d.size() == 0) return 0.0;
  if (in.dim() <= kDenseLimit) {
    const CMatrix h = d.adjoint() * out.apply(d);
    const CMatrix hi = in.form_to_iso(h);
    const CMatrix herm = 0.5 * (hi + hi.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
  }
  const MatrixApplier apply_d(d);
  const double mu = lanczos_extremes(
                        [&](const CVector& u) {
                          const CVector du = apply_d(u);
                          return CVector(apply_d.adjoint_apply(out.apply(du)));
                        },
                        in)
                        .max;
  return std::sqrt(std::max(0.0, mu));
}

// ---------------------------------------------------------------------------
// Orthonormalization

Orthonormalized m_orthonormalize(const GramSpace& space, const CMatrix& v, double rel_tol) {
  if (v.rows() != space.dim()) throw UsageError("m_orthonormalize: row count does not match space dimension");
  Orthonormalized out;
  const Index k = v.cols();
  double largest = 0.0;
  for (Index j = 0; j < k; ++j) largest = std::max(largest, x_norm(space, v.col(j)));
  CMatrix q(v.rows(), k);
  CMatrix gq(v.rows(), k);
  Index kept = 0;
  for (Index j = 0; j < k; ++j) {
    CVector w = v.col(j);
    for (int pass = 0; pass < 2 && kept > 0; ++pass) {
      const CVector coeff = gq.leftCols(kept).adjoint() * w;
      w -= q.leftCols(kept) * coeff;
    }
    const CVector gw = space.apply(w);
    const double nrm = std::sqrt(std::max(0.0, std::real(w.dot(gw))));
    if (largest == 0.0 || nrm <= rel_tol * largest) {
      ++out.dropped;
      continue;
    }
    q.col(kept) = w / nrm;
    gq.col(kept) = gw / nrm;
    ++kept;
  }
  out.basis = q.leftCols(kept);
  return out;
}

// ---------------------------------------------------------------------------
// Lanczos

namespace {

struct LanczosRun {
  CMatrix q;
  RVector diag;
  RVector sub;
};

LanczosRun lanczos_run(const std::function<CVector(const CVector&)>& apply_h, const GramSpace& space,
                       const CVector& start, int max_steps) {
  const Index n = space.dim();
  const int steps = static_cast<int>(std::min<Index>(n, max_steps));
  CMatrix q(n, steps);
  CMatrix gq(n, steps);
  std::vector<double> alpha;
  std::vector<double> beta;
  CVector w = start;
  CVector gw = space.apply(w);
  double nrm = std::sqrt(std::real(w.dot(gw)));
  q.col(0) = w / nrm;
  gq.col(0) = gw / nrm;
  int k = 0;
  for (; k < steps; ++k) {
    const CVector hq = apply_h(q.col(k));
    const double a = std::real(q.col(k).dot(hq));
    alpha.push_back(a);
    if (k + 1 == steps) {
      ++k;
      break;
    }
    w = space.solve(hq);
    for (int pass = 0; pass < 2; ++pass) {
      const CVector coeff = gq.leftCols(k + 1).adjoint() * w;
      w -= q.leftCols(k + 1) * coeff;
    }
    gw = space.apply(w);
    const double b = std::sqrt(std::max(0.0, std::real(w.dot(gw))));
    double scale = 0.0;
    for (double x : alpha) scale = std::max(scale, std::abs(x));
    for (double x : beta) scale = std::max(scale, std::abs(x));
    if (b <= 1e-13 * std::max(scale, 1e-300)) {
      ++k;
      break;
    }
    beta.push_back(b);
    q.col(k + 1) = w / b;
    gq.col(k + 1) = gw / b;
  }
  const Index m = static_cast<Index>(alpha.size());
  LanczosRun run;
  run.diag.resize(m);
  run.sub.resize(std::max<Index>(m - 1, 0));
  for (Index i = 0; i < m; ++i) run.diag(i) = alpha[static_cast<size_t>(i)];
  for (Index i = 0; i + 1 < m; ++i) run.sub(i) = beta[static_cast<size_t>(i)];
  run.q = q.leftCols(m);
  return run;
}

}  // namespace

PencilExtremes lanczos_extremes(const std::function<CVector(const CVector&)>& apply_h, const GramSpace& space,
                                int max_steps, std::uint64_t seed) {
  const LanczosRun run = lanczos_run(apply_h, space, random_matrix(space.dim(), 1, seed).col(0), max_steps);
  const Index m = run.diag.size();
  PencilExtremes out;
  out.steps = static_cast<int>(m);
  if (m == 1) {
    out.min = out.max = run.diag(0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  tri.computeFromTridiagonal(run.diag, run.sub, Eigen::EigenvaluesOnly);
  out.min = tri.eigenvalues().minCoeff();
  out.max = tri.eigenvalues().maxCoeff();
  return out;
}

RitzPair lanczos_min_pair(const std::function<CVector(const CVector&)>& apply_h, const GramSpace& space,
                          const CVector& start, int max_steps) {
  if (start.size() != space.dim() || !(start.norm() > 0.0)) throw UsageError("lanczos_min_pair: bad start vector");
  const LanczosRun run = lanczos_run(apply_h, space, start, max_steps);
  const Index m = run.diag.size();
  RitzPair out;
  if (m == 1) {
    out.value = run.diag(0);
    out.vector = run.q.col(0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  tri.computeFromTridiagonal(run.diag, run.sub, Eigen::ComputeEigenvectors);
  out.value = tri.eigenvalues()(0);
  out.vector = run.q * tri.eigenvectors().col(0).cast<Complex>();
  out.vector /= x_norm(space, out.vector);
  return out;
}

// ---------------------------------------------------------------------------
// Dense helpers

RVector singular_values(const CMatrix& a) {
  if (a.size() == 0) return RVector();
  if (std::min(a.rows(), a.cols()) <= 32) {
    Eigen::JacobiSVD<CMatrix> svd(a);
    return svd.singularValues();
  }
  Eigen::BDCSVD<CMatrix> svd(a);
  return svd.singularValues();
}

CMatrix kernel_basis(const CMatrix& a, double rel_tol, double abs_floor) {
  const Index n = a.cols();
  if (n == 0) return CMatrix(0, 0);
  if (a.rows() == 0) return CMatrix::Identity(n, n);
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  const double cut = std::max(rel_tol * (s.size() > 0 ? s(0) : 0.0), abs_floor);
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cut) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

CMatrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix out(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(gen);
      const double im = normal(gen);
      out(i, j) = Complex(re, im);
    }
  }
  return out;
}

}  // namespace holofredholm
