// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

#include "holofredholm/nep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "holofredholm/errors.hpp"
#include "holofredholm/parallel.hpp"
#include "holofredholm/report.hpp"

namespace holofredholm {

namespace {

// Chain unknowns are restricted to a subspace above this dimension.
constexpr Index kFullChainLimit = 64;

template <class Svd>
Index rank_of(const Svd& svd, double rel_tol, double abs_floor = 0.0) {
  const RVector& s = svd.singularValues();
  if (s.size() == 0) return 0;
  const double cut = std::max(rel_tol * s(0), abs_floor);
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > cut) ++r;
  }
  return r;
}

CMatrix hankel(const std::vector<CMatrix>& moments, int k, int shift) {
  const Index n = moments[0].rows(), l = moments[0].cols();
  CMatrix h(k * n, k * l);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) h.block(i * n, j * l, n, l) = moments[static_cast<size_t>(i + j + shift)];
  }
  return h;
}

// |G^{-1} F v|_X for each column, maximized.
double residual_of(const GramSpace& space, const CMatrix& form, const CMatrix& vectors) {
  double worst = 0.0;
  const CMatrix fv = form * vectors;
  const CMatrix gfv = space.solve(fv);
  for (Index j = 0; j < vectors.cols(); ++j) {
    worst = std::max(worst, std::sqrt(std::max(0.0, std::real(fv.col(j).dot(gfv.col(j))))));
  }
  return worst;
}

struct ChainSystem {
  // Per-derivative blocks in isometric output / orthonormal input coordinates.
  std::vector<CMatrix> blocks;
  Index rows = 0;
  Index cols = 0;
};

ChainSystem chain_blocks(const HolomorphicOpFunction& f, Complex z, int count, const CMatrix& subspace) {
  const GramSpace& space = f.space();
  ChainSystem sys;
  double fact = 1.0;
  for (int j = 0; j < count; ++j) {
    if (j > 0) fact *= j;
    const CMatrix dform = f.derivative_form(z, j) / fact;
    if (subspace.size() > 0) {
      sys.blocks.push_back(space.iso_left(dform * subspace));
    } else {
      sys.blocks.push_back(space.form_to_iso(dform));
    }
  }
  sys.rows = sys.blocks[0].rows();
  sys.cols = sys.blocks[0].cols();
  return sys;
}

CMatrix toeplitz(const ChainSystem& sys, int m) {
  CMatrix t = CMatrix::Zero(m * sys.rows, m * sys.cols);
  for (int l = 0; l < m; ++l) {
    for (int j = 0; j <= l; ++j) t.block(l * sys.rows, (l - j) * sys.cols, sys.rows, sys.cols) = sys.blocks[j];
  }
  return t;
}

struct KernelInfo {
  Index dim = 0;
  CMatrix basis;
};

KernelInfo toeplitz_kernel(const CMatrix& t, double rel_tol, bool want_basis, double abs_floor = 0.0) {
  KernelInfo info;
  if (t.rows() >= t.cols()) {
    // Thin factorization suffices: the kernel lies in the row space complement.
    Eigen::BDCSVD<CMatrix> svd(t, want_basis ? Eigen::ComputeThinV : 0);
    const Index r = rank_of(svd, rel_tol, abs_floor);
    info.dim = t.cols() - r;
    if (want_basis) info.basis = svd.matrixV().rightCols(info.dim);
  } else {
    Eigen::BDCSVD<CMatrix> svd(t, want_basis ? Eigen::ComputeFullV : 0);
    const Index r = rank_of(svd, rel_tol, abs_floor);
    info.dim = t.cols() - r;
    if (want_basis) info.basis = svd.matrixV().rightCols(info.dim);
  }
  return info;
}

struct KappaScan {
  KappaResult result;
  ChainSystem sys;
  double floor = 0.0;
};

KappaScan scan_kappa(const HolomorphicOpFunction& f, Complex lambda0, int max_m, double rank_tol,
                     const CMatrix& subspace) {
  if (max_m < 1) throw UsageError("jordan_kappa: max_m must be at least 1");
  if (subspace.size() > 0 && subspace.rows() != f.dim()) throw UsageError("jordan_kappa: subspace has wrong row count");
  KappaScan scan;
  scan.sys = chain_blocks(f, lambda0, max_m, subspace);
  // Absolute floor for levels where A(lambda0) is tiny as a whole.
  scan.floor = rank_tol * f.norm_bound(lambda0);
  Index prev = 0;
  for (int m = 1; m <= max_m; ++m) {
    const Index k = toeplitz_kernel(toeplitz(scan.sys, m), rank_tol, false, scan.floor).dim;
    scan.result.kernel_dims.push_back(k);
    if (m == 1 && k == 0) {
      std::ostringstream msg;
      msg << lambda0 << " is not an eigenvalue at rank tolerance " << rank_tol;
      throw UsageError(msg.str());
    }
    if (k - prev <= 0) {
      scan.result.kappa = m - 1;
      scan.result.alg = static_cast<int>(prev);
      return scan;
    }
    prev = k;
  }
  std::ostringstream msg;
  msg << "Jordan chain search at " << lambda0 << " inconclusive after " << max_m << " steps; kernel dimensions:";
  for (auto k : scan.result.kernel_dims) msg << ' ' << k;
  throw InconclusiveError(msg.str());
}

double ellipse_level(const Contour& c, Complex z) {
  const Complex d = z - c.center;
  return std::pow(d.real() / c.rx, 2) + std::pow(d.imag() / c.ry, 2);
}

}  // namespace

bool Contour::contains(Complex z) const { return ellipse_level(*this, z) < 1.0; }

void Contour::validate() const {
  if (!(rx > 0.0) || !(ry > 0.0) || !std::isfinite(rx) || !std::isfinite(ry)) {
    throw UsageError("contour radii must be positive and finite");
  }
  if (nodes < 16) throw UsageError("contour needs at least 16 quadrature nodes");
}

KappaResult jordan_kappa(const HolomorphicOpFunction& f, Complex lambda0, int max_m, double rank_tol,
                         const CMatrix& subspace) {
  return scan_kappa(f, lambda0, max_m, rank_tol, subspace).result;
}

CMatrix generalized_eigenspace(const HolomorphicOpFunction& f, Complex lambda0, int max_m, double rank_tol,
                               const CMatrix& subspace) {
  const KappaScan scan = scan_kappa(f, lambda0, max_m, rank_tol, subspace);
  const int kappa = scan.result.kappa;
  const KernelInfo ker = toeplitz_kernel(toeplitz(scan.sys, kappa), rank_tol, true, scan.floor);
  const Index r = scan.sys.cols;
  // Every block of every kernel vector is a generalized eigenvector.
  CMatrix coords(r, kappa * ker.dim);
  for (int l = 0; l < kappa; ++l) coords.middleCols(l * ker.dim, ker.dim) = ker.basis.middleRows(l * r, r);
  // In both coordinate systems the X-norm is Euclidean.
  Eigen::BDCSVD<CMatrix> svd(coords, Eigen::ComputeThinU);
  const Index rank = std::min<Index>(rank_of(svd, 1e-8), scan.result.alg);
  const CMatrix u = svd.matrixU().leftCols(rank);
  if (subspace.size() > 0) return subspace * u;
  return f.space().from_iso(u);
}

Complex weighted_mean(const SpectralResult& r, int dim_ref) {
  if (dim_ref <= 0) throw UsageError("weighted_mean: reference dimension must be positive");
  Complex acc = 0.0;
  for (const auto& e : r.eigenvalues) acc += e.lambda * static_cast<double>(e.alg);
  return acc / static_cast<double>(dim_ref);
}

std::string SpectralResult::to_csv() const {
  std::string out = csv_line({"re_lambda", "im_lambda", "geo", "alg", "kappa", "residual"});
  for (const auto& e : eigenvalues) {
    out += csv_line({format_double(e.lambda.real()), format_double(e.lambda.imag()), std::to_string(e.geo),
                     std::to_string(e.alg), std::to_string(e.kappa), format_double(e.residual)});
  }
  return out;
}

SpectralResult contour_eigensolve(const HolomorphicOpFunction& f, const Contour& c, const SolverOptions& opts) {
  c.validate();
  if (opts.probe_rank < 1 || opts.min_moments < 1 || opts.max_moments < opts.min_moments) {
    throw UsageError("contour_eigensolve: invalid probe or moment counts");
  }
  if (!(opts.rank_tol > 0.0) || !(opts.cluster_tol > 0.0) || !(opts.residual_tol > 0.0)) {
    throw UsageError("contour_eigensolve: tolerances must be positive");
  }
  for (const auto& p : f.domain().poles) {
    if (ellipse_level(c, p) <= 1.0 + 1e-12) {
      std::ostringstream msg;
      msg << "pole " << p << " lies inside or on the contour; move the contour";
      throw ContourError(msg.str());
    }
  }
  const GramSpace& space = f.space();
  const Index n = f.dim();
  const Index l = std::min<Index>(opts.probe_rank, n);
  const int nodes = c.nodes;
  const double rho = c.radius();
  const int max_k = opts.max_moments;
  const int moment_count = 2 * max_k;

  SpectralResult result;
  result.seed = opts.seed;
  const CMatrix probe = random_matrix(n, l, opts.seed);

  // Node solves are independent; the moment sums are reduced in node order.
  std::vector<CMatrix> solves(static_cast<size_t>(nodes));
  std::vector<Complex> weights(static_cast<size_t>(nodes)), zetas(static_cast<size_t>(nodes));
  parallel_for(static_cast<size_t>(nodes), [&](std::size_t k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / nodes;
    const Complex z = c.center + Complex(c.rx * std::cos(theta), c.ry * std::sin(theta));
    const Complex dz = Complex(-c.rx * std::sin(theta), c.ry * std::cos(theta));
    try {
      f.check_point(z);
    } catch (const DomainError& e) {
      throw ContourError(std::string("quadrature node outside the domain: ") + e.what() + "; move the contour");
    }
    const LuSolver lu = f.factorize(z);
    if (!(lu.rcond() * opts.max_condition > 1.0)) {
      std::ostringstream msg;
      msg << "A(z) is numerically singular at quadrature node " << z << " (rcond " << lu.rcond()
          << "); move the contour away from the spectrum";
      throw ContourError(msg.str());
    }
    solves[k] = lu.solve(probe);
    // (1/2 pi i) dz dtheta with dtheta = 2 pi / N.
    weights[k] = dz / Complex(0.0, static_cast<double>(nodes));
    zetas[k] = (z - c.center) / rho;
  });

  std::vector<CMatrix> moments(static_cast<size_t>(moment_count), CMatrix::Zero(n, l));
  double mass = 0.0;
  for (int k = 0; k < nodes; ++k) {
    Complex zp = weights[static_cast<size_t>(k)];
    for (int p = 0; p < moment_count; ++p) {
      moments[static_cast<size_t>(p)] += zp * solves[static_cast<size_t>(k)];
      zp *= zetas[static_cast<size_t>(k)];
    }
    mass += std::abs(weights[static_cast<size_t>(k)]) * solves[static_cast<size_t>(k)].norm();
  }
  solves.clear();
  // Rounding level of the quadrature sums; singular values below it are noise.
  const double floor = 100.0 * std::numeric_limits<double>::epsilon() * mass;

  auto hankel_rank = [&](int k) {
    Eigen::BDCSVD<CMatrix> svd(hankel(moments, k, 0));
    return rank_of(svd, opts.rank_tol, floor);
  };
  int k = opts.min_moments;
  Index rank = hankel_rank(k);
  while (true) {
    if (2 * k > max_k) {
      std::ostringstream msg;
      msg << "moment rank did not stagnate (rank " << rank << " with " << k << " moment pairs, probe width " << l
          << "); increase the probe rank";
      throw CapacityError(msg.str());
    }
    const Index next = hankel_rank(2 * k);
    if (next == rank) break;
    k *= 2;
    rank = next;
  }
  result.moments = k;
  if (rank == 0) return result;

  const CMatrix h0 = hankel(moments, k, 0);
  const CMatrix h1 = hankel(moments, k, 1);
  Eigen::BDCSVD<CMatrix> svd(h0, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const CMatrix v0 = svd.matrixU().leftCols(rank);
  const CMatrix w0 = svd.matrixV().leftCols(rank);
  const RVector s0 = svd.singularValues().head(rank);
  const CMatrix d = v0.adjoint() * h1 * w0 * s0.cwiseInverse().asDiagonal();
  Eigen::ComplexEigenSolver<CMatrix> eig(d, false);

  std::vector<Complex> inside;
  for (Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const Complex lambda = c.center + rho * eig.eigenvalues()(i);
    if (c.contains(lambda)) inside.push_back(lambda);
  }
  std::sort(inside.begin(), inside.end(), [](Complex a, Complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });

  result.moment_basis = m_orthonormalize(space, v0.topRows(n), 1e-8).basis;

  // Single-linkage clustering.
  const double merge = opts.cluster_tol * rho;
  std::vector<std::vector<Complex>> clusters;
  std::vector<bool> used(inside.size(), false);
  for (size_t i = 0; i < inside.size(); ++i) {
    if (used[i]) continue;
    std::vector<Complex> cl{inside[i]};
    used[i] = true;
    for (size_t q = 0; q < cl.size(); ++q) {
      for (size_t j = 0; j < inside.size(); ++j) {
        if (!used[j] && std::abs(inside[j] - cl[q]) <= merge) {
          used[j] = true;
          cl.push_back(inside[j]);
        }
      }
    }
    clusters.push_back(std::move(cl));
  }

  const bool restrict_kernel = n > kDenseLimit;
  const bool restrict_chain = n > kFullChainLimit;
  auto mean_of = [](const std::vector<Complex>& cl) {
    Complex sum = 0.0;
    for (const auto& z : cl) sum += z;
    return sum / static_cast<double>(cl.size());
  };
  // A defective eigenvalue of chain length m splits under rounding by about
  // eps^(1/m), which can exceed the merge radius.  Nearby clusters within
  // sqrt(cluster_tol) are merged when the Jordan structure at their common
  // mean accounts for the combined multiplicity.
  const double defect_merge = std::sqrt(opts.cluster_tol) * 1e-1 * rho;
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i < clusters.size() && !changed; ++i) {
      for (size_t j = i + 1; j < clusters.size() && !changed; ++j) {
        const Complex mi = mean_of(clusters[i]), mj = mean_of(clusters[j]);
        if (std::abs(mi - mj) > defect_merge) continue;
        std::vector<Complex> joint = clusters[i];
        joint.insert(joint.end(), clusters[j].begin(), clusters[j].end());
        const int want = static_cast<int>(joint.size());
        try {
          const KappaResult kr = jordan_kappa(f, mean_of(joint), want + 1, opts.rank_tol,
                                              restrict_chain ? result.moment_basis : CMatrix());
          if (kr.alg < want) continue;
        } catch (const UsageError&) {
          continue;
        } catch (const InconclusiveError&) {
          continue;
        }
        clusters[i] = std::move(joint);
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(j));
        changed = true;
      }
    }
  }

  for (const auto& cl : clusters) {
    Eigenpair ep;
    Complex sum = 0.0;
    for (const auto& z : cl) sum += z;
    ep.lambda = sum / static_cast<double>(cl.size());
    ep.alg = static_cast<int>(cl.size());
    const CMatrix form = f.evaluate_form(ep.lambda);
    // |A(lambda)| itself vanishes on one-dimensional levels, so rank and
    // residual decisions are relative to the term-wise bound.
    ep.scale = f.norm_bound(ep.lambda);

    CMatrix candidates;
    RVector sigma;
    if (restrict_kernel) {
      const CMatrix& q = result.moment_basis;
      Eigen::BDCSVD<CMatrix> ksvd(space.iso_left(form * q), Eigen::ComputeThinV);
      sigma = ksvd.singularValues();
      candidates = q * ksvd.matrixV();
    } else {
      Eigen::BDCSVD<CMatrix> ksvd(space.form_to_iso(form), Eigen::ComputeFullV);
      sigma = ksvd.singularValues();
      candidates = space.from_iso(ksvd.matrixV());
    }
    // Singular values are descending; the kernel is the trailing block.
    const Index m = sigma.size();
    Index geo = 0;
    while (geo < m && sigma(m - 1 - geo) <= opts.rank_tol * ep.scale) ++geo;
    geo = std::clamp<Index>(geo, 1, ep.alg);
    ep.geo = static_cast<int>(geo);
    ep.vectors = candidates.rightCols(geo);
    ep.residual = residual_of(space, form, ep.vectors);
    if (ep.residual > opts.residual_tol * ep.scale) {
      std::ostringstream msg;
      msg << "eigenvalue " << ep.lambda << " has relative residual " << ep.residual / ep.scale
          << "; refine the quadrature or move the contour";
      throw ContourError(msg.str());
    }
    if (ep.alg == ep.geo) {
      ep.kappa = 1;
    } else {
      const KappaResult kr = jordan_kappa(f, ep.lambda, ep.alg + 1, opts.rank_tol,
                                          restrict_chain ? result.moment_basis : CMatrix());
      ep.kappa = std::clamp(kr.kappa, 1, ep.alg);
    }
    result.total_alg += ep.alg;
    result.eigenvalues.push_back(std::move(ep));
  }
  return result;
}

}  // namespace holofredholm
