// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

#include "holofredholm/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/tools/roots.hpp>
#include <Eigen/Eigenvalues>

#include "holofredholm/errors.hpp"

namespace holofredholm {

namespace {

const std::vector<Index> kDefaultLevels = {32, 64, 128, 256};

std::vector<double> uniform_nodes(double a, double b, Index cells) {
  std::vector<double> x(static_cast<size_t>(cells) + 1);
  for (Index i = 0; i <= cells; ++i) x[static_cast<size_t>(i)] = a + (b - a) * static_cast<double>(i) / cells;
  x.back() = b;
  return x;
}

double max_width(const std::vector<double>& x) {
  double h = 0.0;
  for (size_t i = 0; i + 1 < x.size(); ++i) h = std::max(h, x[i + 1] - x[i]);
  return h;
}

void check_levels(const std::vector<Index>& levels, Index reference_cells, Index divisor) {
  if (levels.empty()) throw UsageError("at least one level is required");
  Index prev = 0;
  for (Index c : levels) {
    if (c < 2 || c % divisor != 0) {
      std::ostringstream msg;
      msg << "level cell count " << c << " must be a positive multiple of " << divisor;
      throw UsageError(msg.str());
    }
    if (c <= prev) throw UsageError("level cell counts must be strictly increasing");
    if (reference_cells % c != 0) {
      std::ostringstream msg;
      msg << "level cell count " << c << " must divide the reference cell count " << reference_cells;
      throw UsageError(msg.str());
    }
    prev = c;
  }
}

// P1 interpolation weights of the point x on interior nodes (boundary values are zero).
std::vector<std::pair<Index, double>> interpolation_weights(const std::vector<double>& nodes, double x) {
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  size_t e = it == nodes.begin() ? 0 : static_cast<size_t>(it - nodes.begin()) - 1;
  e = std::min(e, nodes.size() - 2);
  const double a = nodes[e], b = nodes[e + 1];
  std::vector<std::pair<Index, double>> w;
  const Index n_int = static_cast<Index>(nodes.size()) - 2;
  auto push = [&](size_t node, double weight) {
    const Index idx = static_cast<Index>(node) - 1;
    if (idx >= 0 && idx < n_int && weight != 0.0) w.emplace_back(idx, weight);
  };
  if (std::abs(x - a) <= 1e-14) {
    push(e, 1.0);
  } else if (std::abs(x - b) <= 1e-14) {
    push(e + 1, 1.0);
  } else {
    const double t = (x - a) / (b - a);
    push(e, 1.0 - t);
    push(e + 1, t);
  }
  return w;
}

// Reflection-type witness on the interior nodes.  With reflect_right the
// formula u -> -u + 2 u(-x) acts on x > 0; otherwise u -> u - 2 u(-x) on x < 0
// and u -> -u on x > 0.
CMatrix reflection_operator(const std::vector<double>& nodes, bool reflect_right) {
  const Index n = static_cast<Index>(nodes.size()) - 2;
  CMatrix t = CMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const double x = nodes[static_cast<size_t>(i) + 1];
    if (reflect_right) {
      if (x > 0.0) {
        t(i, i) -= 1.0;
        for (const auto& [j, w] : interpolation_weights(nodes, -x)) t(i, j) += 2.0 * w;
      } else {
        t(i, i) = 1.0;
      }
    } else {
      if (x < 0.0) {
        t(i, i) += 1.0;
        for (const auto& [j, w] : interpolation_weights(nodes, -x)) t(i, j) -= 2.0 * w;
      } else {
        t(i, i) = -1.0;
      }
    }
  }
  return t;
}

HolomorphicOpFunction pencil(const GramSpace& space, const CMatrix& stiffness, const CMatrix& mass) {
  return HolomorphicOpFunction(space, {ScalarHolo::constant(1.0), ScalarHolo::polynomial({0.0, -1.0})},
                               {stiffness, mass});
}

double nearest_gap(const std::vector<double>& roots, double x) {
  double gap = std::numeric_limits<double>::infinity();
  for (double r : roots) {
    if (r != x) gap = std::min(gap, std::abs(r - x));
  }
  return gap;
}

}  // namespace

P1Matrices assemble_p1(const std::vector<double>& nodes, const std::function<double(double, double)>& coefficient) {
  if (nodes.size() < 3) throw UsageError("assemble_p1: need at least two cells");
  const Index cells = static_cast<Index>(nodes.size()) - 1;
  const Index n = cells - 1;
  P1Matrices out{CMatrix::Zero(n, n), CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
  for (Index e = 0; e < cells; ++e) {
    const double a = nodes[static_cast<size_t>(e)], b = nodes[static_cast<size_t>(e) + 1];
    const double h = b - a;
    if (!(h > 0.0)) throw UsageError("assemble_p1: nodes must be strictly increasing");
    const double s = coefficient(a, b);
    const Index idx[2] = {e - 1, e};
    const double k[2][2] = {{1.0, -1.0}, {-1.0, 1.0}};
    const double m[2][2] = {{2.0, 1.0}, {1.0, 2.0}};
    for (int p = 0; p < 2; ++p) {
      for (int q = 0; q < 2; ++q) {
        const Index i = idx[p], j = idx[q];
        if (i < 0 || j < 0 || i >= n || j >= n) continue;
        out.stiffness(i, j) += s * k[p][q] / h;
        out.laplace(i, j) += k[p][q] / h;
        out.mass(i, j) += h / 6.0 * m[p][q];
      }
    }
  }
  return out;
}

CMatrix p1_prolongation(const std::vector<double>& coarse_nodes, const std::vector<double>& fine_nodes) {
  const Index nc = static_cast<Index>(coarse_nodes.size()) - 2;
  const Index nf = static_cast<Index>(fine_nodes.size()) - 2;
  CMatrix e = CMatrix::Zero(nf, nc);
  for (Index i = 0; i < nf; ++i) {
    for (const auto& [j, w] : interpolation_weights(coarse_nodes, fine_nodes[static_cast<size_t>(i) + 1])) {
      e(i, j) = w;
    }
  }
  return e;
}

std::vector<double> default_shift_scales() { return {0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0}; }

ShiftResult coercivity_search(const HolomorphicOpFunction& f, const CMatrix& t, Complex probe,
                              const CMatrix& shift_form, const std::vector<double>& scales) {
  const CMatrix base = MatrixApplier(t).adjoint_apply(f.evaluate_form(probe));
  for (double s : scales) {
    const double c = coercivity_constant_form(f.space(), base + s * shift_form);
    if (c > 1e-6) return ShiftResult{s * shift_form, s, c};
  }
  std::ostringstream msg;
  msg << "no scale in the list makes T^*A + sK coercive at " << probe;
  throw WitnessError(msg.str());
}

std::vector<double> sign_changing_dispersion_roots(double sp, double sm, double lo, double hi) {
  if (!(sp > 0.0) || !(sm > 0.0)) throw UsageError("dispersion relation needs positive coefficients");
  std::vector<double> roots;
  boost::math::tools::eps_tolerance<double> tol(52);
  auto solve = [&](const std::function<double(double)>& g, double a, double b) {
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(g, a, b, tol, iters);
    return 0.5 * (r.first + r.second);
  };
  // Positive branch: sin on the left, sinh on the right.
  auto g_pos = [&](double lam) {
    const double kp = std::sqrt(lam / sp), km = std::sqrt(lam / sm);
    return sp * kp * std::cos(kp) * std::tanh(km) - sm * km * std::sin(kp);
  };
  // Negative branch: sinh on the left, sin on the right.
  auto g_neg = [&](double lam) {
    const double kp = std::sqrt(-lam / sp), km = std::sqrt(-lam / sm);
    return sp * kp * std::sin(km) - sm * km * std::cos(km) * std::tanh(kp);
  };
  const double dk = 0.005;
  if (hi > 0.0) {
    const double kmax = std::sqrt(hi / sp);
    double prev_l = sp * 1e-12, prev_g = g_pos(prev_l);
    for (double k = dk; k <= kmax + dk; k += dk) {
      const double l = std::min(sp * k * k, hi);
      const double g = g_pos(l);
      if (g == 0.0) {
        if (l >= lo) roots.push_back(l);
      } else if ((prev_g < 0) != (g < 0) && prev_g != 0.0) {
        const double r = solve(g_pos, prev_l, l);
        if (r >= lo && r <= hi) roots.push_back(r);
      }
      prev_l = l;
      prev_g = g;
      if (l >= hi) break;
    }
  }
  if (lo < 0.0) {
    const double kmax = std::sqrt(-lo / sm);
    double prev_l = -sm * 1e-12, prev_g = g_neg(prev_l);
    for (double k = dk; k <= kmax + dk; k += dk) {
      const double l = std::max(-sm * k * k, lo);
      const double g = g_neg(l);
      if (g == 0.0) {
        if (l <= hi) roots.push_back(l);
      } else if ((prev_g < 0) != (g < 0) && prev_g != 0.0) {
        const double r = solve(g_neg, l, prev_l);
        if (r >= lo && r <= hi) roots.push_back(r);
      }
      prev_l = l;
      prev_g = g;
      if (l <= lo) break;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<Complex> metamaterial_linearization_eigenvalues(const CMatrix& k0, const CMatrix& k1, const CMatrix& m,
                                                            Complex center, double radius) {
  const Index n = k0.rows();
  // (z-1)(K0 - z M) + z K1 = z^2 A2 + z A1 + A0.
  const CMatrix a0 = -k0;
  const CMatrix a1 = k0 + k1 + m;
  const CMatrix a2 = -m;
  const double n0 = k0.cwiseAbs().colwise().sum().maxCoeff();
  const double n1 = k1.cwiseAbs().colwise().sum().maxCoeff();
  const double nm = m.cwiseAbs().colwise().sum().maxCoeff();

  std::vector<std::pair<Complex, CVector>> pairs;
  if (2 * n <= 400) {
    // First companion form B^{-1} A with A = [[0, I], [-A0, -A1]], B = diag(I, A2).
    const Eigen::PartialPivLU<CMatrix> lu2(a2);
    CMatrix c = CMatrix::Zero(2 * n, 2 * n);
    c.topRightCorner(n, n) = CMatrix::Identity(n, n);
    c.bottomLeftCorner(n, n) = -lu2.solve(a0);
    c.bottomRightCorner(n, n) = -lu2.solve(a1);
    Eigen::ComplexEigenSolver<CMatrix> eig(c);
    for (Index i = 0; i < 2 * n; ++i) pairs.emplace_back(eig.eigenvalues()(i), eig.eigenvectors().col(i).head(n));
  } else {
    // Shift-invert Arnoldi on the same pencil.
    const Complex sigma = center;
    const LuSolver lu(a0 + sigma * a1 + sigma * sigma * a2);
    const MatrixApplier apply_a1(a1), apply_a2(a2);
    auto op = [&](const CVector& w) {
      const CVector b1 = w.head(n);
      const CVector b2 = apply_a2(w.tail(n));
      const CVector rhs = -b2 - apply_a1(b1) - sigma * apply_a2(b1);
      const CVector x = lu.solve(rhs);
      CVector out(2 * n);
      out.head(n) = x;
      out.tail(n) = b1 + sigma * x;
      return out;
    };
    const Index steps = std::min<Index>(2 * n, 160);
    CMatrix v = CMatrix::Zero(2 * n, steps + 1);
    CMatrix hm = CMatrix::Zero(steps + 1, steps);
    v.col(0) = random_matrix(2 * n, 1, 99).col(0).normalized();
    Index m_used = steps;
    for (Index j = 0; j < steps; ++j) {
      CVector w = op(v.col(j));
      for (int pass = 0; pass < 2; ++pass) {
        const CVector coeff = v.leftCols(j + 1).adjoint() * w;
        hm.col(j).head(j + 1) += coeff;
        w -= v.leftCols(j + 1) * coeff;
      }
      const double beta = w.norm();
      hm(j + 1, j) = beta;
      if (beta < 1e-14 * hm.col(j).norm()) {
        m_used = j + 1;
        break;
      }
      v.col(j + 1) = w / beta;
    }
    Eigen::ComplexEigenSolver<CMatrix> eig(hm.topLeftCorner(m_used, m_used));
    for (Index i = 0; i < m_used; ++i) {
      const Complex theta = eig.eigenvalues()(i);
      if (std::abs(theta) == 0.0) continue;
      const CVector y = v.leftCols(m_used) * eig.eigenvectors().col(i);
      pairs.emplace_back(sigma + 1.0 / theta, y.head(n));
    }
  }

  std::vector<Complex> out;
  for (const auto& [z, x] : pairs) {
    if (std::abs(z - center) >= radius) continue;
    if (std::abs(z - 1.0) < 1e-8 || std::abs(z) < 1e-8) continue;
    const Complex g = z / (z - 1.0);
    const CVector r = k0 * x + g * (k1 * x) - z * (m * x);
    const double scale = (n0 + std::abs(g) * n1 + std::abs(z) * nm) * x.norm();
    if (!(r.norm() <= 1e-9 * scale)) {
      std::ostringstream msg;
      msg << "linearization eigenvalue " << z << " failed the residual check (" << r.norm() / scale << ")";
      throw Error(msg.str());
    }
    out.push_back(z);
  }
  std::sort(out.begin(), out.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
  return out;
}

ModelProblem build_sign_changing(double sigma_plus, double sigma_minus, const std::vector<Index>& level_cells,
                                 Index reference_cells, bool asymmetric, double grading) {
  if (!(sigma_plus > 0.0) || !(sigma_minus > 0.0)) throw UsageError("sign_changing: coefficients must be positive");
  if (std::abs(sigma_minus / sigma_plus - 1.0) < 1e-6) {
    throw UsageError("sign_changing: contrast is critical (sigma_minus == sigma_plus); T is not invertible there");
  }
  const std::vector<Index> levels = level_cells.empty() ? kDefaultLevels : level_cells;
  check_levels(levels, reference_cells, 2);
  if (asymmetric && !(std::abs(grading) > 0.0 && std::abs(grading) < 0.5)) {
    throw UsageError("sign_changing_asym: grading must lie in (0, 0.5) in magnitude");
  }
  auto make_nodes = [&](Index cells) {
    std::vector<double> x = uniform_nodes(-1.0, 1.0, cells);
    if (asymmetric) {
      for (auto& xi : x) xi = xi + grading * (1.0 - xi * xi);
    }
    return x;
  };
  auto coefficient = [&](double a, double b) {
    if (b <= 0.0) return sigma_plus;
    if (a >= 0.0) return -sigma_minus;
    return (sigma_plus * (-a) - sigma_minus * b) / (b - a);
  };
  const std::vector<double> ref_nodes = make_nodes(reference_cells);
  const P1Matrices p1 = assemble_p1(ref_nodes, coefficient);
  GramSpace space(p1.laplace);
  HolomorphicOpFunction f = pencil(space, p1.stiffness, p1.mass);

  std::vector<CMatrix> embeddings;
  std::vector<double> widths;
  for (Index c : levels) {
    const std::vector<double> nodes = make_nodes(c);
    embeddings.push_back(c == reference_cells ? CMatrix(CMatrix::Identity(c - 1, c - 1)) : p1_prolongation(nodes, ref_nodes));
    widths.push_back(max_width(nodes));
  }
  GalerkinHierarchy hierarchy(space, std::move(embeddings));

  const std::vector<double> roots = sign_changing_dispersion_roots(sigma_plus, sigma_minus, -200.0, 200.0);
  double first_pos = 0.0, second_pos = 0.0;
  for (double r : roots) {
    if (r > 0.0 && first_pos == 0.0) {
      first_pos = r;
    } else if (r > 0.0 && second_pos == 0.0) {
      second_pos = r;
    }
  }
  if (first_pos == 0.0 || second_pos == 0.0) throw Error("sign_changing: dispersion relation has too few roots");

  ModelProblem mp{asymmetric ? "sign_changing_asym" : "sign_changing",
                  std::move(f),
                  std::move(hierarchy),
                  {},
                  std::move(widths),
                  {},
                  "roots of the transmission dispersion relation at 0 (bracketed TOMS 748)",
                  {},
                  {},
                  {},
                  0.5,
                  asymmetric};
  for (double r : roots) mp.reference_eigenvalues.emplace_back(r, 0.0);
  const double radius = std::min(3.0, 0.5 * nearest_gap(roots, first_pos));
  mp.suggested_contours.push_back(Contour::circle(first_pos, radius, 64));
  mp.stability_center = 0.5 * (first_pos + second_pos);
  mp.stability_radius = 0.5;
  mp.tcompat_lambda = mp.stability_center;

  mp.witness.t = reflection_operator(ref_nodes, sigma_minus < sigma_plus);
  mp.witness.probes = {mp.tcompat_lambda};
  const ShiftResult k = coercivity_search(mp.f, mp.witness.t, mp.tcompat_lambda, p1.mass, default_shift_scales());
  mp.witness.k_form = k.k_form;
  mp.witness.k_scale = k.scale;
  mp.witness.constant = k.constant;
  return mp;
}

ModelProblem build_metamaterial(const std::vector<Index>& level_cells, Index reference_cells) {
  const std::vector<Index> levels = level_cells.empty() ? kDefaultLevels : level_cells;
  check_levels(levels, reference_cells, 2);
  const std::vector<double> ref_nodes = uniform_nodes(0.0, 1.0, reference_cells);
  auto on = [](bool left) {
    return [left](double a, double b) {
      const double mid = 0.5 * (a + b);
      return (mid < 0.5) == left ? 1.0 : 0.0;
    };
  };
  const P1Matrices left = assemble_p1(ref_nodes, on(true));
  const P1Matrices right = assemble_p1(ref_nodes, on(false));
  GramSpace space(left.laplace);
  HolomorphicOpFunction f(space,
                          {ScalarHolo::constant(1.0), ScalarHolo::rational({0.0, 1.0}, {-1.0, 1.0}),
                           ScalarHolo::polynomial({0.0, -1.0})},
                          {left.stiffness, right.stiffness, left.mass});

  std::vector<CMatrix> embeddings;
  std::vector<double> widths;
  for (Index c : levels) {
    const std::vector<double> nodes = uniform_nodes(0.0, 1.0, c);
    embeddings.push_back(c == reference_cells ? CMatrix(CMatrix::Identity(c - 1, c - 1)) : p1_prolongation(nodes, ref_nodes));
    widths.push_back(max_width(nodes));
  }
  GalerkinHierarchy hierarchy(space, std::move(embeddings));

  const Contour contour = Contour::circle(25.2, 18.5, 192);
  ModelProblem mp{"metamaterial",
                  std::move(f),
                  std::move(hierarchy),
                  {},
                  std::move(widths),
                  {},
                  "companion linearization of the denominator-cleared quadratic pencil",
                  {contour},
                  Complex(25.0, 0.0),
                  Complex(25.0, 0.0),
                  5.0,
                  false};
  mp.reference_eigenvalues = metamaterial_linearization_eigenvalues(left.stiffness, right.stiffness, left.mass,
                                                                    contour.center, contour.radius());
  // Second contour isolating the smallest eigenvalue, for convergence studies.
  if (!mp.reference_eigenvalues.empty()) {
    const Complex first = mp.reference_eigenvalues.front();
    double radius = std::min(3.0, 0.5 * std::abs(first - 1.0));
    for (std::size_t i = 1; i < mp.reference_eigenvalues.size(); ++i) {
      radius = std::min(radius, 0.5 * std::abs(mp.reference_eigenvalues[i] - first));
    }
    mp.suggested_contours.push_back(Contour::circle(first, radius, 64));
  }
  mp.witness.t = CMatrix::Identity(space.dim(), space.dim());
  mp.witness.probes = {mp.tcompat_lambda};
  const ShiftResult k = coercivity_search(mp.f, mp.witness.t, mp.tcompat_lambda, left.mass, default_shift_scales());
  mp.witness.k_form = k.k_form;
  mp.witness.k_scale = k.scale;
  mp.witness.constant = k.constant;
  return mp;
}

namespace {

ModelProblem small_model(std::string name, HolomorphicOpFunction f, std::vector<CMatrix> embeddings,
                         std::vector<double> widths, double stability_center, double stability_radius,
                         Complex tcompat) {
  GalerkinHierarchy hierarchy(f.space(), std::move(embeddings));
  ModelProblem mp{std::move(name),
                  std::move(f),
                  std::move(hierarchy),
                  {},
                  std::move(widths),
                  {Complex(0.0, 0.0)},
                  "hand computation: det A(z) = z^2, Jordan chain of length 2 at 0",
                  {Contour::circle(0.0, 0.5, 64)},
                  tcompat,
                  stability_center,
                  stability_radius,
                  false};
  const Index n = mp.f.dim();
  mp.witness.t = CMatrix::Identity(n, n);
  mp.witness.probes = {tcompat};
  const ShiftResult k = coercivity_search(mp.f, mp.witness.t, tcompat, mp.f.space().gram(), default_shift_scales());
  mp.witness.k_form = k.k_form;
  mp.witness.k_scale = k.scale;
  mp.witness.constant = k.constant;
  return mp;
}

}  // namespace

ModelProblem build_jordan_toy(double epsilon) {
  if (!std::isfinite(epsilon)) throw UsageError("jordan_toy: epsilon must be finite");
  const GramSpace space = GramSpace::identity(2);
  CMatrix nil = CMatrix::Zero(2, 2);
  nil(0, 1) = 1.0;
  HolomorphicOpFunction f(space, {ScalarHolo::identity(), ScalarHolo::constant(1.0)},
                          {CMatrix::Identity(2, 2), nil});
  CMatrix e0(2, 1);
  e0 << 1.0, epsilon;
  return small_model("jordan_toy", std::move(f), {e0, CMatrix::Identity(2, 2)}, {1.0, 0.5}, 0.0, 0.3,
                     Complex(0.25, 0.0));
}

ModelProblem build_jordan_split_family(double epsilon) {
  if (!(epsilon > 0.0)) throw UsageError("jordan_split_family: epsilon must be positive");
  const GramSpace space = GramSpace::identity(3);
  CMatrix lead = CMatrix::Zero(3, 3);
  lead(0, 0) = lead(1, 1) = 1.0;
  CMatrix rest = CMatrix::Zero(3, 3);
  rest(0, 1) = rest(2, 2) = 1.0;
  HolomorphicOpFunction f(space, {ScalarHolo::identity(), ScalarHolo::constant(1.0)}, {lead, rest});
  const double t = std::sqrt(epsilon);
  CMatrix e0 = CMatrix::Zero(3, 2);
  e0(0, 0) = e0(1, 1) = 1.0;
  e0(2, 0) = e0(2, 1) = t;
  return small_model("jordan_split_family", std::move(f), {e0, CMatrix::Identity(3, 3)}, {t, 0.5 * t}, 0.0, 0.3,
                     Complex(0.25, 0.0));
}

ModelProblem build_laplacian(const std::vector<Index>& level_cells, Index reference_cells) {
  const std::vector<Index> levels = level_cells.empty() ? kDefaultLevels : level_cells;
  check_levels(levels, reference_cells, 1);
  const std::vector<double> ref_nodes = uniform_nodes(0.0, 1.0, reference_cells);
  const P1Matrices p1 = assemble_p1(ref_nodes, [](double, double) { return 1.0; });
  GramSpace space(p1.laplace);
  HolomorphicOpFunction f = pencil(space, p1.stiffness, p1.mass);
  std::vector<CMatrix> embeddings;
  std::vector<double> widths;
  for (Index c : levels) {
    const std::vector<double> nodes = uniform_nodes(0.0, 1.0, c);
    embeddings.push_back(c == reference_cells ? CMatrix(CMatrix::Identity(c - 1, c - 1)) : p1_prolongation(nodes, ref_nodes));
    widths.push_back(max_width(nodes));
  }
  GalerkinHierarchy hierarchy(space, std::move(embeddings));
  const double pi2 = std::pow(std::acos(-1.0), 2);
  ModelProblem mp{"laplacian",
                  std::move(f),
                  std::move(hierarchy),
                  {},
                  std::move(widths),
                  {Complex(pi2, 0.0), Complex(4.0 * pi2, 0.0)},
                  "closed form (k pi)^2",
                  {Contour::circle(pi2, 5.0, 64)},
                  Complex(0.0, 0.0),
                  Complex(-5.0, 0.0),
                  1.0,
                  false};
  mp.witness.t = CMatrix::Identity(space.dim(), space.dim());
  mp.witness.k_form = CMatrix::Zero(space.dim(), space.dim());
  mp.witness.probes = {mp.tcompat_lambda};
  return mp;
}

// ---------------------------------------------------------------------------
// Registry

namespace {

double param(const std::map<std::string, double>& p, const std::string& key) { return p.at(key); }

Index cells_param(const std::map<std::string, double>& p, const std::string& key) {
  const double v = p.at(key);
  if (v != std::floor(v) || v < 2) throw UsageError(key + " must be an integer >= 2");
  return static_cast<Index>(v);
}

}  // namespace

ModelRegistry ModelRegistry::with_defaults() {
  ModelRegistry r;
  const std::vector<ModelParam> sign_params = {
      {"sigma_plus", 1.0, "coefficient on (-1,0)"},
      {"sigma_minus", 0.5, "magnitude of the negative coefficient on (0,1)"},
      {"reference_cells", 2048, "cells of the reference mesh"}};
  r.add({"sign_changing", "P1 transmission problem with sign-changing coefficient, symmetric meshes", sign_params,
         [](const std::map<std::string, double>& p, const std::vector<Index>& levels) {
           return build_sign_changing(param(p, "sigma_plus"), param(p, "sigma_minus"), levels,
                                      cells_param(p, "reference_cells"), false);
         }});
  std::vector<ModelParam> asym_params = sign_params;
  asym_params.push_back({"grading", 0.05, "mesh map x -> x + grading (1 - x^2)"});
  r.add({"sign_changing_asym", "negative control: same problem on graded meshes not symmetric about 0", asym_params,
         [](const std::map<std::string, double>& p, const std::vector<Index>& levels) {
           return build_sign_changing(param(p, "sigma_plus"), param(p, "sigma_minus"), levels,
                                      cells_param(p, "reference_cells"), true, param(p, "grading"));
         }});
  r.add({"metamaterial", "rational function K0 + z/(z-1) K1 - z M with a pole at 1",
         {{"reference_cells", 2048, "cells of the reference mesh"}},
         [](const std::map<std::string, double>& p, const std::vector<Index>& levels) {
           return build_metamaterial(levels, cells_param(p, "reference_cells"));
         }});
  r.add({"jordan_toy", "2x2 Jordan block [[z,1],[0,z]] with a tilted one-dimensional coarse level",
         {{"epsilon", 0.1, "tilt of the coarse basis vector e1 + epsilon e2"}},
         [](const std::map<std::string, double>& p, const std::vector<Index>&) {
           return build_jordan_toy(param(p, "epsilon"));
         }});
  return r;
}

void ModelRegistry::add(ModelEntry entry) {
  if (entry.name.empty() || !entry.build) throw UsageError("ModelRegistry: entry needs a name and a builder");
  if (contains(entry.name)) throw UsageError("ModelRegistry: duplicate model name " + entry.name);
  entries_.push_back(std::move(entry));
}

bool ModelRegistry::contains(const std::string& name) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const ModelEntry& e) { return e.name == name; });
}

const ModelEntry& ModelRegistry::get(const std::string& name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return e;
  }
  throw UsageError("unknown model: " + name);
}

std::vector<std::string> ModelRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

std::string ModelRegistry::listing() const {
  std::ostringstream out;
  for (const auto& e : entries_) {
    out << e.name << ": " << e.description;
    if (!e.params.empty()) {
      out << " [";
      for (size_t i = 0; i < e.params.size(); ++i) {
        if (i) out << ", ";
        out << "model." << e.params[i].name << "=" << e.params[i].default_value;
      }
      out << "]";
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace holofredholm
