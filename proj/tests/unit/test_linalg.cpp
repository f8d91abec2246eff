// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "holofredholm/errors.hpp"
#include "holofredholm/linalg.hpp"

using namespace holofredholm;

namespace {

CMatrix random_spd(Index n, std::uint64_t seed) {
  const CMatrix a = random_matrix(n, n, seed);
  return a * a.adjoint() + static_cast<double>(n) * CMatrix::Identity(n, n);
}

CVector vec2(Complex a, Complex b) {
  CVector v(2);
  v << a, b;
  return v;
}

CMatrix diag(std::initializer_list<double> d) {
  CMatrix m = CMatrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
  Index i = 0;
  for (double x : d) {
    m(i, i) = x;
    ++i;
  }
  return m;
}

// <Bu,u>_X / <u,u>_X evaluated straight from the Gram matrix.
double gain(const CMatrix& g, const CMatrix& b, const CVector& u) {
  const CVector bu = b * u;
  return std::sqrt(std::real(bu.dot(g * bu)) / std::real(u.dot(g * u)));
}

}  // namespace

TEST_CASE("x_inner examples") {
  const GramSpace id = GramSpace::identity(2);
  CHECK(std::abs(x_inner(id, vec2(1, 0), vec2(0, 1))) == 0.0);
  CHECK(std::abs(x_inner(id, vec2(1, 1), vec2(1, 1)) - 2.0) < 1e-15);
  const GramSpace g(diag({2, 3}));
  CHECK(std::abs(x_inner(g, vec2(1, 1), vec2(1, 1)) - 5.0) < 1e-14);
  CHECK(x_norm(g, vec2(1, 0)) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("x_inner is linear in u and conjugate linear in v") {
  const GramSpace g(random_spd(4, 3));
  const CMatrix uv = random_matrix(4, 2, 4);
  const Complex a{0.3, -1.2};
  const Complex lhs = x_inner(g, a * uv.col(0), uv.col(1));
  CHECK(std::abs(lhs - a * x_inner(g, uv.col(0), uv.col(1))) < 1e-12);
  const Complex rhs = x_inner(g, uv.col(0), a * uv.col(1));
  CHECK(std::abs(rhs - std::conj(a) * x_inner(g, uv.col(0), uv.col(1))) < 1e-12);
}

TEST_CASE("x_adjoint examples") {
  const CMatrix b = random_matrix(3, 3, 11);
  CHECK((x_adjoint(GramSpace::identity(3), b) - b.adjoint()).norm() < 1e-14);

  const CMatrix g = random_spd(3, 12);
  const CMatrix h = random_matrix(3, 3, 13);
  const CMatrix herm = g.inverse() * (h + h.adjoint());
  const GramSpace space(g);
  CHECK((x_adjoint(space, herm) - herm).norm() < 1e-12 * herm.norm());

  CMatrix b2 = CMatrix::Zero(2, 2);
  b2(0, 1) = 1.0;
  CMatrix expected = CMatrix::Zero(2, 2);
  expected(1, 0) = 2.0;
  CHECK((x_adjoint(GramSpace(diag({2, 1})), b2) - expected).norm() < 1e-15);
}

TEST_CASE("x_adjoint is an involution and satisfies the adjoint identity") {
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const Index n = 2 + static_cast<Index>(trial % 5);
    const GramSpace space(random_spd(n, 100 + trial));
    const CMatrix b = random_matrix(n, n, 300 + trial);
    const CMatrix uv = random_matrix(n, 2, 500 + trial);
    const CMatrix bs = x_adjoint(space, b);
    CHECK((x_adjoint(space, bs) - b).norm() <= 1e-12 * b.norm());
    const Complex lhs = x_inner(space, b * uv.col(0), uv.col(1));
    const Complex rhs = x_inner(space, uv.col(0), bs * uv.col(1));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("min_max_gsv examples") {
  const GsvRange d = min_max_gsv(GramSpace::identity(2), diag({1, 3}));
  CHECK(d.min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.max == doctest::Approx(3.0).epsilon(1e-12));
  const GsvRange z = min_max_gsv(GramSpace::identity(3), CMatrix::Zero(3, 3));
  CHECK(z.min == 0.0);
  CHECK(z.max == 0.0);
  const GsvRange i = min_max_gsv(GramSpace(diag({4, 1})), CMatrix::Identity(2, 2));
  CHECK(i.min == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(i.max == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("min_max_gsv is sandwiched by random sampling") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal;
  for (Index n : {2, 3}) {
    const CMatrix g = random_spd(n, 40 + n);
    const CMatrix b = random_matrix(n, n, 60 + n);
    const GramSpace space(g);
    const GsvRange r = min_max_gsv(space, b);
    double brute_max = 0.0, brute_min = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 10000; ++s) {
      // Uniform on the X-unit sphere: Gaussian in isometric coordinates.
      CVector y(n);
      for (Index i = 0; i < n; ++i) y(i) = Complex(normal(rng), normal(rng));
      const CVector u = space.from_iso(y);
      const double q = gain(g, b, u);
      brute_max = std::max(brute_max, q);
      brute_min = std::min(brute_min, q);
    }
    CHECK(brute_max <= r.max * (1 + 1e-12));
    CHECK(r.max <= brute_max * (1 + 1e-2));
    CHECK(brute_min >= r.min * (1 - 1e-12));
  }
}

TEST_CASE("m_orthonormalize examples") {
  CMatrix v(2, 1);
  v << 2.0, 0.0;
  const Orthonormalized a = m_orthonormalize(GramSpace::identity(2), v);
  REQUIRE(a.basis.cols() == 1);
  CHECK(std::abs(a.basis(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(a.basis(1, 0)) < 1e-15);

  CMatrix twice(3, 2);
  twice.col(0) << 1.0, 2.0, 3.0;
  twice.col(1) = twice.col(0);
  const Orthonormalized b = m_orthonormalize(GramSpace::identity(3), twice);
  CHECK(b.basis.cols() == 1);
  CHECK(b.dropped == 1);

  CMatrix e1(2, 1);
  e1 << 1.0, 0.0;
  const Orthonormalized c = m_orthonormalize(GramSpace(diag({4, 1})), e1);
  CHECK(std::abs(c.basis(0, 0) - 0.5) < 1e-15);
}

TEST_CASE("m_orthonormalize returns an X-orthonormal basis of the same span") {
  const CMatrix g = random_spd(6, 21);
  const GramSpace space(g);
  const CMatrix v = random_matrix(6, 4, 22);
  const CMatrix q = m_orthonormalize(space, v).basis;
  REQUIRE(q.cols() == 4);
  CHECK((q.adjoint() * g * q - CMatrix::Identity(4, 4)).norm() < 1e-12);
  // Each input column is reproduced by its X-projection onto span(q).
  const CMatrix coeff = q.adjoint() * g * v;
  CHECK((q * coeff - v).norm() < 1e-12 * v.norm());
}

TEST_CASE("GramSpace rejects non-Hermitian and indefinite matrices") {
  CMatrix nonherm = CMatrix::Identity(2, 2);
  nonherm(0, 1) = 0.5;
  CHECK_THROWS_AS(GramSpace{nonherm}, UsageError);
  CHECK_THROWS_AS(GramSpace{diag({1, -1})}, UsageError);
}

TEST_CASE("isometric coordinates") {
  const CMatrix g = random_spd(5, 31);
  const GramSpace space(g);
  const CMatrix u = random_matrix(5, 1, 32);
  CHECK(std::abs(space.to_iso(u).norm() - x_norm(space, u.col(0))) < 1e-12);
  CHECK((space.from_iso(space.to_iso(u)) - u).norm() < 1e-12);
  const CMatrix f = random_matrix(5, 5, 33);
  const CMatrix iso = space.form_to_iso(f);
  // Same operator G^{-1} F seen in coordinates where the X-norm is Euclidean.
  CHECK((iso * space.to_iso(u) - space.to_iso(g.inverse() * f * u)).norm() < 1e-11);
}

TEST_CASE("form_gsv and max_gsv_between") {
  const CMatrix g = random_spd(4, 41);
  const GramSpace space(g);
  const CMatrix b = random_matrix(4, 4, 42);
  const GsvRange direct = min_max_gsv(space, b);
  const GsvRange via_form = form_gsv(space, g * b);
  CHECK(via_form.max == doctest::Approx(direct.max).epsilon(1e-10));
  CHECK(via_form.min == doctest::Approx(direct.min).epsilon(1e-10));
  CHECK(form_norm(space, g * b) == doctest::Approx(direct.max).epsilon(1e-10));
  CHECK(max_gsv_between(space, space, b) == doctest::Approx(direct.max).epsilon(1e-10));
}

TEST_CASE("LuSolver dense and sparse backends agree") {
  const Index n = 200;
  CMatrix tri = CMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    tri(i, i) = Complex(2.0, 0.1);
    if (i + 1 < n) {
      tri(i, i + 1) = -1.0;
      tri(i + 1, i) = -1.0;
    }
  }
  const LuSolver lu(tri);
  CHECK(lu.is_sparse());
  const CMatrix rhs = random_matrix(n, 3, 51);
  const CMatrix x = lu.solve(rhs);
  CHECK((tri * x - rhs).norm() < 1e-10 * rhs.norm());
  const CMatrix y = lu.solve_adjoint(rhs);
  CHECK((tri.adjoint() * y - rhs).norm() < 1e-10 * rhs.norm());
  CHECK(lu.rcond() > 0.0);

  const CMatrix small = random_matrix(6, 6, 52);
  const LuSolver dense(small);
  CHECK_FALSE(dense.is_sparse());
  CHECK((small * dense.solve(rhs.topRows(6)) - rhs.topRows(6)).norm() < 1e-10 * rhs.topRows(6).norm());
}

TEST_CASE("MatrixApplier matches the dense products") {
  CMatrix a = CMatrix::Zero(150, 150);
  for (Index i = 0; i < 150; ++i) a(i, (i * 7) % 150) = Complex(i, 1);
  const MatrixApplier app(a);
  const CMatrix x = random_matrix(150, 2, 61);
  CHECK((app(x) - a * x).norm() < 1e-12 * (a * x).norm());
  CHECK((app.adjoint_apply(x) - a.adjoint() * x).norm() < 1e-12 * (a * x).norm());
  CHECK(sparse_if_sparse(a) != nullptr);
  CHECK(sparse_if_sparse(random_matrix(150, 150, 62)) == nullptr);
  CHECK(sparse_if_sparse(CMatrix::Identity(10, 10)) == nullptr);
}

TEST_CASE("Lanczos extremes match a dense generalized eigensolve") {
  const Index n = 40;
  const CMatrix g = random_spd(n, 71);
  const CMatrix hr = random_matrix(n, n, 72);
  const CMatrix h = hr + hr.adjoint();
  const GramSpace space(g);
  const auto apply = [&](const CVector& v) -> CVector { return h * v; };
  const PencilExtremes ext = lanczos_extremes(apply, space, 200);
  Eigen::GeneralizedSelfAdjointEigenSolver<CMatrix> es(h, g);
  CHECK(ext.min == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-9));
  CHECK(ext.max == doctest::Approx(es.eigenvalues()(n - 1)).epsilon(1e-9));

  const RitzPair p = lanczos_min_pair(apply, space, random_matrix(n, 1, 73).col(0), n);
  CHECK(p.value == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-9));
  CHECK(x_norm(space, p.vector) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(lanczos_min_pair(apply, space, CVector::Zero(n), 10), UsageError);
}

TEST_CASE("kernel_basis and singular_values") {
  CMatrix a = CMatrix::Zero(3, 3);
  a(0, 0) = 2.0;
  a(1, 1) = 1.0;
  const RVector s = singular_values(a);
  CHECK(s(0) == doctest::Approx(2.0));
  CHECK(s(2) == 0.0);
  const CMatrix k = kernel_basis(a, 1e-12);
  REQUIRE(k.cols() == 1);
  CHECK(std::abs(std::abs(k(2, 0)) - 1.0) < 1e-14);
}

TEST_CASE("random_matrix is deterministic in the seed") {
  CHECK((random_matrix(4, 3, 5) - random_matrix(4, 3, 5)).norm() == 0.0);
  CHECK((random_matrix(4, 3, 5) - random_matrix(4, 3, 6)).norm() > 0.0);
}
