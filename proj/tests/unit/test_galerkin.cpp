// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "holofredholm/errors.hpp"
#include "holofredholm/galerkin.hpp"
#include "holofredholm/models.hpp"

using namespace holofredholm;

namespace {

// Uniform P1 on (0,1) with Dirichlet ends: tridiagonal closed forms.
struct Uniform {
  CMatrix k, m;
};

Uniform uniform_p1(Index cells) {
  const Index n = cells - 1;
  const double h = 1.0 / static_cast<double>(cells);
  Uniform u{CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
  for (Index i = 0; i < n; ++i) {
    u.k(i, i) = 2.0 / h;
    u.m(i, i) = 4.0 * h / 6.0;
    if (i + 1 < n) {
      u.k(i, i + 1) = u.k(i + 1, i) = -1.0 / h;
      u.m(i, i + 1) = u.m(i + 1, i) = h / 6.0;
    }
  }
  return u;
}

// Hat functions of the coarse mesh sampled at the fine interior nodes.
CMatrix hat_embedding(Index coarse, Index fine) {
  const Index ratio = fine / coarse;
  CMatrix e = CMatrix::Zero(fine - 1, coarse - 1);
  for (Index j = 0; j < coarse - 1; ++j) {
    const Index centre = (j + 1) * ratio;
    for (Index d = -ratio + 1; d < ratio; ++d) {
      e(centre + d - 1, j) = 1.0 - std::abs(static_cast<double>(d)) / static_cast<double>(ratio);
    }
  }
  return e;
}

std::vector<double> uniform_nodes(Index cells) {
  std::vector<double> x(static_cast<std::size_t>(cells) + 1);
  for (Index i = 0; i <= cells; ++i) x[static_cast<std::size_t>(i)] = static_cast<double>(i) / cells;
  return x;
}

GalerkinHierarchy p1_hierarchy(const std::vector<Index>& levels, Index reference) {
  const Uniform ref = uniform_p1(reference);
  std::vector<CMatrix> emb;
  for (Index c : levels) emb.push_back(hat_embedding(c, reference));
  return GalerkinHierarchy(GramSpace(ref.k + ref.m), emb);
}

CMatrix columns(Index n, std::initializer_list<Index> idx) {
  CMatrix e = CMatrix::Zero(n, static_cast<Index>(idx.size()));
  Index j = 0;
  for (Index i : idx) {
    e(i, j) = 1.0;
    ++j;
  }
  return e;
}

}  // namespace

TEST_CASE("assemble_p1 and p1_prolongation match the uniform closed forms") {
  const P1Matrices p = assemble_p1(uniform_nodes(16), [](double, double) { return 1.0; });
  const Uniform u = uniform_p1(16);
  CHECK((p.stiffness - u.k).norm() < 1e-12);
  CHECK((p.laplace - u.k).norm() < 1e-12);
  CHECK((p.mass - u.m).norm() < 1e-14);
  CHECK((p1_prolongation(uniform_nodes(4), uniform_nodes(16)) - hat_embedding(4, 16)).norm() < 1e-14);
}

TEST_CASE("project examples") {
  const GalerkinHierarchy h = p1_hierarchy({4, 8, 16}, 64);
  const CMatrix inside = h.embedding(1) * random_matrix(7, 2, 1);
  CHECK((h.project(1, inside) - inside).norm() < 1e-12 * inside.norm());

  // X-orthogonal complement: u - P_n u.
  const CMatrix u = random_matrix(63, 1, 2);
  const CMatrix orth = u - h.project(0, u);
  CHECK(h.project(0, orth).norm() < 1e-12 * u.norm());

  const GalerkinHierarchy coord(GramSpace::identity(4), {columns(4, {0}), columns(4, {0, 1})});
  const CMatrix v = random_matrix(4, 1, 3);
  CMatrix expected = CMatrix::Zero(4, 1);
  expected.topRows(2) = v.topRows(2);
  CHECK((coord.project(1, v) - expected).norm() < 1e-15);
}

TEST_CASE("P_n is X-self-adjoint and idempotent") {
  const GalerkinHierarchy h = p1_hierarchy({4, 8, 16}, 64);
  const GramSpace& x = h.reference();
  const CMatrix uv = random_matrix(63, 2, 4);
  for (std::size_t n = 0; n < h.num_levels(); ++n) {
    const Complex lhs = x_inner(x, h.project(n, uv.col(0)).col(0), uv.col(1));
    const Complex rhs = x_inner(x, uv.col(0), h.project(n, uv.col(1)).col(0));
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(lhs) + 1e-12);
    const CMatrix pu = h.project(n, uv.col(0));
    CHECK((h.project(n, pu) - pu).norm() < 1e-12 * pu.norm());
    CHECK((h.embedding(n) * h.coarse_coefficients(n, uv.col(0)) - pu).norm() < 1e-12 * pu.norm());
  }
}

TEST_CASE("compress examples") {
  const CMatrix g = uniform_p1(8).k + uniform_p1(8).m;
  const Uniform u8 = uniform_p1(8);
  const HolomorphicOpFunction pencil(GramSpace(g), {ScalarHolo::constant(1.0), ScalarHolo::polynomial({0.0, -1.0})},
                                     {u8.k, u8.m});

  // Square invertible embedding: no compression, same spectrum.
  const CMatrix square = CMatrix::Identity(7, 7) + 0.1 * random_matrix(7, 7, 5);
  const GalerkinHierarchy full(GramSpace(g), {square});
  const HolomorphicOpFunction c = compress(full, 0, pencil);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ref(u8.k.real(), u8.m.real());
  Eigen::ComplexEigenSolver<CMatrix> es(c.op_matrix(1).inverse() * c.op_matrix(0));
  std::vector<double> got;
  for (Index i = 0; i < 7; ++i) got.push_back(es.eigenvalues()(i).real());
  std::sort(got.begin(), got.end());
  for (Index i = 0; i < 7; ++i) CHECK(got[static_cast<std::size_t>(i)] == doctest::Approx(ref.eigenvalues()(i)).epsilon(1e-10));

  // Constant identity compresses to the coarse identity.
  const GalerkinHierarchy h = p1_hierarchy({4, 8}, 64);
  const auto id = HolomorphicOpFunction::from_operators(h.reference(), {ScalarHolo::constant(1.0)},
                                                        {CMatrix::Identity(63, 63)});
  CHECK((compress(h, 1, id).evaluate(0.3) - CMatrix::Identity(7, 7)).norm() < 1e-12);
}

TEST_CASE("8-element P1 pencil compressed from 64 elements equals direct assembly") {
  const Uniform fine = uniform_p1(64), coarse = uniform_p1(8);
  const GalerkinHierarchy h(GramSpace(fine.k + fine.m), {hat_embedding(8, 64)});
  const HolomorphicOpFunction f(h.reference(), {ScalarHolo::constant(1.0), ScalarHolo::polynomial({0.0, -1.0})},
                                {fine.k, fine.m});
  const HolomorphicOpFunction c = compress(h, 0, f);
  CHECK((c.form(0) - coarse.k).norm() < 1e-12);
  CHECK((c.form(1) - coarse.m).norm() < 1e-12);
  CHECK((h.level_space(0).gram() - (coarse.k + coarse.m)).norm() < 1e-12);
}

TEST_CASE("Galerkin consistency of compressed forms") {
  const GalerkinHierarchy h = p1_hierarchy({4, 8, 16}, 32);
  const Uniform fine = uniform_p1(32);
  const auto f = HolomorphicOpFunction(h.reference(),
                                       {ScalarHolo::constant(1.0), ScalarHolo::rational({0.0, 1.0}, {-1.0, 1.0})},
                                       {fine.k, random_matrix(31, 31, 6)});
  for (std::size_t n = 0; n < h.num_levels(); ++n) {
    const HolomorphicOpFunction c = compress(h, n, f);
    const Index d = h.level_dim(n);
    const CMatrix cd = random_matrix(d, 2, 7 + n);
    for (const Complex z : {Complex(0.3, 0.2), Complex(-2.0, 1.0)}) {
      const Complex coarse = x_inner(h.level_space(n), c.evaluate(z) * cd.col(0), cd.col(1));
      const CMatrix ec = h.embedding(n) * cd;
      const Complex fine_val = x_inner(h.reference(), f.evaluate(z) * ec.col(0), ec.col(1));
      CHECK(std::abs(coarse - fine_val) <= 1e-11 * std::max(1.0, std::abs(fine_val)));
    }
  }
}

TEST_CASE("best_approx_defect examples") {
  const GalerkinHierarchy h = p1_hierarchy({4, 8, 16}, 64);
  const CMatrix q_in = m_orthonormalize(h.reference(), h.embedding(0) * random_matrix(3, 2, 8)).basis;
  CHECK(best_approx_defect(h, 0, q_in) < 1e-12);

  const CMatrix u = random_matrix(63, 1, 9);
  const CMatrix q_out = m_orthonormalize(h.reference(), u - h.project(2, u)).basis;
  CHECK(best_approx_defect(h, 2, q_out) == doctest::Approx(1.0).epsilon(1e-12));

  const GalerkinHierarchy coord(GramSpace::identity(2), {columns(2, {0})});
  CMatrix diag45(2, 1);
  diag45 << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK(best_approx_defect(coord, 0, diag45) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-14));
}

TEST_CASE("defects are non-increasing over nested levels") {
  const GalerkinHierarchy h = p1_hierarchy({2, 4, 8, 16, 32}, 64);
  const CMatrix q = m_orthonormalize(h.reference(), random_matrix(63, 3, 10)).basis;
  double prev = 2.0;
  for (std::size_t n = 0; n < h.num_levels(); ++n) {
    const double d = best_approx_defect(h, n, q);
    CHECK(d <= prev + 1e-12);
    prev = d;
  }
  CHECK(projection_monotonicity_violation(h, random_matrix(63, 4, 11)) == 0.0);
}

TEST_CASE("hierarchy validation") {
  const GramSpace id = GramSpace::identity(3);
  CHECK_THROWS_AS(GalerkinHierarchy(id, {columns(3, {0, 1}), columns(3, {0})}), UsageError);
  CHECK_THROWS_AS(GalerkinHierarchy(id, {columns(3, {0}), columns(3, {1, 2})}), UsageError);
  CMatrix dependent(3, 2);
  dependent << 1, 2, 0, 0, 0, 0;
  CHECK_THROWS_AS(GalerkinHierarchy(id, {dependent}), UsageError);
  const GalerkinHierarchy ok(id, {columns(3, {0}), columns(3, {0, 1})});
  CHECK_THROWS_AS(ok.level_dim(2), UsageError);
}
