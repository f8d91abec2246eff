// Copyright The holofredholm Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "holofredholm/errors.hpp"
#include "holofredholm/opfun.hpp"

using namespace holofredholm;

namespace {

CMatrix random_spd(Index n, std::uint64_t seed) {
  const CMatrix a = random_matrix(n, n, seed);
  return a * a.adjoint() + static_cast<double>(n) * CMatrix::Identity(n, n);
}

CMatrix random_hermitian(Index n, std::uint64_t seed) {
  const CMatrix a = random_matrix(n, n, seed);
  return a + a.adjoint();
}

const ScalarHolo kOne = ScalarHolo::constant(1.0);
const ScalarHolo kMinusZ = ScalarHolo::polynomial({0.0, -1.0});
const ScalarHolo kRatio = ScalarHolo::rational({0.0, 1.0}, {-1.0, 1.0});

// Three-term function with a rational factor, the shape of the metamaterial model.
HolomorphicOpFunction mixed(const GramSpace& space) {
  const Index n = space.dim();
  return HolomorphicOpFunction(space, {kOne, kRatio, kMinusZ},
                               {random_matrix(n, n, 1), random_matrix(n, n, 2), random_matrix(n, n, 3)});
}

}  // namespace

TEST_CASE("evaluate examples") {
  const GramSpace id = GramSpace::identity(3);
  const CMatrix k = random_matrix(3, 3, 10), m = random_matrix(3, 3, 11), b = random_matrix(3, 3, 12);
  const HolomorphicOpFunction pencil(id, {kOne, kMinusZ}, {k, m});
  CHECK((pencil.evaluate(0.0) - k).norm() == 0.0);
  const HolomorphicOpFunction rat(id, {kRatio}, {b});
  CHECK((rat.evaluate(2.0) - 2.0 * b).norm() < 1e-14 * b.norm());
  const HolomorphicOpFunction one(id, {kOne}, {CMatrix::Identity(3, 3)});
  CHECK((one.evaluate(Complex(0.7, -3.0)) - CMatrix::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("evaluate applies G^{-1} to the stored forms") {
  const CMatrix g = random_spd(4, 20);
  const GramSpace space(g);
  const CMatrix a = random_matrix(4, 4, 21);
  const auto f = HolomorphicOpFunction::from_operators(space, {ScalarHolo::identity()}, {a});
  const Complex z{0.5, 0.25};
  CHECK((f.evaluate(z) - z * a).norm() < 1e-12 * a.norm());
  CHECK((f.evaluate_form(z) - z * g * a).norm() < 1e-12 * (g * a).norm());
  CHECK((f.op_matrix(0) - a).norm() < 1e-12 * a.norm());
}

TEST_CASE("derivative examples") {
  const GramSpace id = GramSpace::identity(2);
  const CMatrix k = random_matrix(2, 2, 30), m = random_matrix(2, 2, 31), b = random_matrix(2, 2, 32);
  const HolomorphicOpFunction pencil(id, {kOne, kMinusZ}, {k, m});
  CHECK((pencil.derivative(1.3, 1) + m).norm() == 0.0);
  CHECK(pencil.derivative(1.3, 2).norm() == 0.0);
  const HolomorphicOpFunction rat(id, {kRatio}, {b});
  CHECK((rat.derivative(2.0, 1) + b).norm() < 1e-14 * b.norm());
  CHECK((rat.derivative(2.0, 0) - rat.evaluate(2.0)).norm() == 0.0);
}

TEST_CASE("derivatives agree with central differences") {
  const GramSpace space(random_spd(4, 40));
  const HolomorphicOpFunction f = mixed(space);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int checked = 0;
  while (checked < 20) {
    const Complex z(u(rng), u(rng));
    if (std::abs(z - 1.0) < 0.5) continue;
    const double h = 1e-5;
    const CMatrix fd = (f.evaluate(z + h) - f.evaluate(z - h)) / (2.0 * h);
    const CMatrix d = f.derivative(z, 1);
    CHECK((fd - d).norm() <= 1e-8 * d.norm());
    ++checked;
  }
}

TEST_CASE("Cauchy derivatives agree with closed forms") {
  for (const Complex z : {Complex(2.0, 0.0), Complex(-0.5, 1.5), Complex(0.3, -0.2)}) {
    const double r = 0.1 * kRatio.pole_distance(z);
    for (int j = 0; j <= 3; ++j) {
      const Complex exact = kRatio.derivative(z, j);
      CHECK(std::abs(kRatio.cauchy_derivative(z, j, r, 64) - exact) <= 1e-10 * std::max(1.0, std::abs(exact)));
    }
  }
  const ScalarHolo opaque = ScalarHolo::opaque([](Complex w) { return w / (w - 1.0); }, {1.0}, 3, "ratio");
  for (int j = 0; j <= 3; ++j) {
    const Complex exact = kRatio.derivative(2.0, j);
    CHECK(std::abs(opaque.derivative(2.0, j) - exact) <= 1e-10 * std::max(1.0, std::abs(exact)));
  }
  CHECK_THROWS_AS(opaque.derivative(2.0, 4), UsageError);
}

TEST_CASE("discrete Cauchy theorem on pole-free circles") {
  const GramSpace space(random_spd(3, 50));
  const HolomorphicOpFunction f = mixed(space);
  CHECK(contour_integral(f, Complex(-1.0, 0.5), 1.2, 64).norm() <= 1e-10);
  CHECK(contour_integral(f, Complex(4.0, 0.0), 2.0, 64).norm() <= 1e-10);
  // Circles that enclose the pole are rejected.
  CHECK_THROWS_AS(contour_integral(f, 1.0, 0.5, 64), ContourError);
}

TEST_CASE("adjoint_function examples") {
  const CMatrix g = random_spd(3, 60);
  const GramSpace space(g);
  const HolomorphicOpFunction herm(space, {kOne, kMinusZ}, {random_hermitian(3, 61), g});
  const HolomorphicOpFunction herm_adj = herm.adjoint_function();
  CHECK((herm_adj.evaluate(0.7) - herm.evaluate(0.7)).norm() < 1e-12 * herm.evaluate(0.7).norm());
  CHECK(herm.is_self_adjoint());

  const HolomorphicOpFunction f = mixed(space);
  CHECK_FALSE(f.is_self_adjoint());
  const HolomorphicOpFunction twice = f.adjoint_function().adjoint_function();
  const Complex z{0.4, 2.0};
  CHECK((twice.evaluate(z) - f.evaluate(z)).norm() <= 1e-12 * f.evaluate(z).norm());

  const CMatrix a = random_matrix(3, 3, 62);
  const auto lin = HolomorphicOpFunction::from_operators(space, {ScalarHolo::identity()}, {a});
  const Complex i{0.0, 1.0};
  const CMatrix expected = x_adjoint(space, a) * i;
  CHECK((lin.adjoint_function().evaluate(i) - expected).norm() < 1e-12 * expected.norm());
}

TEST_CASE("adjoint function satisfies the X-adjoint identity pointwise") {
  const GramSpace space(random_spd(4, 70));
  const HolomorphicOpFunction f = mixed(space);
  const HolomorphicOpFunction fs = f.adjoint_function();
  const CMatrix uv = random_matrix(4, 2, 71);
  for (const Complex z : {Complex(0.2, 0.9), Complex(-2.0, -0.3)}) {
    const Complex lhs = x_inner(space, f.evaluate(z) * uv.col(0), uv.col(1));
    const Complex rhs = x_inner(space, uv.col(0), fs.evaluate(std::conj(z)) * uv.col(1));
    CHECK(std::abs(lhs - rhs) < 1e-11 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("domain and pole handling") {
  const GramSpace id = GramSpace::identity(2);
  const HolomorphicOpFunction rat(id, {kRatio}, {CMatrix::Identity(2, 2)});
  CHECK_THROWS_AS(rat.evaluate(1.0), DomainError);
  CHECK(rat.pole_distance(Complex(1.0, 0.5)) == doctest::Approx(0.5));
  Domain disk{0.0, 2.0, {}};
  const HolomorphicOpFunction bounded(id, {kOne}, {CMatrix::Identity(2, 2)}, disk);
  CHECK_NOTHROW(bounded.evaluate(1.5));
  CHECK_THROWS_AS(bounded.evaluate(3.0), DomainError);
  CHECK_THROWS_AS(HolomorphicOpFunction(id, {kOne, kOne}, {CMatrix::Identity(2, 2)}), UsageError);
  CHECK_THROWS_AS(HolomorphicOpFunction(id, {kOne}, {CMatrix::Identity(3, 3)}), UsageError);
}

TEST_CASE("norm_bound dominates the operator norm") {
  const GramSpace space(random_spd(4, 80));
  const HolomorphicOpFunction f = mixed(space);
  for (const Complex z : {Complex(0.0, 0.0), Complex(3.0, -1.0)}) {
    CHECK(form_norm(space, f.evaluate_form(z)) <= f.norm_bound(z) * (1 + 1e-12));
  }
  REQUIRE(f.term_norms().size() == 3);
  CHECK(f.term_norms()[0] == doctest::Approx(form_norm(space, f.form(0))).epsilon(1e-10));
}

TEST_CASE("scalar factors") {
  CHECK(kRatio.is_real());
  CHECK(ScalarHolo::polynomial({Complex(0.0, 1.0)}).is_real() == false);
  const ScalarHolo c = ScalarHolo::polynomial({Complex(1.0, 2.0), Complex(0.0, -1.0)});
  const ScalarHolo cr = c.conj_reflected();
  const Complex z{0.3, 0.7};
  CHECK(std::abs(cr(z) - std::conj(c(std::conj(z)))) < 1e-15);
  CHECK(kRatio.poles().size() == 1);
  CHECK(std::abs(kRatio.poles()[0] - 1.0) < 1e-15);
}
