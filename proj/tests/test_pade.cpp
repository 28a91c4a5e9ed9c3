#include <doctest.h>

#include <cmath>

#include "unigroup/pade.hpp"

using namespace unigroup;

TEST_CASE("diagonal coefficients match hand values") {
  const auto c1 = pade_coefficients(1, 1);
  REQUIRE(c1.size() == 2);
  CHECK(c1[0] == 1.0);
  CHECK(c1[1] == 0.5);

  const auto c2 = pade_coefficients(2, 2);
  REQUIRE(c2.size() == 3);
  CHECK(c2[0] == 1.0);
  CHECK(c2[1] == 0.5);
  CHECK(c2[2] == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
}

TEST_CASE("non-diagonal and oversized orders are rejected") {
  CHECK_THROWS_AS(pade_coefficients(2, 1), std::invalid_argument);
  CHECK_THROWS_AS(pade_coefficients(7, 7), std::invalid_argument);
  CHECK_THROWS_AS(pade_coefficients(0, 0), std::invalid_argument);
  Matrix a = Matrix::Zero(2, 2);
  CHECK_THROWS_AS(pade_polynomials(1, 2, a), std::invalid_argument);
}

TEST_CASE("scalar polynomials: N = 1 + a/2, D = 1 - a/2 at p = 1") {
  Matrix a(1, 1);
  a(0, 0) = cplx(0.3, -0.2);
  const auto [n, d] = pade_polynomials(1, 1, a);
  CHECK(std::abs(n(0, 0) - (1.0 + 0.5 * a(0, 0))) <= 1e-15);
  CHECK(std::abs(d(0, 0) - (1.0 - 0.5 * a(0, 0))) <= 1e-15);

  const auto [n2, d2] = pade_polynomials(2, 2, a);
  const cplx expected = 1.0 + 0.5 * a(0, 0) + a(0, 0) * a(0, 0) / 12.0;
  CHECK(std::abs(n2(0, 0) - expected) <= 1e-15);
}

TEST_CASE("zero argument gives the identity on both sides") {
  const Matrix a = Matrix::Zero(4, 4);
  const auto [n, d] = pade_polynomials(3, 3, a);
  CHECK((n - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((d - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("taylor coefficients of R_pp match 1/k! through order 2p") {
  for (int p = 1; p <= 4; ++p) {
    double factorial = 1.0;
    for (int k = 0; k <= 2 * p; ++k) {
      if (k > 0) factorial *= k;
      CHECK(pade_taylor_coefficient(p, k) ==
            doctest::Approx(1.0 / factorial).epsilon(1e-12));
    }
  }
}

TEST_CASE("the first departing coefficient gives the known bound constants") {
  // R_11 = (1 + a/2)/(1 - a/2): c_{1,3} = 1/4, |1/3! - 1/4| = 1/12
  CHECK(pade_taylor_coefficient(1, 3) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(single_step_bound_constant(1) ==
        doctest::Approx(1.0 / 12.0).epsilon(1e-12));
  // R_22: c_{2,5} = 1/144, |1/120 - 1/144| = 1/720
  CHECK(pade_taylor_coefficient(2, 5) ==
        doctest::Approx(1.0 / 144.0).epsilon(1e-12));
  CHECK(single_step_bound_constant(2) ==
        doctest::Approx(1.0 / 720.0).epsilon(1e-11));
}

TEST_CASE("scalar R_pp tracks exp to the one-step bound") {
  for (int p : {1, 2, 3}) {
    for (double a : {0.125, 0.25, 0.5, 1.0}) {
      Matrix arg(1, 1);
      arg(0, 0) = cplx(0.0, -a);
      const auto [n, d] = pade_polynomials(p, p, arg);
      const cplx r = n(0, 0) / d(0, 0);
      CHECK(std::abs(r) == doctest::Approx(1.0).epsilon(1e-14));
      const double err = std::abs(std::exp(cplx(0.0, -a)) - r);
      CHECK(err <= single_step_bound_constant(p) * std::pow(a, 2 * p + 1));
    }
  }
}

TEST_CASE("multi step bound formula") {
  CHECK(multi_step_bound(1, 8, 0.5) == doctest::Approx(512.0 / 6.0 * 0.125));
  CHECK_THROWS_AS(multi_step_bound(1, 0, 0.5), std::invalid_argument);
}
