#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "unigroup/projection.hpp"

using namespace unigroup;
using std::numbers::pi;

namespace {

ScalarField sine_1d() {
  return [](Point p) { return cplx(std::sin(pi * p.x), 0.0); };
}

ScalarField sine_2d() {
  return [](Point p) { return cplx(std::sin(pi * p.x) * std::sin(pi * p.y), 0.0); };
}

}  // namespace

TEST_CASE("decompose samples the field at the nodes") {
  ProjectionPair pair(build_grid(Domain::interval(1.0), 0));

  const Vector zero = pair.decompose([](Point) { return cplx(0.0); });
  CHECK(zero.cwiseAbs().maxCoeff() == 0.0);

  const Vector c = pair.decompose(sine_1d());
  CHECK(c[0].real() == doctest::Approx(std::sin(pi / 4)).epsilon(1e-15));
  CHECK(c[1].real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c[2].real() == doctest::Approx(std::sin(3 * pi / 4)).epsilon(1e-15));
}

TEST_CASE("decomposing a basis hat gives the unit coordinate vector") {
  ProjectionPair pair(build_grid(Domain::interval(1.0), 1));
  const auto& basis = pair.basis();
  for (Index k : {Index(0), Index(2), Index(6)}) {
    const Vector e = pair.decompose(
        [&, k](Point p) { return cplx(basis.evaluate(k, p), 0.0); });
    for (Index j = 0; j < e.size(); ++j) {
      CHECK(e[j] == (j == k ? cplx(1.0) : cplx(0.0)));
    }
  }
}

TEST_CASE("decompose rejects non-finite samples") {
  ProjectionPair pair(build_grid(Domain::interval(1.0), 0));
  CHECK_THROWS_AS(
      pair.decompose([](Point p) {
        return p.x > 0.4 && p.x < 0.6 ? cplx(std::nan("")) : cplx(0.0);
      }),
      std::runtime_error);
}

TEST_CASE("summate expands hats and vanishes on the boundary") {
  ProjectionPair pair(build_grid(Domain::interval(1.0), 0));
  Vector e = Vector::Zero(3);
  e[1] = 1.0;
  const ScalarField hat = pair.summate(e);
  CHECK(hat(Point{0.5, 0.0}) == cplx(1.0));
  CHECK(hat(Point{0.25, 0.0}) == cplx(0.0));
  CHECK(hat(Point{0.75, 0.0}) == cplx(0.0));
  CHECK(hat(Point{0.375, 0.0}).real() == doctest::Approx(0.5));
  CHECK(hat(Point{0.0, 0.0}) == cplx(0.0));
  CHECK(hat(Point{1.0, 0.0}) == cplx(0.0));

  const ScalarField zero = pair.summate(Vector::Zero(3));
  CHECK(zero(Point{0.3, 0.0}) == cplx(0.0));

  CHECK_THROWS_AS(pair.summate(Vector::Zero(5)), std::invalid_argument);
}

TEST_CASE("decompose after summate is the identity, bit-exactly") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> dist;
  for (int m : {0, 1, 2}) {
    for (int dim : {1, 2}) {
      const Domain dom = dim == 1 ? Domain::interval(1.0) : Domain::box(1.0, 3.0);
      ProjectionPair pair(build_grid(dom, m));
      Vector x(pair.grid().n_dofs());
      for (Index i = 0; i < x.size(); ++i) x[i] = cplx(dist(rng), dist(rng));
      const Vector back = pair.decompose(pair.summate(x));
      for (Index i = 0; i < x.size(); ++i) CHECK(back[i] == x[i]);
    }
  }
}

TEST_CASE("interpolation reproduces the field at all nodes") {
  const ScalarField v = [](Point p) { return cplx(p.x * (1.0 - p.x), 0.0); };
  for (int m = 0; m <= 3; ++m) {
    ProjectionPair pair(build_grid(Domain::interval(1.0), m));
    const ScalarField pv = pair.project(v);
    const Grid& g = pair.grid();
    for (Index k = 0; k < g.n_dofs(); ++k) {
      CHECK(std::abs(pv(g.node(k)) - v(g.node(k))) <= 1e-15);
    }
  }
}

TEST_CASE("2d summate vanishes on all four boundary edges") {
  ProjectionPair pair(build_grid(Domain::box(1.0, 1.0), 1));
  const Vector c = pair.decompose(sine_2d());
  const ScalarField f = pair.summate(c);
  for (double t : {0.0, 0.111, 0.5, 0.97, 1.0}) {
    CHECK(f(Point{t, 0.0}) == cplx(0.0));
    CHECK(f(Point{t, 1.0}) == cplx(0.0));
    CHECK(f(Point{0.0, t}) == cplx(0.0));
    CHECK(f(Point{1.0, t}) == cplx(0.0));
  }
}

TEST_CASE("quadrature norm matches closed forms") {
  const Grid g = build_grid(Domain::interval(1.0), 2);
  // ||sin(pi x)||_L2([0,1]) = 1/sqrt(2)
  CHECK(quadrature_l2_norm(g, sine_1d()) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-8));
  // polynomial of degree 3, squared -> degree 6 < 8: exact
  const ScalarField cubic = [](Point p) { return cplx(p.x * p.x * p.x, 0.0); };
  CHECK(quadrature_l2_norm(g, cubic) ==
        doctest::Approx(1.0 / std::sqrt(7.0)).epsilon(1e-14));
}

TEST_CASE("sin(pi x) projects at second order in 1d") {
  const OrderFit fit = measure_approximation_order(Domain::interval(1.0), 4, sine_1d());
  CHECK(fit.slope >= 1.9);
  CHECK(fit.slope <= 2.1);
}

TEST_CASE("sin(pi x) sin(pi y) projects at second order in 2d") {
  const OrderFit fit =
      measure_approximation_order(Domain::box(1.0, 1.0), 3, sine_2d());
  CHECK(fit.slope >= 1.9);
  CHECK(fit.slope <= 2.1);
}

TEST_CASE("a resolved field has no measurable order") {
  // A coarse hat is in every finer discrete space: projection error 0.
  ProjectionPair coarse(build_grid(Domain::interval(1.0), 0));
  Vector e = Vector::Zero(3);
  e[1] = 1.0;
  const ScalarField hat = coarse.summate(e);
  CHECK_THROWS_AS(measure_approximation_order(Domain::interval(1.0), 2, hat),
                  std::domain_error);
}

TEST_CASE("projection and coordinate multiplication almost commute at rate 2") {
  // A = multiplication by x^2 + y^2 against a smooth state.
  const ScalarField v = sine_2d();
  const RealField mult = [](Point p) { return p.x * p.x + p.y * p.y; };
  const Domain dom = Domain::box(1.0, 1.0);

  std::vector<double> hs, errs;
  for (int m = 0; m <= 3; ++m) {
    ProjectionPair pair(build_grid(dom, m));
    const ScalarField av = [&](Point p) { return mult(p) * v(p); };
    const ScalarField p_av = pair.project(av);
    const ScalarField pv = pair.project(v);
    const ScalarField a_pv = [&](Point p) { return mult(p) * pv(p); };
    hs.push_back(pair.grid().h());
    errs.push_back(quadrature_l2_distance(pair.grid(), p_av, a_pv));
  }
  CHECK(loglog_slope(hs, errs) >= 1.9);
}
