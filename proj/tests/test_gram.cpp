#include <doctest.h>

#include <cmath>
#include <random>

#include "unigroup/gram.hpp"

using namespace unigroup;

namespace {

// Independent quadrature oracle for \int f over the grid (midpoint-composite
// Simpson on a fine per-cell lattice; deliberately not the library's rule).
double integrate_cellwise(const Grid& g, const std::function<double(Point)>& f) {
  const int refine = 8;  // Simpson panels per cell
  double total = 0.0;
  const auto simpson_1d = [&](double a, double h, const std::function<double(double)>& fx) {
    double acc = 0.0;
    const double d = h / refine;
    for (int i = 0; i < refine; ++i) {
      const double x0 = a + i * d;
      acc += d / 6.0 * (fx(x0) + 4.0 * fx(x0 + 0.5 * d) + fx(x0 + d));
    }
    return acc;
  };
  if (g.dim() == 1) {
    for (int c = 0; c < g.axis_cells(0); ++c) {
      total += simpson_1d(c * g.spacing(0), g.spacing(0),
                          [&](double x) { return f(Point{x, 0.0}); });
    }
    return total;
  }
  for (int cy = 0; cy < g.axis_cells(1); ++cy) {
    for (int cx = 0; cx < g.axis_cells(0); ++cx) {
      total += simpson_1d(cy * g.spacing(1), g.spacing(1), [&](double y) {
        return simpson_1d(cx * g.spacing(0), g.spacing(0),
                          [&](double x) { return f(Point{x, y}); });
      });
    }
  }
  return total;
}

Vector random_vector(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = cplx(dist(rng), dist(rng));
  return v;
}

Matrix random_matrix(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> dist;
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m(i, j) = cplx(dist(rng), dist(rng));
  return m;
}

}  // namespace

TEST_CASE("1d mass matrix is (h/6) tridiag(1, 4, 1)") {
  NodalBasis basis(build_grid(Domain::interval(1.0), 0));
  const RealMatrix m = assemble_mass_matrix(basis);
  const double h = 0.25;
  REQUIRE(m.rows() == 3);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) {
      double expected = 0.0;
      if (i == j) expected = 4.0 * h / 6.0;
      if (std::abs(i - j) == 1) expected = h / 6.0;
      CHECK(m(i, j) == doctest::Approx(expected).epsilon(1e-14));
    }
  }
}

TEST_CASE("mass entries agree with the quadrature oracle") {
  for (int dim : {1, 2}) {
    const Domain dom = dim == 1 ? Domain::interval(1.0) : Domain::box(1.0, 1.0);
    NodalBasis basis(build_grid(dom, 1));
    const RealMatrix m = assemble_mass_matrix(basis);
    const Index n = basis.size();
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<Index> pick(0, n - 1);
    for (int t = 0; t < 12; ++t) {
      const Index i = pick(rng);
      const Index j = pick(rng);
      const double oracle = integrate_cellwise(basis.grid(), [&](Point p) {
        return basis.evaluate(i, p) * basis.evaluate(j, p);
      });
      CHECK(m(i, j) == doctest::Approx(oracle).epsilon(1e-9));
    }
  }
}

TEST_CASE("2d mass is the Kronecker product of the 1d masses") {
  const Grid g2 = build_grid(Domain::box(1.0, 2.0), 1);
  const RealMatrix m2 = assemble_mass_matrix(NodalBasis(g2));

  const RealMatrix mx = assemble_mass_matrix(NodalBasis(build_grid(Domain::interval(1.0), 1)));
  const RealMatrix my = assemble_mass_matrix(NodalBasis(build_grid(Domain::interval(2.0), 1)));

  const Index nx = mx.rows();
  const Index ny = my.rows();
  REQUIRE(m2.rows() == nx * ny);
  double max_diff = 0.0;
  for (Index iy = 0; iy < ny; ++iy)
    for (Index ix = 0; ix < nx; ++ix)
      for (Index jy = 0; jy < ny; ++jy)
        for (Index jx = 0; jx < nx; ++jx) {
          const double kron = my(iy, jy) * mx(ix, jx);
          max_diff = std::max(
              std::abs(m2(iy * nx + ix, jy * nx + jx) - kron), max_diff);
        }
  CHECK(max_diff <= 1e-14);
}

TEST_CASE("gram matrices are SPD with a symmetric square root") {
  for (int m = 0; m <= 2; ++m) {
    const GramMatrix gram = assemble_mass(NodalBasis(build_grid(Domain::box(1.0, 1.0), m)));
    CHECK(gram.eigen_floor() > 0.0);
    CHECK((gram.mass() - gram.mass().transpose()).cwiseAbs().maxCoeff() == 0.0);

    const RealMatrix& w = gram.square_root();
    CHECK((w - w.transpose()).cwiseAbs().maxCoeff() == 0.0);
    const double res = (w * w - gram.mass()).cwiseAbs().maxCoeff();
    CHECK(res <= 1e-12 * gram.mass().cwiseAbs().maxCoeff());
    const double inv_res =
        (w * gram.square_root_inverse() - RealMatrix::Identity(gram.size(), gram.size()))
            .cwiseAbs()
            .maxCoeff();
    CHECK(inv_res <= 1e-12);
  }

  std::mt19937_64 rng(3);
  const GramMatrix gram = assemble_mass(NodalBasis(build_grid(Domain::interval(1.0), 2)));
  for (int t = 0; t < 100; ++t) {
    const Vector x = random_vector(gram.size(), rng);
    CHECK(gram.inner(x, x).real() > 0.0);
  }
}

TEST_CASE("non-SPD input is rejected") {
  const RealMatrix bad = -RealMatrix::Identity(4, 4);
  CHECK_THROWS_AS(GramMatrix{bad}, std::runtime_error);
}

TEST_CASE("m_inner is Hermitian and matches the W form") {
  const GramMatrix gram = assemble_mass(NodalBasis(build_grid(Domain::interval(1.0), 2)));
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const Vector u = random_vector(gram.size(), rng);
    const Vector v = random_vector(gram.size(), rng);
    const cplx a = gram.inner(u, v);
    const cplx b = gram.inner(v, u);
    CHECK(std::abs(a - std::conj(b)) <= 1e-12 * std::abs(a));
    const cplx w_form = gram.apply_sqrt(v).dot(gram.apply_sqrt(u));
    CHECK(std::abs(a - w_form) <= 1e-12 * std::abs(a));
  }
  CHECK(gram.inner(Vector::Zero(gram.size()), Vector::Zero(gram.size())) == cplx(0.0));
}

TEST_CASE("summed mass entries match the constant-vector inner product") {
  const GramMatrix gram = assemble_mass(NodalBasis(build_grid(Domain::interval(1.0), 0)));
  const Vector ones = Vector::Ones(3);
  // sum of all entries of (h/6) tridiag(1,4,1) with h = 1/4: 16 h / 6 = 2/3
  CHECK(gram.inner(ones, ones).real() == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  // cross-check: quadrature of (sum_k b_k)^2
  NodalBasis basis(build_grid(Domain::interval(1.0), 0));
  const double oracle = integrate_cellwise(basis.grid(), [&](Point p) {
    double s = 0.0;
    for (Index k = 0; k < 3; ++k) s += basis.evaluate(k, p);
    return s * s;
  });
  CHECK(gram.inner(ones, ones).real() == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("m_norm properties") {
  const GramMatrix gram = assemble_mass(NodalBasis(build_grid(Domain::interval(1.0), 2)));
  CHECK(gram.norm(Vector::Zero(gram.size())) == 0.0);
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    const Vector u = random_vector(gram.size(), rng);
    const cplx alpha = cplx(std::cos(0.7 * t), std::sin(0.3 * t)) * (1.0 + t);
    CHECK(gram.norm(alpha * u) ==
          doctest::Approx(std::abs(alpha) * gram.norm(u)).epsilon(1e-12));
    CHECK(gram.norm(u) * gram.norm(u) ==
          doctest::Approx(gram.inner(u, u).real()).epsilon(1e-12));
  }
}

TEST_CASE("m_adjoint pairing, involution, anti-homomorphism") {
  const GramMatrix gram = assemble_mass(NodalBasis(build_grid(Domain::interval(1.0), 2)));
  const Index n = gram.size();
  std::mt19937_64 rng(13);

  CHECK((gram.adjoint(Matrix::Identity(n, n)) - Matrix::Identity(n, n))
            .cwiseAbs()
            .maxCoeff() <= 1e-13);
  const cplx c(0.4, -1.1);
  const Matrix scalar = c * Matrix::Identity(n, n);
  CHECK((gram.adjoint(scalar) - std::conj(c) * Matrix::Identity(n, n))
            .cwiseAbs()
            .maxCoeff() <= 1e-13);

  for (int t = 0; t < 20; ++t) {
    const Matrix a = random_matrix(n, rng);
    const Matrix a_dag = gram.adjoint(a);

    const Vector u = random_vector(n, rng);
    const Vector v = random_vector(n, rng);
    const cplx lhs = gram.inner((a * u).eval(), v);
    const cplx rhs = gram.inner(u, (a_dag * v).eval());
    const double scale = gram.operator_norm(a) * gram.norm(u) * gram.norm(v);
    CHECK(std::abs(lhs - rhs) <= 1e-11 * scale);

    // involution
    CHECK((gram.adjoint(a_dag) - a).cwiseAbs().maxCoeff() <=
          1e-11 * a.cwiseAbs().maxCoeff());

    // anti-homomorphism
    const Matrix b = random_matrix(n, rng);
    const Matrix lhs_m = gram.adjoint((a * b).eval());
    const Matrix rhs_m = gram.adjoint(b) * gram.adjoint(a);
    CHECK((lhs_m - rhs_m).cwiseAbs().maxCoeff() <=
          1e-11 * lhs_m.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("bra row form reproduces m_inner") {
  const GramMatrix gram = assemble_mass(NodalBasis(build_grid(Domain::interval(1.0), 1)));
  std::mt19937_64 rng(17);
  const Vector psi = random_vector(gram.size(), rng);
  const Vector u = random_vector(gram.size(), rng);
  const Eigen::RowVectorXcd bra = psi.adjoint() * gram.mass().cast<cplx>();
  const cplx paired = (bra * u).value();
  CHECK(std::abs(paired - gram.inner(u, psi)) <= 1e-12 * std::abs(paired));
}

TEST_CASE("W conjugation is an isometry onto the M operator norm") {
  const GramMatrix gram = assemble_mass(NodalBasis(build_grid(Domain::interval(1.0), 2)));
  const Index n = gram.size();
  std::mt19937_64 rng(21);

  // normal in the W geometry: A = W^{-1} diag(phases * radii) W
  Vector d(n);
  std::uniform_real_distribution<double> unif(0.2, 2.0);
  for (Index i = 0; i < n; ++i) {
    d[i] = std::polar(unif(rng), unif(rng));
  }
  const Matrix a = gram.square_root_inverse().cast<cplx>() *
                   Matrix(d.asDiagonal()) * gram.square_root().cast<cplx>();
  const double spectral = d.cwiseAbs().maxCoeff();
  CHECK(gram.operator_norm(a) == doctest::Approx(spectral).epsilon(1e-10));

  // randomized lower bound on sup ||Au||_M / ||u||_M
  double sup_ratio = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Vector u = random_vector(n, rng);
    sup_ratio = std::max(sup_ratio, gram.norm(a * u) / gram.norm(u));
  }
  CHECK(sup_ratio <= spectral * (1.0 + 1e-10));
  CHECK(sup_ratio >= 0.5 * spectral);
}

TEST_CASE("dimension mismatches are rejected") {
  const GramMatrix gram = assemble_mass(NodalBasis(build_grid(Domain::interval(1.0), 0)));
  const Vector wrong = Vector::Zero(5);
  CHECK_THROWS_AS(gram.norm(wrong), std::invalid_argument);
  CHECK_THROWS_AS(gram.inner(wrong, wrong), std::invalid_argument);
  CHECK_THROWS_AS(gram.adjoint(Matrix::Zero(5, 5)), std::invalid_argument);
}
