#include "unigroup/operators.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "gauss_rule.hpp"

namespace unigroup {

namespace {

constexpr double kHermitianTol = 1e-11;

// A is M-self-adjoint iff M A is Hermitian.
bool measure_hermitian(const GramMatrix& gram, const Matrix& a) {
  const RealMatrix re = gram.mass() * a.real();
  const RealMatrix im = gram.mass() * a.imag();
  const Matrix b = re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>();
  const double scale = b.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  const double residual = (b - b.adjoint().eval()).cwiseAbs().maxCoeff();
  return residual <= kHermitianTol * scale;
}

}  // namespace

ParticularOperator make_operator(const GramMatrix& gram, Matrix matrix) {
  if (matrix.rows() != gram.size() || matrix.cols() != gram.size()) {
    throw std::invalid_argument("operator size does not match gram");
  }
  ParticularOperator op;
  op.hermitian_flag = measure_hermitian(gram, matrix);
  op.matrix = std::move(matrix);
  op.gram = &gram;
  return op;
}

ParticularOperator identity_operator(const GramMatrix& gram) {
  ParticularOperator op;
  op.matrix = Matrix::Identity(gram.size(), gram.size());
  op.gram = &gram;
  op.hermitian_flag = true;
  return op;
}

ParticularOperator operator_sum(const ParticularOperator& a,
                                const ParticularOperator& b) {
  if (a.gram != b.gram) throw std::invalid_argument("operator_sum: gram mismatch");
  return make_operator(*a.gram, a.matrix + b.matrix);
}

ParticularOperator operator_scale(cplx factor, const ParticularOperator& a) {
  return make_operator(*a.gram, factor * a.matrix);
}

ParticularOperator commutator(const ParticularOperator& a,
                              const ParticularOperator& b) {
  if (a.gram == nullptr || a.gram != b.gram) {
    throw std::invalid_argument("commutator: gram mismatch");
  }
  if (a.matrix.rows() != b.matrix.rows()) {
    throw std::invalid_argument("commutator: dimension mismatch");
  }
  return make_operator(*a.gram, a.matrix * b.matrix - b.matrix * a.matrix);
}

FactoredOperator assemble_kinetic(const NodalBasis& basis, const GramMatrix& gram) {
  const Grid& grid = basis.grid();
  if (gram.size() != grid.n_dofs()) {
    throw std::invalid_argument("assemble_kinetic: gram does not match grid");
  }

  FactoredOperator f;
  f.alpha = 1.0;

  const auto element_mass = [](double h, int a, int b) {
    return (a == b) ? h / 3.0 : h / 6.0;
  };
  const auto element_stiffness = [](double h, int a, int b) {
    return (a == b) ? 1.0 / h : -1.0 / h;
  };

  const Index n = grid.n_dofs();
  f.stiffness = RealMatrix::Zero(n, n);
  std::vector<Eigen::Triplet<double>> triplets;

  if (grid.dim() == 1) {
    const double h = grid.spacing(0);
    const int dofs = grid.axis_dofs(0);
    const int cells = grid.axis_cells(0);
    // Gradients of 1d hats are cellwise constant: one sample per cell with
    // the cell volume as weight is exact.
    f.gradient_weights = RealVector::Constant(cells, h);
    triplets.reserve(static_cast<size_t>(2 * cells));
    for (int cell = 0; cell < cells; ++cell) {
      for (int a = 0; a < 2; ++a) {
        const int i = cell - 1 + a;
        if (i < 0 || i >= dofs) continue;
        triplets.emplace_back(cell, i, (a == 0 ? -1.0 : 1.0) / h);
        for (int b = 0; b < 2; ++b) {
          const int j = cell - 1 + b;
          if (j < 0 || j >= dofs) continue;
          f.stiffness(i, j) += element_stiffness(h, a, b);
        }
      }
    }
    f.gradient_sampler.resize(cells, dofs);
    f.gradient_sampler.setFromTriplets(triplets.begin(), triplets.end());
  } else {
    const double hx = grid.spacing(0);
    const double hy = grid.spacing(1);
    const int nx = grid.axis_dofs(0);
    const int ny = grid.axis_dofs(1);
    const int cx_cells = grid.axis_cells(0);
    const int cy_cells = grid.axis_cells(1);

    // Tensor-product gradients are not cellwise constant; sampling them at
    // the 2x2 Gauss points of each cell keeps C^T M' C exact (the integrand
    // is at most quadratic per direction). Each sample point carries a
    // quarter of the cell volume; the two component rows share the weight.
    const double g = 0.5773502691896257;  // 1/sqrt(3)
    const std::array<double, 2> local = {0.5 * (1.0 - g), 0.5 * (1.0 + g)};
    const double w_point = 0.25 * hx * hy;

    const Index n_rows = static_cast<Index>(cx_cells) * cy_cells * 8;
    f.gradient_weights = RealVector::Constant(n_rows, w_point);
    triplets.reserve(static_cast<size_t>(n_rows * 4));

    const auto shape = [](int a, double t) { return a == 0 ? 1.0 - t : t; };
    const auto dshape = [](int a, double h) { return (a == 0 ? -1.0 : 1.0) / h; };

    Index row = 0;
    for (int cy = 0; cy < cy_cells; ++cy) {
      for (int cx = 0; cx < cx_cells; ++cx) {
        for (int qy = 0; qy < 2; ++qy) {
          for (int qx = 0; qx < 2; ++qx) {
            // rows row (d/dx) and row+1 (d/dy)
            for (int ay = 0; ay < 2; ++ay) {
              const int iy = cy - 1 + ay;
              if (iy < 0 || iy >= ny) continue;
              for (int ax = 0; ax < 2; ++ax) {
                const int ix = cx - 1 + ax;
                if (ix < 0 || ix >= nx) continue;
                const Index col = static_cast<Index>(iy) * nx + ix;
                const double tx = local[static_cast<size_t>(qx)];
                const double ty = local[static_cast<size_t>(qy)];
                triplets.emplace_back(static_cast<int>(row), static_cast<int>(col),
                                      dshape(ax, hx) * shape(ay, ty));
                triplets.emplace_back(static_cast<int>(row + 1), static_cast<int>(col),
                                      shape(ax, tx) * dshape(ay, hy));
              }
            }
            row += 2;
          }
        }

        for (int ay = 0; ay < 2; ++ay) {
          const int iy = cy - 1 + ay;
          if (iy < 0 || iy >= ny) continue;
          for (int ax = 0; ax < 2; ++ax) {
            const int ix = cx - 1 + ax;
            if (ix < 0 || ix >= nx) continue;
            const Index i = static_cast<Index>(iy) * nx + ix;
            for (int by = 0; by < 2; ++by) {
              const int jy = cy - 1 + by;
              if (jy < 0 || jy >= ny) continue;
              for (int bx = 0; bx < 2; ++bx) {
                const int jx = cx - 1 + bx;
                if (jx < 0 || jx >= nx) continue;
                const Index j = static_cast<Index>(jy) * nx + jx;
                f.stiffness(i, j) +=
                    element_stiffness(hx, ax, bx) * element_mass(hy, ay, by) +
                    element_mass(hx, ax, bx) * element_stiffness(hy, ay, by);
              }
            }
          }
        }
      }
    }
    f.gradient_sampler.resize(n_rows, n);
    f.gradient_sampler.setFromTriplets(triplets.begin(), triplets.end());
  }

  f.stiffness = 0.5 * (f.stiffness + f.stiffness.transpose()).eval();
  f.assembled = make_operator(gram, gram.solve(Matrix(f.stiffness.cast<cplx>())));
  return f;
}

ParticularOperator assemble_potential(const NodalBasis& basis,
                                      const GramMatrix& gram, const RealField& v) {
  const Grid& grid = basis.grid();
  if (gram.size() != grid.n_dofs()) {
    throw std::invalid_argument("assemble_potential: gram does not match grid");
  }
  Matrix m = Matrix::Zero(grid.n_dofs(), grid.n_dofs());
  for (Index k = 0; k < grid.n_dofs(); ++k) {
    const double value = v(grid.node(k));
    if (!std::isfinite(value)) {
      throw std::runtime_error("assemble_potential: non-finite value at node " +
                               std::to_string(k));
    }
    m(k, k) = value;
  }
  return make_operator(gram, std::move(m));
}

ParticularOperator assemble_potential_galerkin(const NodalBasis& basis,
                                               const GramMatrix& gram,
                                               const RealField& v) {
  const Grid& grid = basis.grid();
  if (gram.size() != grid.n_dofs()) {
    throw std::invalid_argument("assemble_potential_galerkin: gram mismatch");
  }
  const Index n = grid.n_dofs();
  RealMatrix b = RealMatrix::Zero(n, n);

  const auto shape = [](int a, double t) { return a == 0 ? 1.0 - t : t; };

  if (grid.dim() == 1) {
    const double h = grid.spacing(0);
    const int dofs = grid.axis_dofs(0);
    for (int cell = 0; cell < grid.axis_cells(0); ++cell) {
      for (size_t q = 0; q < 4; ++q) {
        const double t = 0.5 * (1.0 + detail::gauss_nodes[q]);
        const double x = (cell + t) * h;
        const double w = 0.5 * h * detail::gauss_weights[q];
        const double value = v(Point{x, 0.0});
        if (!std::isfinite(value)) {
          throw std::runtime_error("assemble_potential_galerkin: non-finite value");
        }
        for (int a = 0; a < 2; ++a) {
          const int i = cell - 1 + a;
          if (i < 0 || i >= dofs) continue;
          for (int c = 0; c < 2; ++c) {
            const int j = cell - 1 + c;
            if (j < 0 || j >= dofs) continue;
            b(i, j) += w * value * shape(a, t) * shape(c, t);
          }
        }
      }
    }
  } else {
    const double hx = grid.spacing(0);
    const double hy = grid.spacing(1);
    const int nx = grid.axis_dofs(0);
    const int ny = grid.axis_dofs(1);
    for (int cy = 0; cy < grid.axis_cells(1); ++cy) {
      for (int cx = 0; cx < grid.axis_cells(0); ++cx) {
        for (size_t qy = 0; qy < 4; ++qy) {
          const double ty = 0.5 * (1.0 + detail::gauss_nodes[qy]);
          const double y = (cy + ty) * hy;
          for (size_t qx = 0; qx < 4; ++qx) {
            const double tx = 0.5 * (1.0 + detail::gauss_nodes[qx]);
            const double x = (cx + tx) * hx;
            const double w = 0.25 * hx * hy * detail::gauss_weights[qx] *
                             detail::gauss_weights[qy];
            const double value = v(Point{x, y});
            if (!std::isfinite(value)) {
              throw std::runtime_error(
                  "assemble_potential_galerkin: non-finite value");
            }
            for (int ay = 0; ay < 2; ++ay) {
              const int iy = cy - 1 + ay;
              if (iy < 0 || iy >= ny) continue;
              for (int ax = 0; ax < 2; ++ax) {
                const int ix = cx - 1 + ax;
                if (ix < 0 || ix >= nx) continue;
                const Index i = static_cast<Index>(iy) * nx + ix;
                const double phi_i = shape(ax, tx) * shape(ay, ty);
                for (int by = 0; by < 2; ++by) {
                  const int jy = cy - 1 + by;
                  if (jy < 0 || jy >= ny) continue;
                  for (int bx = 0; bx < 2; ++bx) {
                    const int jx = cx - 1 + bx;
                    if (jx < 0 || jx >= nx) continue;
                    const Index j = static_cast<Index>(jy) * nx + jx;
                    b(i, j) += w * value * phi_i * shape(bx, tx) * shape(by, ty);
                  }
                }
              }
            }
          }
        }
      }
    }
  }

  b = 0.5 * (b + b.transpose()).eval();
  return make_operator(gram, gram.solve(Matrix(b.cast<cplx>())));
}

FactorizationReport verify_exact_factorization(const FactoredOperator& f,
                                               int trials, unsigned seed) {
  if (trials < 1) throw std::invalid_argument("verify_exact_factorization: trials >= 1");
  const GramMatrix& gram = *f.assembled.gram;
  const Index n = gram.size();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  const auto random_vector = [&]() {
    Vector u(n);
    for (Index i = 0; i < n; ++i) u[i] = cplx(dist(rng), dist(rng));
    return u;
  };

  const double op_scale = gram.operator_norm(f.assembled.matrix);

  FactorizationReport report;
  report.trials = trials;
  report.min_quadratic_form = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const Vector u = random_vector();
    const Vector w = random_vector();
    const Vector au = f.assembled.matrix * u;

    const cplx lhs = gram.inner(au, w);
    const Vector cu = f.gradient_sampler * u.real() +
                      cplx(0.0, 1.0) * (f.gradient_sampler * u.imag());
    const Vector cw = f.gradient_sampler * w.real() +
                      cplx(0.0, 1.0) * (f.gradient_sampler * w.imag());
    const cplx rhs = f.alpha * (cw.conjugate().cwiseProduct(f.gradient_weights.cast<cplx>())
                                    .cwiseProduct(cu))
                                   .sum();

    const double scale = std::max(1e-300, op_scale * gram.norm(u) * gram.norm(w));
    const double pairing = std::abs(lhs - rhs) / scale;

    const double quad_scale = std::max(1e-300, op_scale * gram.norm(u) * gram.norm(u));
    const double quad = gram.inner(au, u).real() / quad_scale;

    report.max_pairing_residual = std::max(report.max_pairing_residual, pairing);
    report.min_quadratic_form = std::min(report.min_quadratic_form, quad);
    if (pairing > 1e-11 || quad < -1e-11) {
      ++report.failures;
      report.failed_trials.push_back(t);
    }
  }
  report.passed = report.failures == 0;
  return report;
}

}  // namespace unigroup
