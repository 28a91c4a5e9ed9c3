#include "unigroup/gram.hpp"

#include <cmath>
#include <stdexcept>

namespace unigroup {

namespace {

// A (real) acting on a complex vector, componentwise on re/im.
Vector real_apply(const RealMatrix& a, const Vector& u) {
  return a * u.real() + cplx(0.0, 1.0) * (a * u.imag());
}

}  // namespace

GramMatrix::GramMatrix(RealMatrix mass) {
  if (mass.rows() != mass.cols() || mass.rows() == 0) {
    throw std::invalid_argument("inner product matrix must be square");
  }
  mass_ = 0.5 * (mass + mass.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(mass_);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("inner product matrix eigendecomposition failed");
  }
  eigvec_ = eig.eigenvectors();
  eigval_ = eig.eigenvalues();
  eigen_floor_ = eigval_.minCoeff();
  eigen_ceiling_ = eigval_.maxCoeff();
  if (!(eigen_floor_ > 0.0)) {
    throw std::runtime_error("inner product matrix is not positive definite");
  }

  const RealVector sqrt_vals = eigval_.cwiseSqrt();
  sqrt_ = eigvec_ * sqrt_vals.asDiagonal() * eigvec_.transpose();
  sqrt_ = 0.5 * (sqrt_ + sqrt_.transpose()).eval();
  sqrt_inv_ = eigvec_ * sqrt_vals.cwiseInverse().asDiagonal() * eigvec_.transpose();
  sqrt_inv_ = 0.5 * (sqrt_inv_ + sqrt_inv_.transpose()).eval();
}

Vector GramMatrix::apply_mass(const Vector& u) const { return real_apply(mass_, u); }
Vector GramMatrix::apply_sqrt(const Vector& u) const { return real_apply(sqrt_, u); }
Vector GramMatrix::apply_sqrt_inverse(const Vector& u) const {
  return real_apply(sqrt_inv_, u);
}

Vector GramMatrix::solve(const Vector& rhs) const {
  if (rhs.size() != size()) throw std::invalid_argument("gram solve: size mismatch");
  const Vector y = real_apply(eigvec_.transpose(), rhs);
  const Vector scaled = y.array() / eigval_.array().cast<cplx>();
  return real_apply(eigvec_, scaled);
}

Matrix GramMatrix::solve(const Matrix& rhs) const {
  if (rhs.rows() != size()) throw std::invalid_argument("gram solve: size mismatch");
  Matrix out(rhs.rows(), rhs.cols());
  for (Index j = 0; j < rhs.cols(); ++j) out.col(j) = solve(Vector(rhs.col(j)));
  return out;
}

cplx GramMatrix::inner(const Vector& u, const Vector& v) const {
  if (u.size() != size() || v.size() != size()) {
    throw std::invalid_argument("m_inner: dimension mismatch");
  }
  return v.dot(apply_mass(u));  // Eigen's dot conjugates the left argument
}

double GramMatrix::norm(const Vector& u) const {
  if (u.size() != size()) throw std::invalid_argument("m_norm: dimension mismatch");
  return apply_sqrt(u).norm();
}

Matrix GramMatrix::adjoint(const Matrix& a) const {
  if (a.rows() != size() || a.cols() != size()) {
    throw std::invalid_argument("m_adjoint: dimension mismatch");
  }
  const Matrix am = a.adjoint() * mass_.cast<cplx>();
  return solve(am);
}

double GramMatrix::operator_norm(const Matrix& a) const {
  if (a.rows() != size() || a.cols() != size()) {
    throw std::invalid_argument("operator_norm: dimension mismatch");
  }
  const Matrix b = sqrt_.cast<cplx>() * a * sqrt_inv_.cast<cplx>();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(b.adjoint() * b);
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

double GramMatrix::max_inverse_embedding() const {
  double max_diag = 0.0;
  for (Index i = 0; i < size(); ++i) {
    double d = 0.0;
    for (Index k = 0; k < size(); ++k) {
      const double q = eigvec_(i, k);
      d += q * q / eigval_[k];
    }
    max_diag = std::max(max_diag, d);
  }
  return std::sqrt(max_diag);
}

RealMatrix assemble_mass_matrix(const NodalBasis& basis) {
  const Grid& grid = basis.grid();

  // 1d element mass on a cell of size h: (h/6) [[2, 1], [1, 2]].
  const auto element_mass = [](double h, int a, int b) {
    return (a == b) ? h / 3.0 : h / 6.0;
  };

  const Index n = grid.n_dofs();
  RealMatrix m = RealMatrix::Zero(n, n);

  if (grid.dim() == 1) {
    const double h = grid.spacing(0);
    const int dofs = grid.axis_dofs(0);
    for (int cell = 0; cell < grid.axis_cells(0); ++cell) {
      for (int a = 0; a < 2; ++a) {
        const int i = cell - 1 + a;
        if (i < 0 || i >= dofs) continue;
        for (int b = 0; b < 2; ++b) {
          const int j = cell - 1 + b;
          if (j < 0 || j >= dofs) continue;
          m(i, j) += element_mass(h, a, b);
        }
      }
    }
    return m;
  }

  const double hx = grid.spacing(0);
  const double hy = grid.spacing(1);
  const int nx = grid.axis_dofs(0);
  const int ny = grid.axis_dofs(1);
  for (int cy = 0; cy < grid.axis_cells(1); ++cy) {
    for (int cx = 0; cx < grid.axis_cells(0); ++cx) {
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
              m(i, j) += element_mass(hx, ax, bx) * element_mass(hy, ay, by);
            }
          }
        }
      }
    }
  }
  return m;
}

GramMatrix assemble_mass(const NodalBasis& basis) {
  return GramMatrix(assemble_mass_matrix(basis));
}

}  // namespace unigroup
