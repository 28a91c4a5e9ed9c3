#pragma once

#include "unigroup/projection.hpp"
#include "unigroup/types.hpp"

namespace unigroup {

// Symmetric positive definite inner product matrix together with its formal
// square root W (the unique SPD matrix with W*W = M) and the spectral
// factorization backing every M^{-1} and W^{-1} application. Defines the
// M-geometry: inner product v^* M u, norm ||W u||_2 and M-adjoint
// A -> M^{-1} A^* M.
//
// Immutable after construction; all operations are const and reentrant.
class GramMatrix {
 public:
  // Symmetrizes the input and eigendecomposes it. Throws std::runtime_error
  // when the symmetrized matrix is not positive definite.
  explicit GramMatrix(RealMatrix mass);

  Index size() const { return mass_.rows(); }
  const RealMatrix& mass() const { return mass_; }
  const RealMatrix& square_root() const { return sqrt_; }
  const RealMatrix& square_root_inverse() const { return sqrt_inv_; }
  double eigen_floor() const { return eigen_floor_; }
  double eigen_ceiling() const { return eigen_ceiling_; }

  Vector apply_mass(const Vector& u) const;
  Vector apply_sqrt(const Vector& u) const;
  Vector apply_sqrt_inverse(const Vector& u) const;

  // M^{-1} rhs through the cached spectral factors.
  Vector solve(const Vector& rhs) const;
  Matrix solve(const Matrix& rhs) const;

  // v^* M u: linear in u, conjugate-linear in v.
  cplx inner(const Vector& u, const Vector& v) const;

  // ||W u||_2 = sqrt(<u, u>_M).
  double norm(const Vector& u) const;

  // M^{-1} A^* M.
  Matrix adjoint(const Matrix& a) const;

  // M-operator norm ||W A W^{-1}||_2 (largest singular value of the
  // W-conjugated matrix). Dense; intended for error measurements at small N.
  double operator_norm(const Matrix& a) const;

  // sqrt of the largest diagonal entry of M^{-1}: bounds nodal values by
  // the M-norm, |u_i| <= embedding_constant() * ||u||_M.
  double max_inverse_embedding() const;

 private:
  RealMatrix mass_;
  RealMatrix sqrt_;
  RealMatrix sqrt_inv_;
  RealMatrix eigvec_;
  RealVector eigval_;
  double eigen_floor_ = 0.0;
  double eigen_ceiling_ = 0.0;
};

// Assembles the P1 mass matrix M_ij = \int b_i b_j from closed-form element
// integrals (exact; no quadrature involved).
GramMatrix assemble_mass(const NodalBasis& basis);
RealMatrix assemble_mass_matrix(const NodalBasis& basis);

}  // namespace unigroup
