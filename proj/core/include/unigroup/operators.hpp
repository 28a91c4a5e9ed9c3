#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "unigroup/gram.hpp"
#include "unigroup/projection.hpp"
#include "unigroup/types.hpp"

namespace unigroup {

// Square matrix tied to a gram; hermitian_flag records whether the matrix
// was verified M-self-adjoint at construction (||A - A^dagger||_max within
// 1e-11 * ||A||_max).
struct ParticularOperator {
  Matrix matrix;
  const GramMatrix* gram = nullptr;
  bool hermitian_flag = false;
};

ParticularOperator make_operator(const GramMatrix& gram, Matrix matrix);

ParticularOperator identity_operator(const GramMatrix& gram);

// A + B and scalar multiples, re-measuring the hermitian flag.
ParticularOperator operator_sum(const ParticularOperator& a,
                                const ParticularOperator& b);
ParticularOperator operator_scale(cplx factor, const ParticularOperator& a);

// AB - BA. Requires both operands to share a gram.
ParticularOperator commutator(const ParticularOperator& a,
                              const ParticularOperator& b);

// Kinetic term in factored form: the gradient sampler C maps nodal
// coefficients to per-cell Gauss-point gradient samples, the gradient-space
// gram is the diagonal of quadrature weights (each sample carries its share
// of the cell volume), and alpha C^dagger C = M^{-1} C^T diag(w) C equals
// M^{-1} K with K the closed-form stiffness matrix.
struct FactoredOperator {
  Eigen::SparseMatrix<double> gradient_sampler;  // C
  RealVector gradient_weights;                   // diag of M'
  double alpha = 1.0;
  RealMatrix stiffness;                          // K_ij = \int grad b_i . grad b_j
  ParticularOperator assembled;                  // H0 = M^{-1} K
};

// Discrete -Laplacian with Dirichlet elimination. The assembled operator is
// M-self-adjoint and positive definite (stiffness-positive sign convention;
// propagation uses e^{-it H} throughout).
FactoredOperator assemble_kinetic(const NodalBasis& basis, const GramMatrix& gram);

// Collocated multiplication operator diag(V(node_k)), consistent with nodal
// decomposition. Not exactly M-self-adjoint for non-constant V against a
// consistent mass matrix; the flag is measured, not assumed.
ParticularOperator assemble_potential(const NodalBasis& basis,
                                      const GramMatrix& gram, const RealField& v);

// Galerkin multiplication operator M^{-1} B with B_ij = \int V b_i b_j
// (4-point Gauss per cell). Exactly M-self-adjoint for real V; used where a
// potential must enter a unitary propagator.
ParticularOperator assemble_potential_galerkin(const NodalBasis& basis,
                                               const GramMatrix& gram,
                                               const RealField& v);

struct FactorizationReport {
  int trials = 0;
  int failures = 0;
  std::vector<int> failed_trials;      // indices of the violating vector pairs
  double max_pairing_residual = 0.0;   // |<Au,v>_M - alpha <Cu,Cv>_M'| / scale
  double min_quadratic_form = 0.0;     // min over trials of <Au,u>_M.real / scale
  bool passed = false;
};

// Randomized check of <Au,v>_M = alpha <Cu,Cv>_M' and positive
// semidefiniteness. Returns a failing report instead of throwing.
FactorizationReport verify_exact_factorization(const FactoredOperator& f,
                                               int trials, unsigned seed = 20240901);

}  // namespace unigroup
