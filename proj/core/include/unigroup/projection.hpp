#pragma once

#include <utility>
#include <vector>

#include "unigroup/mesh.hpp"
#include "unigroup/types.hpp"

namespace unigroup {

// First-order tensor-product nodal basis: one hat function per interior
// node, pseudo-orthonormal against point evaluation (b_j(node_k) = delta_jk)
// and zero on the domain boundary.
class NodalBasis {
 public:
  explicit NodalBasis(Grid grid) : grid_(std::move(grid)) {}

  const Grid& grid() const { return grid_; }
  Index size() const { return grid_.n_dofs(); }

  // Value of the k-th basis function at p (0 outside the closed domain).
  double evaluate(Index k, Point p) const;

  // (sum_k coeffs_k b_k)(p). Evaluation at a node coordinate reproduces the
  // coefficient bit-exactly.
  cplx evaluate_sum(const Vector& coeffs, Point p) const;

  // Nonzero 1d hats at coordinate x along an axis: at most two
  // (index, value) pairs.
  struct AxisSupport {
    int count = 0;
    std::array<int, 2> index{-1, -1};
    std::array<double, 2> value{0.0, 0.0};
  };
  AxisSupport axis_support(int axis, double x) const;

 private:
  Grid grid_;
};

// Summation / decomposition pair over the nodal basis. decompose samples a
// field at the grid nodes; summate expands coefficients into an everywhere
// evaluable function. Both are pure and reentrant.
class ProjectionPair {
 public:
  explicit ProjectionPair(Grid grid) : basis_(std::move(grid)) {}
  explicit ProjectionPair(NodalBasis basis) : basis_(std::move(basis)) {}

  const NodalBasis& basis() const { return basis_; }
  const Grid& grid() const { return basis_.grid(); }

  // c_k = v(node_k). Throws std::runtime_error on non-finite samples.
  Vector decompose(const ScalarField& v) const;

  // Returns a self-contained field (captures the basis by value), so the
  // result may outlive this pair.
  ScalarField summate(Vector coeffs) const;

  // P_S v = summate(decompose(v)).
  ScalarField project(const ScalarField& v) const;

 private:
  NodalBasis basis_;
};

// L2 quadrature over the grid cells: 4-point Gauss-Legendre per cell and per
// axis (tensorized in 2d), exact for polynomials through degree 7.
double quadrature_l2_norm(const Grid& grid, const ScalarField& f);
double quadrature_l2_distance(const Grid& grid, const ScalarField& f,
                              const ScalarField& g);

struct OrderFit {
  std::vector<double> hs;
  std::vector<double> errors;
  double slope = 0.0;
};

// Error norm used by the order sweep; defaults to the quadrature L2 distance
// between P_S v and v on the pair's own grid.
using ProjectionErrorNorm =
    std::function<double(const ProjectionPair& pair, const ScalarField& v)>;

// Projection errors on grids m = 0..m_max and the least-squares slope of
// log(error) against log(h). Throws std::domain_error("approximation order
// undefined") when some error is below 1e-13 (v already in the discrete
// space). Requires m_max >= 2.
OrderFit measure_approximation_order(const Domain& domain, int m_max,
                                     const ScalarField& v,
                                     const ProjectionErrorNorm& norm = {});

// Least-squares slope of log(y) vs log(x); shared by the convergence sweeps.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace unigroup
