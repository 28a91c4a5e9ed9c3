#pragma once

#include <array>
#include <vector>

#include "unigroup/types.hpp"

namespace unigroup {

// Box domain [0, Lx] (x [0, Ly] when dim == 2), dimensionless units.
struct Domain {
  int dim = 1;
  std::array<double, 2> lengths{1.0, 1.0};

  static Domain interval(double length);
  static Domain box(double lx, double ly);

  // Throws std::invalid_argument unless dim is 1 or 2 and every length is
  // finite and strictly positive.
  void validate() const;
};

// Tensor-product set of interior nodes of a uniform partition, with the
// boundary nodes eliminated (homogeneous Dirichlet conditions). Per axis of
// extent L at refinement m there are 2^m * base_cells cells of size
// h = L / (2^m * base_cells) and one node per interior cell boundary.
//
// Immutable after construction; safe to share across threads.
class Grid {
 public:
  static constexpr int base_cells = 4;

  const Domain& domain() const { return domain_; }
  int refinement() const { return m_; }
  int dim() const { return domain_.dim; }

  double spacing(int axis) const { return h_[static_cast<size_t>(axis)]; }
  // Convergence parameter: the largest per-axis spacing.
  double h() const { return domain_.dim == 2 ? std::max(h_[0], h_[1]) : h_[0]; }

  int axis_cells(int axis) const { return cells_[static_cast<size_t>(axis)]; }
  int axis_dofs(int axis) const {
    return static_cast<int>(nodes_[static_cast<size_t>(axis)].size());
  }
  const std::vector<double>& axis_nodes(int axis) const {
    return nodes_[static_cast<size_t>(axis)];
  }

  Index n_dofs() const;
  // Row-major ordering, fixed once for the whole library: k = iy * nx + ix.
  Point node(Index k) const;

 private:
  friend Grid build_grid(const Domain& domain, int m);

  Domain domain_;
  int m_ = 0;
  std::array<int, 2> cells_{0, 0};
  std::array<double, 2> h_{0.0, 0.0};
  std::array<std::vector<double>, 2> nodes_;
};

// Builds the interior grid at refinement level m >= 0.
Grid build_grid(const Domain& domain, int m);

// Dyadic refinement: the next finer grid on the same domain. Coarse nodes
// are a subset of the fine nodes.
Grid refine(const Grid& grid);

}  // namespace unigroup
