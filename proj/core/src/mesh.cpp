#include "unigroup/mesh.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace unigroup {

Domain Domain::interval(double length) {
  Domain d;
  d.dim = 1;
  d.lengths = {length, length};
  d.validate();
  return d;
}

Domain Domain::box(double lx, double ly) {
  Domain d;
  d.dim = 2;
  d.lengths = {lx, ly};
  d.validate();
  return d;
}

void Domain::validate() const {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("domain dimension must be 1 or 2, got " +
                                std::to_string(dim));
  }
  for (int axis = 0; axis < dim; ++axis) {
    const double l = lengths[static_cast<size_t>(axis)];
    if (!std::isfinite(l) || l <= 0.0) {
      throw std::invalid_argument("domain lengths must be finite and positive");
    }
  }
}

Index Grid::n_dofs() const {
  Index n = static_cast<Index>(nodes_[0].size());
  if (domain_.dim == 2) n *= static_cast<Index>(nodes_[1].size());
  return n;
}

Point Grid::node(Index k) const {
  if (k < 0 || k >= n_dofs()) throw std::out_of_range("grid node index");
  if (domain_.dim == 1) return Point{nodes_[0][static_cast<size_t>(k)], 0.0};
  const Index nx = static_cast<Index>(nodes_[0].size());
  const Index ix = k % nx;
  const Index iy = k / nx;
  return Point{nodes_[0][static_cast<size_t>(ix)],
               nodes_[1][static_cast<size_t>(iy)]};
}

Grid build_grid(const Domain& domain, int m) {
  domain.validate();
  if (m < 0) throw std::invalid_argument("refinement parameter must be >= 0");
  if (m > 24) throw std::invalid_argument("refinement parameter too large");

  Grid g;
  g.domain_ = domain;
  g.m_ = m;
  for (int axis = 0; axis < domain.dim; ++axis) {
    const size_t a = static_cast<size_t>(axis);
    const double length = domain.lengths[a];
    const int cells = (1 << m) * Grid::base_cells;
    const double h = length / cells;
    g.cells_[a] = cells;
    g.h_[a] = h;
    g.nodes_[a].resize(static_cast<size_t>(cells - 1));
    for (int i = 1; i < cells; ++i) {
      g.nodes_[a][static_cast<size_t>(i - 1)] = static_cast<double>(i) * h;
    }
  }
  return g;
}

Grid refine(const Grid& grid) { return build_grid(grid.domain(), grid.refinement() + 1); }

}  // namespace unigroup
