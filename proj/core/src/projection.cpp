#include "unigroup/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gauss_rule.hpp"

namespace unigroup {

namespace {
using detail::gauss_nodes;
using detail::gauss_weights;
}  // namespace

NodalBasis::AxisSupport NodalBasis::axis_support(int axis, double x) const {
  AxisSupport s;
  const auto& xs = grid_.axis_nodes(axis);
  const double length = grid_.domain().lengths[static_cast<size_t>(axis)];
  if (x <= 0.0 || x >= length || xs.empty()) return s;

  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const int right = static_cast<int>(it - xs.begin());  // first node > x
  const int left = right - 1;
  const int n = static_cast<int>(xs.size());
  const double a = left >= 0 ? xs[static_cast<size_t>(left)] : 0.0;
  const double b = right < n ? xs[static_cast<size_t>(right)] : length;
  const double t = (x - a) / (b - a);
  if (left >= 0) {
    s.index[s.count] = left;
    s.value[s.count] = 1.0 - t;
    ++s.count;
  }
  if (right < n) {
    s.index[s.count] = right;
    s.value[s.count] = t;
    ++s.count;
  }
  return s;
}

double NodalBasis::evaluate(Index k, Point p) const {
  const Index n = grid_.n_dofs();
  if (k < 0 || k >= n) throw std::out_of_range("basis index");
  if (grid_.dim() == 1) {
    const auto s = axis_support(0, p.x);
    for (int i = 0; i < s.count; ++i) {
      if (s.index[static_cast<size_t>(i)] == static_cast<int>(k)) {
        return s.value[static_cast<size_t>(i)];
      }
    }
    return 0.0;
  }
  const int nx = grid_.axis_dofs(0);
  const int kx = static_cast<int>(k % nx);
  const int ky = static_cast<int>(k / nx);
  const auto sx = axis_support(0, p.x);
  const auto sy = axis_support(1, p.y);
  double vx = 0.0, vy = 0.0;
  for (int i = 0; i < sx.count; ++i) {
    if (sx.index[static_cast<size_t>(i)] == kx) vx = sx.value[static_cast<size_t>(i)];
  }
  for (int i = 0; i < sy.count; ++i) {
    if (sy.index[static_cast<size_t>(i)] == ky) vy = sy.value[static_cast<size_t>(i)];
  }
  return vx * vy;
}

cplx NodalBasis::evaluate_sum(const Vector& coeffs, Point p) const {
  if (coeffs.size() != grid_.n_dofs()) {
    throw std::invalid_argument("coefficient vector length does not match grid");
  }
  if (grid_.dim() == 1) {
    const auto s = axis_support(0, p.x);
    cplx acc = 0.0;
    for (int i = 0; i < s.count; ++i) {
      acc += s.value[static_cast<size_t>(i)] * coeffs[s.index[static_cast<size_t>(i)]];
    }
    return acc;
  }
  const auto sx = axis_support(0, p.x);
  const auto sy = axis_support(1, p.y);
  const Index nx = grid_.axis_dofs(0);
  cplx acc = 0.0;
  for (int j = 0; j < sy.count; ++j) {
    for (int i = 0; i < sx.count; ++i) {
      const Index k = static_cast<Index>(sy.index[static_cast<size_t>(j)]) * nx +
                      sx.index[static_cast<size_t>(i)];
      acc += sy.value[static_cast<size_t>(j)] * sx.value[static_cast<size_t>(i)] *
             coeffs[k];
    }
  }
  return acc;
}

Vector ProjectionPair::decompose(const ScalarField& v) const {
  const Grid& g = basis_.grid();
  Vector c(g.n_dofs());
  for (Index k = 0; k < c.size(); ++k) {
    const cplx value = v(g.node(k));
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
      throw std::runtime_error("decompose: non-finite sample at node " +
                               std::to_string(k));
    }
    c[k] = value;
  }
  return c;
}

ScalarField ProjectionPair::summate(Vector coeffs) const {
  if (coeffs.size() != basis_.size()) {
    throw std::invalid_argument("summate: coefficient length mismatch");
  }
  return [basis = basis_, c = std::move(coeffs)](Point p) {
    return basis.evaluate_sum(c, p);
  };
}

ScalarField ProjectionPair::project(const ScalarField& v) const {
  return summate(decompose(v));
}

namespace {

template <typename F>
double quadrature_integral(const Grid& grid, const F& sq_value) {
  const auto cell_points = [&](int axis, int cell, std::array<double, 4>& pts) {
    const double h = grid.spacing(axis);
    const double a = cell * h;
    for (size_t q = 0; q < 4; ++q) pts[q] = a + 0.5 * h * (1.0 + gauss_nodes[q]);
  };

  double total = 0.0;
  if (grid.dim() == 1) {
    const double jac = 0.5 * grid.spacing(0);
    std::array<double, 4> pts{};
    for (int cell = 0; cell < grid.axis_cells(0); ++cell) {
      cell_points(0, cell, pts);
      for (size_t q = 0; q < 4; ++q) {
        total += jac * gauss_weights[q] * sq_value(Point{pts[q], 0.0});
      }
    }
    return total;
  }
  const double jac = 0.25 * grid.spacing(0) * grid.spacing(1);
  std::array<double, 4> xs{}, ys{};
  for (int cy = 0; cy < grid.axis_cells(1); ++cy) {
    cell_points(1, cy, ys);
    for (int cx = 0; cx < grid.axis_cells(0); ++cx) {
      cell_points(0, cx, xs);
      for (size_t qy = 0; qy < 4; ++qy) {
        for (size_t qx = 0; qx < 4; ++qx) {
          total += jac * gauss_weights[qy] * gauss_weights[qx] *
                   sq_value(Point{xs[qx], ys[qy]});
        }
      }
    }
  }
  return total;
}

}  // namespace

double quadrature_l2_norm(const Grid& grid, const ScalarField& f) {
  return std::sqrt(
      quadrature_integral(grid, [&](Point p) { return std::norm(f(p)); }));
}

double quadrature_l2_distance(const Grid& grid, const ScalarField& f,
                              const ScalarField& g) {
  return std::sqrt(
      quadrature_integral(grid, [&](Point p) { return std::norm(f(p) - g(p)); }));
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("loglog_slope needs matched samples, >= 2");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

OrderFit measure_approximation_order(const Domain& domain, int m_max,
                                     const ScalarField& v,
                                     const ProjectionErrorNorm& norm) {
  if (m_max < 2) throw std::invalid_argument("order sweep needs m_max >= 2");
  const ProjectionErrorNorm eval_norm =
      norm ? norm : ProjectionErrorNorm([](const ProjectionPair& pair,
                                           const ScalarField& field) {
        return quadrature_l2_distance(pair.grid(), pair.project(field), field);
      });

  OrderFit fit;
  for (int m = 0; m <= m_max; ++m) {
    ProjectionPair pair(build_grid(domain, m));
    const double err = eval_norm(pair, v);
    if (err < 1e-13) {
      throw std::domain_error(
          "approximation order undefined: field is resolved on level " +
          std::to_string(m));
    }
    fit.hs.push_back(pair.grid().h());
    fit.errors.push_back(err);
  }
  fit.slope = loglog_slope(fit.hs, fit.errors);
  return fit;
}

}  // namespace unigroup
