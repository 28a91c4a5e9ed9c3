#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

namespace unigroup {

using cplx = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Fields are point-evaluable callbacks so sampling is well defined on any
// grid; 1d problems ignore the y coordinate.
using ScalarField = std::function<cplx(Point)>;
using RealField = std::function<double(Point)>;

}  // namespace unigroup
