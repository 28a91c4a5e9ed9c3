#include "unigroup/pade.hpp"

#include <cmath>
#include <stdexcept>

namespace unigroup {

namespace {

void check_order(int p, int q) {
  if (p != q) throw std::invalid_argument("only diagonal Pade (p == q) is supported");
  if (p < 1 || p > 6) {
    throw std::invalid_argument("diagonal Pade order must be in 1..6");
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

std::vector<double> pade_coefficients(int p, int q) {
  check_order(p, q);
  std::vector<double> c(static_cast<size_t>(p) + 1);
  for (int j = 0; j <= p; ++j) {
    c[static_cast<size_t>(j)] = factorial(p + q - j) * factorial(p) /
                                (factorial(p + q) * factorial(j) * factorial(p - j));
  }
  return c;
}

std::pair<Matrix, Matrix> pade_polynomials(int p, int q, const Matrix& a) {
  check_order(p, q);
  if (a.rows() != a.cols()) throw std::invalid_argument("pade_polynomials: square input");
  const auto c = pade_coefficients(p, q);

  // Horner on the matrix argument: c_0 I + A (c_1 I + A (...)).
  const auto horner = [&](const Matrix& arg) {
    Matrix acc = c.back() * Matrix::Identity(arg.rows(), arg.cols());
    for (int j = p - 1; j >= 0; --j) {
      acc = (arg * acc).eval();
      acc += c[static_cast<size_t>(j)] * Matrix::Identity(arg.rows(), arg.cols());
    }
    return acc;
  };

  return {horner(a), horner(-a)};
}

double pade_taylor_coefficient(int p, int k) {
  check_order(p, p);
  if (k < 0) throw std::invalid_argument("pade_taylor_coefficient: k >= 0");
  const auto c = pade_coefficients(p, p);
  const auto num = [&](int j) {
    return j <= p ? c[static_cast<size_t>(j)] : 0.0;
  };
  const auto den = [&](int j) {
    return j <= p ? c[static_cast<size_t>(j)] * ((j % 2 == 0) ? 1.0 : -1.0) : 0.0;
  };

  // r_k from N = D * R: r_k = (n_k - sum_{i=1..k} d_i r_{k-i}) / d_0.
  std::vector<double> r(static_cast<size_t>(k) + 1);
  for (int m = 0; m <= k; ++m) {
    double acc = num(m);
    for (int i = 1; i <= m; ++i) acc -= den(i) * r[static_cast<size_t>(m - i)];
    r[static_cast<size_t>(m)] = acc / den(0);
  }
  return r[static_cast<size_t>(k)];
}

double single_step_bound_constant(int p) {
  const int k = 2 * p + 1;
  return std::abs(1.0 / factorial(k) - pade_taylor_coefficient(p, k));
}

double multi_step_bound(int p, int m_steps, double h_tau) {
  if (m_steps < 1) throw std::invalid_argument("multi_step_bound: m >= 1");
  const int k = 2 * p + 1;
  return std::pow(static_cast<double>(m_steps), k) / factorial(k) *
         std::pow(h_tau, k);
}

}  // namespace unigroup
