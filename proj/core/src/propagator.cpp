#include "unigroup/propagator.hpp"

#include <cmath>
#include <stdexcept>

namespace unigroup {

PadePropagator PadePropagator::build(const ParticularOperator& h, double tau,
                                     int p, PadeVariant variant) {
  if (h.gram == nullptr) throw std::invalid_argument("propagator: detached operator");
  if (!h.hermitian_flag) {
    throw std::invalid_argument("propagator requires an M-self-adjoint Hamiltonian");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("propagator: tau must be positive");
  }
  if (h.matrix.rows() > 10000) {
    throw std::invalid_argument("propagator: N > 10^4 (dense spectral-norm guard)");
  }

  PadePropagator prop;
  prop.gram_ = h.gram;
  prop.hamiltonian_ = h.matrix;
  prop.tau_ = tau;
  prop.variant_ = variant;
  prop.p_ = variant == PadeVariant::full_step_cn ? 1 : p;

  // Crank-Nicolson without the 1/2 factors is R_11 evaluated at twice the
  // step.
  const double effective_tau = variant == PadeVariant::full_step_cn ? 2.0 * tau : tau;
  const Matrix a = cplx(0.0, -effective_tau) * h.matrix;
  auto [num, den] = pade_polynomials(prop.p_, prop.p_, a);
  prop.numerator_ = std::move(num);
  prop.denominator_ = std::move(den);
  prop.lu_.compute(prop.denominator_);

  // D(-i tau H) has no zero eigenvalue for Hermitian H and real tau; a
  // numerically singular factor therefore signals a non-Hermitian input.
  const auto& lu_diag = prop.lu_.matrixLU().diagonal();
  const double pivot_floor = lu_diag.cwiseAbs().minCoeff();
  const double pivot_scale = lu_diag.cwiseAbs().maxCoeff();
  if (!(pivot_floor > 1e-14 * pivot_scale)) {
    throw std::invalid_argument("propagator: singular Pade denominator");
  }

  const GramMatrix& gram = *h.gram;
  const Matrix sym = gram.square_root().cast<cplx>() * h.matrix *
                     gram.square_root_inverse().cast<cplx>();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (sym + sym.adjoint()));
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("propagator: Hamiltonian eigensolve failed");
  }
  prop.h_tau_ = tau * eig.eigenvalues().cwiseAbs().maxCoeff();
  return prop;
}

Vector PadePropagator::step(const Vector& psi) const {
  if (psi.size() != size()) throw std::invalid_argument("step: dimension mismatch");
  return lu_.solve((numerator_ * psi).eval());
}

Vector PadePropagator::step_reverse(const Vector& psi) const {
  if (psi.size() != size()) throw std::invalid_argument("step: dimension mismatch");
  const Vector w = gram_->apply_mass(psi);
  const Vector y = lu_.adjoint().solve(w);
  return gram_->solve((numerator_.adjoint() * y).eval());
}

Matrix PadePropagator::dense_map() const { return lu_.solve(numerator_); }

DiscreteGroup::DiscreteGroup(std::shared_ptr<const PadePropagator> prop,
                             Direction direction)
    : prop_(std::move(prop)), direction_(direction) {
  if (!prop_) throw std::invalid_argument("group: null propagator");
}

DiscreteGroup DiscreteGroup::forward(const ParticularOperator& h, double tau,
                                     int p, PadeVariant variant) {
  return DiscreteGroup(
      std::make_shared<PadePropagator>(PadePropagator::build(h, tau, p, variant)),
      Direction::forward);
}

DiscreteGroup DiscreteGroup::reversed() const {
  return DiscreteGroup(prop_, direction_ == Direction::forward
                                  ? Direction::reverse
                                  : Direction::forward);
}

Vector DiscreteGroup::apply(long k, Vector psi) const {
  if (k < 0) throw std::invalid_argument("group power must be nonnegative");
  for (long i = 0; i < k; ++i) {
    psi = direction_ == Direction::forward ? prop_->step(psi)
                                           : prop_->step_reverse(psi);
  }
  return psi;
}

Matrix hermitian_expm(const GramMatrix& gram, const Matrix& h, double t) {
  if (h.rows() != gram.size() || h.cols() != gram.size()) {
    throw std::invalid_argument("hermitian_expm: dimension mismatch");
  }
  const Matrix w = gram.square_root().cast<cplx>();
  const Matrix w_inv = gram.square_root_inverse().cast<cplx>();
  const Matrix sym = w * h * w_inv;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (sym + sym.adjoint()));
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_expm: eigensolve failed");
  }
  const Index n = h.rows();
  Vector phases(n);
  for (Index i = 0; i < n; ++i) {
    phases[i] = std::exp(cplx(0.0, -t * eig.eigenvalues()[i]));
  }
  const Matrix core =
      eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
  return w_inv * core * w;
}

StepError single_step_error(const PadePropagator& prop,
                            const Matrix& exact_exponential) {
  StepError e;
  e.measured = prop.gram().operator_norm(exact_exponential - prop.dense_map());
  e.bound = single_step_bound_constant(prop.order()) *
            std::pow(prop.h_tau(), 2 * prop.order() + 1);
  return e;
}

StepError multi_step_error(const PadePropagator& prop, int m_steps,
                           const Matrix& exact_exponential) {
  if (m_steps < 1) throw std::invalid_argument("multi_step_error: m >= 1");
  const Matrix u = prop.dense_map();
  Matrix power = Matrix::Identity(u.rows(), u.cols());
  for (int i = 0; i < m_steps; ++i) power = (u * power).eval();
  StepError e;
  e.measured = prop.gram().operator_norm(exact_exponential - power);
  e.bound = multi_step_bound(prop.order(), m_steps, prop.h_tau());
  return e;
}

}  // namespace unigroup
