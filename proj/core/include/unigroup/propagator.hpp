#pragma once

#include <Eigen/LU>
#include <memory>

#include "unigroup/operators.hpp"
#include "unigroup/pade.hpp"

namespace unigroup {

enum class PadeVariant {
  standard,            // R_pp with the true coefficients (tau/2 at p = 1)
  full_step_cn,        // (1 + i tau H)^{-1} (1 - i tau H): R_11 at doubled step
};

// One-step map U = S^+ S with S = N_pp(-i tau H): exactly unitary in the
// M-geometry when H is M-self-adjoint. U is never formed densely for
// stepping; each application is one factorized solve plus one multiply.
//
// Immutable after build; step()/step_reverse() are pure and safe to call
// concurrently.
class PadePropagator {
 public:
  // Requires H.hermitian_flag and tau > 0. Records the dimensionless step
  // h_tau = tau * ||W H W^{-1}||_2 (spectral norm via a symmetric eigensolve;
  // guarded to N <= 10^4) and flags the Picard regime h_tau < 1.
  static PadePropagator build(const ParticularOperator& h, double tau, int p,
                              PadeVariant variant = PadeVariant::standard);

  int order() const { return p_; }
  double tau() const { return tau_; }
  double h_tau() const { return h_tau_; }
  bool picard_ok() const { return h_tau_ < 1.0; }
  PadeVariant variant() const { return variant_; }
  const GramMatrix& gram() const { return *gram_; }
  const Matrix& hamiltonian() const { return hamiltonian_; }
  Index size() const { return numerator_.rows(); }

  // Solve D x = S psi.
  Vector step(const Vector& psi) const;
  // M-adjoint step: M^{-1} S^* D^{-*} M psi.
  Vector step_reverse(const Vector& psi) const;

  // Dense U = D^{-1} N; intended for error measurement at small N.
  Matrix dense_map() const;

 private:
  PadePropagator() = default;

  Matrix hamiltonian_;
  Matrix numerator_;
  Matrix denominator_;
  Eigen::PartialPivLU<Matrix> lu_;
  const GramMatrix* gram_ = nullptr;
  int p_ = 1;
  double tau_ = 0.0;
  double h_tau_ = 0.0;
  PadeVariant variant_ = PadeVariant::standard;
};

enum class Direction { forward, reverse };

// Powers of the one-step map: apply(k, psi) = U^k psi (forward) or
// (U^dagger)^k psi (reverse, the discrete time-reversal group).
class DiscreteGroup {
 public:
  DiscreteGroup(std::shared_ptr<const PadePropagator> prop,
                Direction direction = Direction::forward);

  static DiscreteGroup forward(const ParticularOperator& h, double tau, int p,
                               PadeVariant variant = PadeVariant::standard);

  const PadePropagator& propagator() const { return *prop_; }
  Direction direction() const { return direction_; }
  DiscreteGroup reversed() const;

  Vector apply(long k, Vector psi) const;

 private:
  std::shared_ptr<const PadePropagator> prop_;
  Direction direction_;
};

// e^{-i t H} through the symmetric eigendecomposition of W H W^{-1}; exact
// at the discrete level and independent of the Pade path.
Matrix hermitian_expm(const GramMatrix& gram, const Matrix& h, double t);

struct StepError {
  double measured = 0.0;
  double bound = 0.0;
};

// M-operator-norm distance between the exact exponential (caller-supplied
// oracle) and the one-step map, with the one-step bound alongside.
StepError single_step_error(const PadePropagator& prop,
                            const Matrix& exact_exponential);

// Same against U^m, with the m-step bound m^{2p+1}/(2p+1)! h_tau^{2p+1}.
StepError multi_step_error(const PadePropagator& prop, int m_steps,
                           const Matrix& exact_exponential);

}  // namespace unigroup
