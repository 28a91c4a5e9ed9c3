#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "unigroup/propagator.hpp"

namespace unigroup {

struct ExpectationSeries {
  std::vector<long> steps;
  std::vector<double> values;
};

// <B>_psi = <B psi, psi>_M / <psi, psi>_M; real for M-self-adjoint B.
// Throws on the zero state or a gram mismatch.
double expectation(const ParticularOperator& b, const Vector& psi);

// psi / ||psi||_M. Throws on the zero state.
Vector normalize(const GramMatrix& gram, const Vector& psi);

// delta_tau <B>_n = (<B>_{n+1} - <B>_n) / tau.
std::vector<double> energy_variation(const ExpectationSeries& series, double tau);

// <B>_n along the orbit psi_n = U^n psi0 of the group.
ExpectationSeries track_expectation(const ParticularOperator& b,
                                    const DiscreteGroup& group, const Vector& psi0,
                                    int n_steps);

struct ConstantOfMotionReport {
  double commutator_residual = 0.0;   // ||[A, H]||_M
  double commutator_tolerance = 0.0;  // 1e-11 ||A||_M ||H||_M
  bool compatible = false;
  std::optional<double> max_drift;    // max_n |<A>_n - <A>_0|; set when compatible
  double drift_tolerance = 0.0;       // 1e-9 (1 + |<A>_0|)
  bool constant = false;
};

// Checks (a) the discrete commutator [A, H] vanishes and, only then,
// (b) <A>_n stays at <A>_0 along the propagated orbit. Reports, never throws
// on a negative outcome.
ConstantOfMotionReport verify_constant_of_motion(const ParticularOperator& a,
                                                 const ParticularOperator& h,
                                                 const DiscreteGroup& group,
                                                 const Vector& psi0, int n_steps);

// CSV with header "n,value".
void write_series_csv(std::ostream& out, const ExpectationSeries& series);

}  // namespace unigroup
