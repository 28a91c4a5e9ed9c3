#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <vector>

#include "unigroup/propagator.hpp"

namespace unigroup {

class contraction_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when an iterate leaves the Lipschitz ball of the nonlinear term.
class ball_exit_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Nonlinear (or linear) potential term V applied in coefficient space,
// together with the Lipschitz data that drives the contraction machinery:
// ||V(u) - V(v)||_M <= lipschitz_c ||u - v||_M on the ball of radius
// ball_radius, and sup_bound >= sup ||V(x)||_M over that ball.
struct NonlinearTerm {
  std::function<Vector(const Vector&)> eval;
  double lipschitz_c = 0.0;
  double ball_radius = std::numeric_limits<double>::infinity();
  double sup_bound = 0.0;
};

NonlinearTerm zero_term();

// V(psi) = matrix * psi with a caller-supplied M-Lipschitz constant (for a
// linear map that is its M-operator norm).
NonlinearTerm linear_term(const ParticularOperator& op, double lipschitz);

// Nodal power nonlinearity V(psi)_k = alpha |psi_k|^n psi_k on the M-ball of
// radius r. The Lipschitz constant instantiates c_V = 2 |alpha| C_n r^n with
// C_n = n * kappa(W) * embed^n, where embed = max_i sqrt((M^{-1})_ii) bounds
// nodal values by the M-norm and kappa(W) converts the pointwise estimate
// into an M-norm one. sup_bound = |alpha| kappa(W) (embed r)^n r.
NonlinearTerm power_law_term(const GramMatrix& gram, cplx alpha, int n, double r);

// Sub-step lattice quadrature over one window: substeps intervals, weights
// w_j for j = 0..substeps with sum w_j = window.
struct QuadratureRule {
  enum class Kind { trapezoid, simpson };

  Kind kind = Kind::trapezoid;
  int substeps = 1;
  double window = 0.0;         // tau
  RealVector weights;
  int exactness_degree = 1;

  double substep() const { return window / substeps; }

  static QuadratureRule trapezoid(int substeps, double window);
  // Composite Simpson; substeps must be even.
  static QuadratureRule simpson(int substeps, double window);
};

// Trajectory over one window: substeps+1 coefficient vectors at times
// j * window / substeps.
using Trajectory = std::vector<Vector>;

// One application of the discrete integrating-factor map,
//   S_k(Phi)(endpoint) = U^k psi0 + sum_j w_j U^{k-j} V(Phi^j),
// with intermediate samples given by the matching composite partial sums.
// The group must step at the sub-step size window/substeps.
Trajectory duhamel_step(const DiscreteGroup& group, const QuadratureRule& rule,
                        const NonlinearTerm& v, const Vector& psi0,
                        const Trajectory& phi);

struct PicardState {
  int iterate_index = 0;        // n: iterations performed
  double delta_first = 0.0;     // sup_t ||Psi_1 - Psi_0||_M
  double contraction_k = 0.0;   // K = c_V * tau
  double a_posteriori_bound = 0.0;  // K^n (1-K)^{-1} delta_first
  double last_increment = 0.0;
  bool converged = false;
};

struct PicardResult {
  Trajectory trajectory;
  PicardState state;
  std::vector<double> increment_history;  // sup-norm successive differences
};

// Successive approximations from the constant trajectory at psi0. Stops when
// the a-priori remaining-error bound or the successive difference drops
// below tol. A max_iter exhaustion is reported, not thrown.
PicardResult picard_solve(const DiscreteGroup& group, const QuadratureRule& rule,
                          const NonlinearTerm& v, const Vector& psi0, double tol,
                          int max_iter);

struct WindowRecord {
  int window = 0;
  double contraction_k = 0.0;
  int iterations = 0;
  double bound = 0.0;
  double state_norm = 0.0;
};

struct EvolveResult {
  std::vector<Vector> endpoints;      // one per window
  std::vector<WindowRecord> records;
};

// Chains picard_solve over n_windows intervals, re-basing the initial state
// at each window end. Per-window diagnostics are streamed through sink (when
// set) and returned. Errors carry the failing window index.
EvolveResult evolve(const DiscreteGroup& group, const QuadratureRule& rule,
                    const NonlinearTerm& v, Vector psi0, int n_windows,
                    double tol, int max_iter = 200,
                    const std::function<void(const WindowRecord&)>& sink = {});

void write_window_csv_header(std::ostream& out);
void write_window_csv_row(std::ostream& out, const WindowRecord& rec);

}  // namespace unigroup
