#include "unigroup/duhamel.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "unigroup/matrix_io.hpp"

namespace unigroup {

NonlinearTerm zero_term() {
  NonlinearTerm t;
  t.eval = [](const Vector& psi) { return Vector(Vector::Zero(psi.size())); };
  t.lipschitz_c = 0.0;
  t.sup_bound = 0.0;
  return t;
}

NonlinearTerm linear_term(const ParticularOperator& op, double lipschitz) {
  NonlinearTerm t;
  t.eval = [m = op.matrix](const Vector& psi) { return Vector(m * psi); };
  t.lipschitz_c = lipschitz;
  t.sup_bound = std::numeric_limits<double>::infinity();
  return t;
}

NonlinearTerm power_law_term(const GramMatrix& gram, cplx alpha, int n, double r) {
  if (n < 1) throw std::invalid_argument("power_law_term: exponent n >= 1");
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("power_law_term: finite positive ball radius");
  }
  NonlinearTerm t;
  t.eval = [alpha, n](const Vector& psi) {
    Vector out(psi.size());
    for (Index i = 0; i < psi.size(); ++i) {
      out[i] = alpha * std::pow(std::abs(psi[i]), n) * psi[i];
    }
    return out;
  };
  const double embed = gram.max_inverse_embedding();
  const double kappa_w = std::sqrt(gram.eigen_ceiling() / gram.eigen_floor());
  const double nodal_radius = embed * r;
  t.ball_radius = r;
  t.lipschitz_c = 2.0 * std::abs(alpha) * n * kappa_w * std::pow(nodal_radius, n);
  t.sup_bound = std::abs(alpha) * kappa_w * std::pow(nodal_radius, n) * r;
  return t;
}

QuadratureRule QuadratureRule::trapezoid(int substeps, double window) {
  if (substeps < 1) throw std::invalid_argument("quadrature: substeps >= 1");
  if (!(window > 0.0)) throw std::invalid_argument("quadrature: window > 0");
  QuadratureRule r;
  r.kind = Kind::trapezoid;
  r.substeps = substeps;
  r.window = window;
  r.exactness_degree = 1;
  const double d = window / substeps;
  r.weights = RealVector::Constant(substeps + 1, d);
  r.weights[0] = 0.5 * d;
  r.weights[substeps] = 0.5 * d;
  return r;
}

QuadratureRule QuadratureRule::simpson(int substeps, double window) {
  if (substeps < 2 || substeps % 2 != 0) {
    throw std::invalid_argument("simpson quadrature needs an even substep count");
  }
  if (!(window > 0.0)) throw std::invalid_argument("quadrature: window > 0");
  QuadratureRule r;
  r.kind = Kind::simpson;
  r.substeps = substeps;
  r.window = window;
  r.exactness_degree = 3;
  const double d = window / substeps;
  r.weights = RealVector::Zero(substeps + 1);
  for (int j = 0; j <= substeps; ++j) {
    double c = (j == 0 || j == substeps) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    r.weights[j] = c * d / 3.0;
  }
  return r;
}

namespace {

void check_window_setup(const DiscreteGroup& group, const QuadratureRule& rule) {
  if (group.direction() != Direction::forward) {
    throw std::invalid_argument("duhamel: forward group required");
  }
  const double expected = rule.substep();
  const double actual = group.propagator().tau();
  if (std::abs(actual - expected) > 1e-12 * std::max(actual, expected)) {
    throw std::invalid_argument(
        "duhamel: group step must equal the quadrature sub-step");
  }
}

// Integrand samples -i V(Phi^j): the integrating-factor form of
// i Psi' = H0 Psi + V(Psi) is Psi(t) = e^{-itH0} Psi0
// - i int_0^t e^{i(s-t)H0} V(Psi(s)) ds.
std::vector<Vector> evaluate_term(const NonlinearTerm& v, const GramMatrix& gram,
                                  const Trajectory& phi) {
  std::vector<Vector> values;
  values.reserve(phi.size());
  for (size_t j = 0; j < phi.size(); ++j) {
    if (gram.norm(phi[j]) > v.ball_radius * (1.0 + 1e-12)) {
      throw ball_exit_error("duhamel: iterate left Lipschitz ball at sample " +
                            std::to_string(j));
    }
    Vector value = v.eval(phi[j]);
    if (!value.allFinite()) {
      throw std::runtime_error("duhamel: non-finite nonlinear term output");
    }
    values.push_back(cplx(0.0, -1.0) * value);
  }
  return values;
}

}  // namespace

Trajectory duhamel_step(const DiscreteGroup& group, const QuadratureRule& rule,
                        const NonlinearTerm& v, const Vector& psi0,
                        const Trajectory& phi) {
  check_window_setup(group, rule);
  const int k = rule.substeps;
  if (static_cast<int>(phi.size()) != k + 1) {
    throw std::invalid_argument("duhamel: trajectory must have substeps+1 samples");
  }
  const double contraction = v.lipschitz_c * rule.window;
  if (contraction >= 1.0) {
    throw contraction_error("duhamel: c_V * tau = " + std::to_string(contraction) +
                            " >= 1 violates the contraction restriction");
  }

  const PadePropagator& prop = group.propagator();
  const auto values = evaluate_term(v, prop.gram(), phi);
  const double d = rule.substep();

  Trajectory out(static_cast<size_t>(k) + 1);
  out[0] = psi0;
  Vector state = psi0;

  if (rule.kind == QuadratureRule::Kind::trapezoid) {
    Vector integral = Vector::Zero(psi0.size());
    for (int i = 0; i < k; ++i) {
      state = prop.step(state);
      integral = prop.step((integral + 0.5 * d * values[static_cast<size_t>(i)]).eval());
      integral += 0.5 * d * values[static_cast<size_t>(i + 1)];
      out[static_cast<size_t>(i + 1)] = state + integral;
    }
    return out;
  }

  // Composite Simpson: the even samples carry the pure Simpson prefix; odd
  // samples extend the last even prefix with one trapezoid interval.
  Vector simpson_prefix = Vector::Zero(psi0.size());
  for (int i = 0; i + 2 <= k; i += 2) {
    const Vector uv = prop.step(values[static_cast<size_t>(i)]);
    const Vector aged = prop.step(simpson_prefix);

    state = prop.step(state);
    out[static_cast<size_t>(i + 1)] =
        state + aged + 0.5 * d * (uv + values[static_cast<size_t>(i + 1)]);

    const Vector mid =
        aged + (d / 3.0) * uv + (4.0 * d / 3.0) * values[static_cast<size_t>(i + 1)];
    simpson_prefix = prop.step(mid) + (d / 3.0) * values[static_cast<size_t>(i + 2)];

    state = prop.step(state);
    out[static_cast<size_t>(i + 2)] = state + simpson_prefix;
  }
  return out;
}

PicardResult picard_solve(const DiscreteGroup& group, const QuadratureRule& rule,
                          const NonlinearTerm& v, const Vector& psi0, double tol,
                          int max_iter) {
  check_window_setup(group, rule);
  if (!(tol > 0.0)) throw std::invalid_argument("picard_solve: tol > 0");
  if (max_iter < 1) throw std::invalid_argument("picard_solve: max_iter >= 1");
  const double contraction = v.lipschitz_c * rule.window;
  if (contraction >= 1.0) {
    throw contraction_error("picard_solve: c_V * tau = " +
                            std::to_string(contraction) + " >= 1");
  }

  const GramMatrix& gram = group.propagator().gram();
  const auto sup_distance = [&](const Trajectory& a, const Trajectory& b) {
    double m = 0.0;
    for (size_t j = 0; j < a.size(); ++j) m = std::max(m, gram.norm(a[j] - b[j]));
    return m;
  };

  PicardResult result;
  result.state.contraction_k = contraction;

  Trajectory current(static_cast<size_t>(rule.substeps) + 1, psi0);
  double k_power = 1.0;
  for (int n = 1; n <= max_iter; ++n) {
    Trajectory next = duhamel_step(group, rule, v, psi0, current);
    const double increment = sup_distance(next, current);
    current = std::move(next);

    result.increment_history.push_back(increment);
    result.state.iterate_index = n;
    result.state.last_increment = increment;
    if (n == 1) result.state.delta_first = increment;

    k_power *= contraction;
    result.state.a_posteriori_bound = contraction < 1.0
        ? k_power / (1.0 - contraction) * result.state.delta_first
        : std::numeric_limits<double>::infinity();

    if (result.state.a_posteriori_bound <= tol || increment <= tol) {
      result.state.converged = true;
      break;
    }
  }
  result.trajectory = std::move(current);
  return result;
}

EvolveResult evolve(const DiscreteGroup& group, const QuadratureRule& rule,
                    const NonlinearTerm& v, Vector psi0, int n_windows,
                    double tol, int max_iter,
                    const std::function<void(const WindowRecord&)>& sink) {
  if (n_windows < 0) throw std::invalid_argument("evolve: n_windows >= 0");
  const GramMatrix& gram = group.propagator().gram();

  EvolveResult result;
  result.endpoints.reserve(static_cast<size_t>(n_windows));
  for (int w = 0; w < n_windows; ++w) {
    PicardResult picard;
    try {
      picard = picard_solve(group, rule, v, psi0, tol, max_iter);
    } catch (const ball_exit_error& e) {
      throw ball_exit_error("window " + std::to_string(w) + ": " + e.what());
    } catch (const contraction_error& e) {
      throw contraction_error("window " + std::to_string(w) + ": " + e.what());
    }
    if (!picard.state.converged) {
      throw std::runtime_error(
          "window " + std::to_string(w) +
          ": picard iteration did not converge within max_iter (bound " +
          std::to_string(picard.state.a_posteriori_bound) + " > tol); the " +
          "Lipschitz constant is likely mis-estimated");
    }
    psi0 = picard.trajectory.back();

    WindowRecord rec;
    rec.window = w;
    rec.contraction_k = picard.state.contraction_k;
    rec.iterations = picard.state.iterate_index;
    rec.bound = picard.state.a_posteriori_bound;
    rec.state_norm = gram.norm(psi0);
    if (sink) sink(rec);
    result.records.push_back(rec);
    result.endpoints.push_back(psi0);
  }
  return result;
}

void write_window_csv_header(std::ostream& out) {
  out << "window,K,iterations,bound,m_norm\n";
}

void write_window_csv_row(std::ostream& out, const WindowRecord& rec) {
  out << rec.window << ',' << format_double(rec.contraction_k) << ','
      << rec.iterations << ',' << format_double(rec.bound) << ','
      << format_double(rec.state_norm) << '\n';
}

}  // namespace unigroup
