#include "unigroup/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include "setup_util.hpp"
#include "unigroup/duhamel.hpp"
#include "unigroup/experiment.hpp"
#include "unigroup/matrix_io.hpp"
#include "unigroup/observables.hpp"

namespace unigroup::acceptance {

namespace {

using detail::OscillatorSetup;
using detail::operator_scale_norm;
using detail::random_state;
using std::numbers::pi;

std::string fmt(double v) { return format_double(v); }

// Accumulates sub-checks for one criterion.
class Gate {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed_ = false;
      if (!failures_.empty()) failures_ += "; ";
      failures_ += what;
    }
  }
  void detail(const std::string& text) { detail_ = text; }
  bool passed() const { return passed_; }
  std::string message() const {
    if (passed_) return detail_;
    return detail_.empty() ? failures_ : detail_ + "; " + failures_;
  }

 private:
  bool passed_ = true;
  std::string detail_;
  std::string failures_;
};

// 1. Mass matrices are SPD with exact symmetry on every required grid.
void criterion_mass_spd(Gate& gate) {
  double worst_floor = std::numeric_limits<double>::infinity();
  for (int m = 0; m <= 4; ++m) {
    const GramMatrix gram = assemble_mass(NodalBasis(build_grid(Domain::interval(1.0), m)));
    gate.require(gram.eigen_floor() > 0.0, "1d level " + std::to_string(m) + " not SPD");
    gate.require((gram.mass() - gram.mass().transpose()).cwiseAbs().maxCoeff() == 0.0,
                 "1d level " + std::to_string(m) + " not symmetric");
    worst_floor = std::min(worst_floor, gram.eigen_floor());
  }
  for (int m = 0; m <= 3; ++m) {
    const GramMatrix gram = assemble_mass(NodalBasis(build_grid(Domain::box(1.0, 1.0), m)));
    gate.require(gram.eigen_floor() > 0.0, "2d level " + std::to_string(m) + " not SPD");
    gate.require((gram.mass() - gram.mass().transpose()).cwiseAbs().maxCoeff() == 0.0,
                 "2d level " + std::to_string(m) + " not symmetric");
    worst_floor = std::min(worst_floor, gram.eigen_floor());
  }
  gate.detail("smallest eigenvalue across grids " + fmt(worst_floor));
}

// 2. M-unitarity of the Pade group over 1000 steps.
void criterion_unitarity(Gate& gate) {
  double worst = 0.0;

  const GramMatrix random_gram(detail::random_spd(64, 91));
  const ParticularOperator random_h = detail::random_m_self_adjoint(random_gram, 92);
  const double random_norm = PadePropagator::build(random_h, 1.0, 1).h_tau();
  for (int p : {1, 2, 3}) {
    const PadePropagator prop = PadePropagator::build(random_h, 0.3 / random_norm, p);
    Vector psi = normalize(random_gram, random_state(64, 93u + static_cast<unsigned>(p)));
    double drift = 0.0;
    for (int k = 0; k < 1000; ++k) {
      psi = prop.step(psi);
      drift = std::max(drift, std::abs(random_gram.norm(psi) - 1.0));
    }
    worst = std::max(worst, drift);
    gate.require(drift <= 1e-10,
                 "random Hermitian p=" + std::to_string(p) + " drift " + fmt(drift));
  }

  const OscillatorSetup setup(Domain::box(1.0, 1.0), 2);
  for (int p : {1, 2, 3}) {
    const PadePropagator prop = PadePropagator::build(setup.hamiltonian, 1e-3, p);
    Vector psi = normalize(setup.gram, random_state(setup.gram.size(), 60u + static_cast<unsigned>(p)));
    double drift = 0.0;
    for (int k = 0; k < 1000; ++k) {
      psi = prop.step(psi);
      drift = std::max(drift, std::abs(setup.gram.norm(psi) - 1.0));
    }
    worst = std::max(worst, drift);
    gate.require(drift <= 1e-10,
                 "assembled H1 p=" + std::to_string(p) + " drift " + fmt(drift));
  }
  gate.detail("max relative norm drift over 1000 steps " + fmt(worst));
}

// 3. Discrete time reversal.
void criterion_time_reversal(Gate& gate) {
  const OscillatorSetup setup(Domain::box(1.0, 1.0), 1);
  const DiscreteGroup group = DiscreteGroup::forward(setup.hamiltonian, 2e-3, 1);
  const DiscreteGroup reverse = group.reversed();
  const Vector psi = normalize(setup.gram, random_state(setup.gram.size(), 17));
  double worst_scaled = 0.0;
  for (long k : {1L, 16L, 64L, 256L}) {
    const Vector round_trip = reverse.apply(k, group.apply(k, psi));
    const double err = setup.gram.norm(round_trip - psi);
    worst_scaled = std::max(worst_scaled, err / static_cast<double>(k));
    gate.require(err <= 1e-10 * static_cast<double>(k),
                 "k=" + std::to_string(k) + " reversal error " + fmt(err));
  }
  gate.detail("max reversal error per step " + fmt(worst_scaled));
}

// 4. Single-step order h_tau^{2p+1}.
void criterion_single_step_order(Gate& gate) {
  const OscillatorSetup setup(Domain::box(1.0, 1.0), 2);  // N = 225
  const double norm_h = operator_scale_norm(setup);
  std::string details;
  for (int p : {1, 2}) {
    std::vector<double> h_taus, errors;
    double tau = 0.5 / norm_h;
    for (int j = 0; j < 5; ++j) {
      const PadePropagator prop = PadePropagator::build(setup.hamiltonian, tau, p);
      const StepError e = single_step_error(
          prop, hermitian_expm(setup.gram, setup.hamiltonian.matrix, tau));
      gate.require(e.measured <= e.bound,
                   "p=" + std::to_string(p) + " error " + fmt(e.measured) +
                       " above bound " + fmt(e.bound));
      h_taus.push_back(prop.h_tau());
      errors.push_back(e.measured);
      tau *= 0.5;
    }
    const double slope = loglog_slope(h_taus, errors);
    const double expected = 2.0 * p + 1.0;
    gate.require(std::abs(slope - expected) <= 0.2,
                 "p=" + std::to_string(p) + " slope " + fmt(slope));
    if (!details.empty()) details += ", ";
    details += "p=" + std::to_string(p) + " slope " + fmt(slope);
  }
  gate.detail(details);
}

// 5. Multi-step bound and global order.
void criterion_multi_step(Gate& gate) {
  const OscillatorSetup setup(Domain::interval(1.0), 2);
  const double norm_h = operator_scale_norm(setup);
  for (int p : {1, 2}) {
    for (double h_tau : {0.25, 0.5}) {
      const double tau = h_tau / norm_h;
      const PadePropagator prop = PadePropagator::build(setup.hamiltonian, tau, p);
      for (int m = 1; m <= 32; m *= 2) {
        const StepError e = multi_step_error(
            prop, m, hermitian_expm(setup.gram, setup.hamiltonian.matrix, m * tau));
        gate.require(e.measured <= e.bound,
                     "p=" + std::to_string(p) + " m=" + std::to_string(m) +
                         " h_tau=" + fmt(h_tau) + ": " + fmt(e.measured) + " > " +
                         fmt(e.bound));
      }
    }
  }

  std::string details;
  for (int p : {1, 2}) {
    const double final_time = 6.0 / norm_h;
    std::vector<double> taus, errors;
    for (int m : {8, 16, 32, 64}) {
      const double tau = final_time / m;
      const PadePropagator prop = PadePropagator::build(setup.hamiltonian, tau, p);
      errors.push_back(
          multi_step_error(prop, m,
                           hermitian_expm(setup.gram, setup.hamiltonian.matrix, final_time))
              .measured);
      taus.push_back(tau);
    }
    const double slope = loglog_slope(taus, errors);
    gate.require(std::abs(slope - 2.0 * p) <= 0.2,
                 "p=" + std::to_string(p) + " global slope " + fmt(slope));
    if (!details.empty()) details += ", ";
    details += "p=" + std::to_string(p) + " global slope " + fmt(slope);
  }
  gate.detail(details);
}

// 6. Spatial order nu_m = 2: projection and solution sweeps.
void criterion_spatial_order(Gate& gate) {
  std::string details;

  const OrderFit fit_1d = measure_approximation_order(
      Domain::interval(1.0), 4, [](Point q) { return cplx(std::sin(pi * q.x), 0.0); });
  gate.require(fit_1d.slope >= 1.8 && fit_1d.slope <= 2.2,
               "1d projection slope " + fmt(fit_1d.slope));
  const OrderFit fit_2d = measure_approximation_order(
      Domain::box(1.0, 1.0), 3,
      [](Point q) { return cplx(std::sin(pi * q.x) * std::sin(pi * q.y), 0.0); });
  gate.require(fit_2d.slope >= 1.8 && fit_2d.slope <= 2.2,
               "2d projection slope " + fmt(fit_2d.slope));
  details += "projection " + fmt(fit_1d.slope) + " / " + fmt(fit_2d.slope);

  const auto solution_sweep = [&](const Domain& dom, int m_max) {
    const bool two_d = dom.dim == 2;
    const double final_time = 0.02;
    const double lam1 = pi * pi * (two_d ? 2.0 : 1.0);
    const double lam2 = pi * pi * (two_d ? 5.0 : 4.0);
    const auto mode = [=](Point q, int k) {
      double v = std::sin(k * pi * q.x);
      if (two_d) v *= std::sin(pi * q.y);
      return v;
    };
    std::vector<double> hs, errs;
    for (int m = 0; m <= m_max; ++m) {
      ProjectionPair pair(build_grid(dom, m));
      const GramMatrix gram = assemble_mass(pair.basis());
      const ParticularOperator h0 = assemble_kinetic(pair.basis(), gram).assembled;
      const Vector c0 = pair.decompose(
          [&](Point q) { return cplx(mode(q, 1) + 0.5 * mode(q, 2), 0.0); });
      const Vector ct = hermitian_expm(gram, h0.matrix, final_time) * c0;
      const ScalarField exact = [=](Point q) {
        return std::exp(cplx(0.0, -lam1 * final_time)) * mode(q, 1) +
               0.5 * std::exp(cplx(0.0, -lam2 * final_time)) * mode(q, 2);
      };
      errs.push_back(quadrature_l2_distance(pair.grid(), pair.summate(ct), exact));
      hs.push_back(pair.grid().h());
    }
    return loglog_slope(hs, errs);
  };

  const double sol_1d = solution_sweep(Domain::interval(1.0), 4);
  gate.require(sol_1d >= 1.8 && sol_1d <= 2.2, "1d solution slope " + fmt(sol_1d));
  const double sol_2d = solution_sweep(Domain::box(1.0, 1.0), 3);
  gate.require(sol_2d >= 1.8 && sol_2d <= 2.2, "2d solution slope " + fmt(sol_2d));
  gate.detail(details + ", solution " + fmt(sol_1d) + " / " + fmt(sol_2d));
}

// 7. Composite estimate: plateaus of the (h, tau) error matrix plus the
// tau^{2p+1} single-window levels.
void criterion_composite(Gate& gate) {
  const Domain dom = Domain::interval(1.0);
  const int m_lo = 1;
  const int m_hi = 3;
  const int m_ref = 4;
  const double tau0 = 4e-3;
  const double final_time = 4.0 * tau0;
  const int halvings = 4;

  const OscillatorSetup ref(dom, m_ref);
  InitialState initial;  // gaussian bump
  const Vector ref0 = build_initial_state(initial, ref.pair, ref.gram);
  const Vector ref_t = hermitian_expm(ref.gram, ref.hamiltonian.matrix, final_time) * ref0;
  const ScalarField ref_field = ref.pair.summate(ref_t);

  std::vector<std::vector<double>> table;
  for (int m = m_lo; m <= m_hi; ++m) {
    const OscillatorSetup coarse(dom, m);
    const Vector c0 = build_initial_state(initial, coarse.pair, coarse.gram);
    const Vector ref_on_coarse = coarse.pair.decompose(ref_field);
    std::vector<double> row;
    for (int j = 0; j <= halvings; ++j) {
      const DiscreteGroup group =
          DiscreteGroup::forward(coarse.hamiltonian, tau0 / (1 << j), 1);
      row.push_back(coarse.gram.norm(group.apply(4L << j, c0) - ref_on_coarse));
    }
    table.push_back(row);
  }

  // plateau under tau refinement at fixed h
  for (size_t i = 0; i < table.size(); ++i) {
    const double ratio = table[i][table[i].size() - 2] / table[i].back();
    gate.require(ratio <= 1.5, "row m=" + std::to_string(m_lo + (int)i) +
                                   " no tau plateau (ratio " + fmt(ratio) + ")");
  }
  // plateau levels ordered by h^2 within a factor of 2
  std::string details;
  for (size_t i = 0; i + 1 < table.size(); ++i) {
    const double ratio = table[i].back() / table[i + 1].back();
    gate.require(ratio >= 2.0 && ratio <= 8.0,
                 "spatial plateau ratio " + fmt(ratio) + " outside [2, 8]");
    if (!details.empty()) details += ", ";
    details += "h-plateau ratio " + fmt(ratio);
  }
  // under h refinement at the coarsest tau the temporal floor appears: the
  // finest row stops improving (here it sits above the next-coarser row)
  const double floor_ratio = table.back().front() / table[table.size() - 2].front();
  gate.require(floor_ratio >= 0.45,
               "no temporal floor under h refinement (ratio " + fmt(floor_ratio) + ")");

  // tau^{2p+1} ordering of single-window errors on the finest sweep grid
  const OscillatorSetup fine(dom, m_hi);
  const double norm_h = operator_scale_norm(fine);
  std::vector<double> errors;
  double tau = 0.5 / norm_h;
  for (int j = 0; j < 4; ++j) {
    const PadePropagator prop = PadePropagator::build(fine.hamiltonian, tau, 1);
    errors.push_back(
        single_step_error(prop, hermitian_expm(fine.gram, fine.hamiltonian.matrix, tau))
            .measured);
    tau *= 0.5;
  }
  for (size_t j = 0; j + 1 < errors.size(); ++j) {
    const double ratio = errors[j] / errors[j + 1];
    gate.require(ratio >= 4.0 && ratio <= 16.0,
                 "temporal level ratio " + fmt(ratio) + " outside [4, 16]");
  }
  details += ", tau-level ratio " + fmt(errors[0] / errors[1]) +
             ", temporal floor ratio " + fmt(floor_ratio);
  gate.detail(details);
}

// 8. Discrete energy conservation on the oscillator run.
void criterion_energy_conservation(Gate& gate) {
  const OscillatorSetup setup(Domain::box(1.0, 1.0), 2);
  const DiscreteGroup group = DiscreteGroup::forward(setup.hamiltonian, 1e-3, 1);
  InitialState initial;
  const Vector psi0 = build_initial_state(initial, setup.pair, setup.gram);
  const ExpectationSeries series = track_expectation(setup.hamiltonian, group, psi0, 200);
  double drift = 0.0;
  for (double v : series.values) {
    drift = std::max(drift, std::abs(v - series.values[0]) / std::abs(series.values[0]));
  }
  gate.require(drift <= 1e-10, "energy drift " + fmt(drift));
  gate.detail("relative energy drift over 200 steps " + fmt(drift));
}

// 9. Commutators of compatible pairs vanish; a negative control does not.
void criterion_commutators(Gate& gate) {
  const OscillatorSetup setup(Domain::interval(1.0), 2);
  const Matrix& h = setup.hamiltonian.matrix;
  const double norm_h = setup.gram.operator_norm(h);
  const Index n = setup.gram.size();

  const std::vector<std::pair<std::string, Matrix>> polys = {
      {"2H + 1", (2.0 * h + Matrix::Identity(n, n)).eval()},
      {"H^2", (h * h).eval()},
      {"H^3 - H", (h * h * h - h).eval()},
  };
  for (const auto& [name, q] : polys) {
    const double residual = setup.gram.operator_norm((h * q - q * h).eval());
    const double tol = 1e-11 * norm_h * setup.gram.operator_norm(q);
    gate.require(residual <= tol,
                 "[H, " + name + "] residual " + fmt(residual) + " > " + fmt(tol));
  }

  const ParticularOperator x_mult = assemble_potential(
      setup.pair.basis(), setup.gram, [](Point q) { return q.x; });
  const double control = setup.gram.operator_norm(
      (h * x_mult.matrix - x_mult.matrix * h).eval());
  const double control_tol = 1e-11 * norm_h * setup.gram.operator_norm(x_mult.matrix);
  gate.require(control >= 1e6 * control_tol,
               "negative control only " + fmt(control / control_tol) + "x threshold");
  gate.detail("negative control exceeds the threshold by " +
              fmt(control / control_tol) + "x");
}

// 10. Picard contraction on the nonlinear desk run.
void criterion_picard(Gate& gate) {
  const OscillatorSetup setup(Domain::box(1.0, 1.0), 2);
  const GramMatrix& gram = setup.gram;
  InitialState initial;
  const Vector psi0 = build_initial_state(initial, setup.pair, gram);

  const double radius = 2.0 * gram.norm(psi0);
  const NonlinearTerm v = power_law_term(gram, cplx(-1.0, 0.0), 2, radius);
  const double tau = 0.32 / v.lipschitz_c;
  const double contraction = v.lipschitz_c * tau;
  gate.require(contraction < 1.0, "K >= 1");

  const QuadratureRule rule = QuadratureRule::trapezoid(8, tau);
  const DiscreteGroup group =
      DiscreteGroup::forward(setup.kinetic.assembled, rule.substep(), 1);

  Vector psi = psi0;
  double worst_ratio = 0.0;
  for (int w = 0; w < 8; ++w) {
    const PicardResult loose = picard_solve(group, rule, v, psi, 1e-10, 400);
    const PicardResult shadow = picard_solve(group, rule, v, psi, 1e-12, 600);
    gate.require(loose.state.converged && shadow.state.converged,
                 "window " + std::to_string(w) + " did not converge");
    for (size_t i = 1; i < loose.increment_history.size(); ++i) {
      const double ratio = loose.increment_history[i] / loose.increment_history[i - 1];
      worst_ratio = std::max(worst_ratio, ratio);
      gate.require(ratio <= contraction * (1.0 + 1e-9),
                   "window " + std::to_string(w) + " ratio " + fmt(ratio) + " > K");
    }
    const double oracle = gram.norm(loose.trajectory.back() - shadow.trajectory.back());
    gate.require(oracle <= loose.state.a_posteriori_bound,
                 "window " + std::to_string(w) + " oracle " + fmt(oracle) +
                     " above bound " + fmt(loose.state.a_posteriori_bound));
    psi = loose.trajectory.back();
  }
  gate.detail("K = " + fmt(contraction) + ", worst iterate ratio " + fmt(worst_ratio));
}

// 11. M-adjoint identities on random matrices.
void criterion_adjoint_identities(Gate& gate) {
  const GramMatrix gram(detail::random_spd(48, 7));
  const Index n = gram.size();
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Matrix a = detail::random_complex(n, 1000u + static_cast<unsigned>(t));
    const Matrix a_dag = gram.adjoint(a);

    const Vector u = random_state(n, 2000u + static_cast<unsigned>(t));
    const Vector w = random_state(n, 3000u + static_cast<unsigned>(t));
    const double scale = gram.operator_norm(a) * gram.norm(u) * gram.norm(w);
    const double pairing =
        std::abs(gram.inner((a * u).eval(), w) - gram.inner(u, (a_dag * w).eval()));
    gate.require(pairing <= 1e-11 * scale, "pairing residual " + fmt(pairing / scale));
    worst = std::max(worst, pairing / scale);

    const double involution = (gram.adjoint(a_dag) - a).cwiseAbs().maxCoeff() /
                              a.cwiseAbs().maxCoeff();
    gate.require(involution <= 1e-11, "involution residual " + fmt(involution));
    worst = std::max(worst, involution);

    const Matrix b = detail::random_complex(n, 4000u + static_cast<unsigned>(t));
    const Matrix lhs = gram.adjoint((a * b).eval());
    const Matrix rhs = gram.adjoint(b) * gram.adjoint(a);
    const double anti = (lhs - rhs).cwiseAbs().maxCoeff() / lhs.cwiseAbs().maxCoeff();
    gate.require(anti <= 1e-11, "anti-homomorphism residual " + fmt(anti));
    worst = std::max(worst, anti);
  }
  gate.detail("worst relative residual " + fmt(worst));
}

}  // namespace

void print_line(std::ostream& out, const CriterionResult& r) {
  out << (r.passed ? "PASS" : "FAIL") << " criterion " << r.index << " [" << r.name
      << "] (" << fmt(r.seconds) << " s)";
  if (!r.detail.empty()) out << ": " << r.detail;
  out << '\n';
}

std::vector<CriterionResult> run_all(std::ostream* progress) {
  const std::vector<std::pair<std::string, std::function<void(Gate&)>>> criteria = {
      {"mass-matrix-spd", criterion_mass_spd},
      {"pade-m-unitarity", criterion_unitarity},
      {"time-reversal", criterion_time_reversal},
      {"single-step-order", criterion_single_step_order},
      {"multi-step-bound", criterion_multi_step},
      {"spatial-order", criterion_spatial_order},
      {"composite-estimate", criterion_composite},
      {"energy-conservation", criterion_energy_conservation},
      {"commutator-preservation", criterion_commutators},
      {"picard-contraction", criterion_picard},
      {"m-adjoint-identities", criterion_adjoint_identities},
  };

  std::vector<CriterionResult> results;
  results.reserve(criteria.size());
  for (size_t i = 0; i < criteria.size(); ++i) {
    CriterionResult r;
    r.index = static_cast<int>(i) + 1;
    r.name = criteria[i].first;
    const auto start = std::chrono::steady_clock::now();
    Gate gate;
    try {
      criteria[i].second(gate);
      r.passed = gate.passed();
      r.detail = gate.message();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (progress) print_line(*progress, r);
    results.push_back(std::move(r));
  }
  return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  for (const auto& r : results) {
    if (!r.passed) return false;
  }
  return true;
}

}  // namespace unigroup::acceptance
