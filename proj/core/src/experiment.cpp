#include "unigroup/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "setup_util.hpp"
#include "unigroup/matrix_io.hpp"

namespace unigroup {

namespace {

using detail::OscillatorSetup;
using detail::operator_scale_norm;
using detail::random_state;
using std::numbers::pi;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad number '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad integer '" + value + "'");
  }
}

std::ofstream open_csv(const std::filesystem::path& path, const std::string& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << header << '\n';
  return out;
}

// Collects PASS/FAIL lines for summary.txt and the experiment result.
class Checks {
 public:
  void pass(const std::string& what) { lines_.push_back("PASS " + what); }
  void fail(const std::string& what) {
    lines_.push_back("FAIL " + what);
    ok_ = false;
  }
  void check(bool condition, const std::string& what) {
    condition ? pass(what) : fail(what);
  }
  void note(const std::string& what) { lines_.push_back("note " + what); }
  bool ok() const { return ok_; }
  const std::vector<std::string>& lines() const { return lines_; }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    for (const auto& line : lines_) out << line << '\n';
    out << (ok_ ? "RESULT PASS" : "RESULT FAIL") << '\n';
  }

 private:
  std::vector<std::string> lines_;
  bool ok_ = true;
};

std::string fmt(double v) { return format_double(v); }

ExperimentResult finish(const ExperimentConfig& cfg, const Checks& checks,
                        std::chrono::steady_clock::time_point start) {
  checks.write(cfg.output_dir / "summary.txt");
  ExperimentResult result;
  result.name = cfg.name;
  result.kind = cfg.experiment;
  result.passed = checks.ok();
  result.notes = checks.lines();
  result.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::qho2d: return "qho2d";
    case ExperimentKind::nls: return "nls";
    case ExperimentKind::pade_order_sweep: return "pade_order_sweep";
    case ExperimentKind::spatial_order_sweep: return "spatial_order_sweep";
    case ExperimentKind::unitarity_soak: return "unitarity_soak";
    case ExperimentKind::constants_of_motion: return "constants_of_motion";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (ExperimentKind kind :
       {ExperimentKind::qho2d, ExperimentKind::nls, ExperimentKind::pade_order_sweep,
        ExperimentKind::spatial_order_sweep, ExperimentKind::unitarity_soak,
        ExperimentKind::constants_of_motion}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

void ExperimentConfig::validate() const {
  domain.validate();
  if (name.empty()) throw std::invalid_argument("config: empty experiment name");
  if (m < 0 || m_min < 0 || m_max < m_min) {
    throw std::invalid_argument("config: bad grid levels");
  }
  if (p < 1 || p > 6) throw std::invalid_argument("config: p must be in 1..6");
  if (tau < 0.0) throw std::invalid_argument("config: tau must be >= 0");
  if (n_steps < 1 || n_windows < 1 || substeps < 1) {
    throw std::invalid_argument("config: steps/windows/substeps must be positive");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("config: tol must be positive");
  if (experiment == ExperimentKind::nls) {
    if (nonlinear_n < 1) throw std::invalid_argument("config: nonlinear_n >= 1");
    if (!(contraction_target > 0.0) || contraction_target >= 1.0) {
      throw std::invalid_argument("config: contraction target must be in (0, 1)");
    }
  }
  if (initial.kind == InitialState::Kind::eigenmode &&
      (initial.mode_x < 1 || initial.mode_y < 1)) {
    throw std::invalid_argument("config: eigenmode indices must be >= 1");
  }
  if (initial.kind == InitialState::Kind::custom_csv && initial.csv_path.empty()) {
    throw std::invalid_argument("config: custom_csv initial state needs a path");
  }
}

void apply_override(ExperimentConfig& cfg, const std::string& raw_key,
                    const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key.empty() || key[0] == '#') return;

  if (key == "experiment") {
    cfg.experiment = experiment_kind_from_string(value);
  } else if (key == "name") {
    cfg.name = value;
  } else if (key == "dim") {
    cfg.domain.dim = parse_int(key, value);
  } else if (key == "length") {
    const double l = parse_double(key, value);
    cfg.domain.lengths = {l, l};
  } else if (key == "length_x") {
    cfg.domain.lengths[0] = parse_double(key, value);
  } else if (key == "length_y") {
    cfg.domain.lengths[1] = parse_double(key, value);
  } else if (key == "m") {
    cfg.m = parse_int(key, value);
  } else if (key == "m_min") {
    cfg.m_min = parse_int(key, value);
  } else if (key == "m_max") {
    cfg.m_max = parse_int(key, value);
  } else if (key == "p") {
    cfg.p = parse_int(key, value);
  } else if (key == "tau") {
    cfg.tau = value == "auto" ? 0.0 : parse_double(key, value);
  } else if (key == "steps") {
    cfg.n_steps = parse_int(key, value);
  } else if (key == "windows") {
    cfg.n_windows = parse_int(key, value);
  } else if (key == "substeps") {
    cfg.substeps = parse_int(key, value);
  } else if (key == "alpha_re") {
    cfg.alpha = cplx(parse_double(key, value), cfg.alpha.imag());
  } else if (key == "alpha_im") {
    cfg.alpha = cplx(cfg.alpha.real(), parse_double(key, value));
  } else if (key == "nonlinear_n") {
    cfg.nonlinear_n = parse_int(key, value);
  } else if (key == "contraction_target") {
    cfg.contraction_target = parse_double(key, value);
  } else if (key == "tol") {
    cfg.tol = parse_double(key, value);
  } else if (key == "dump_matrices") {
    cfg.dump_matrices = value == "true" || value == "1";
  } else if (key == "out") {
    cfg.output_dir = value;
  } else if (key == "initial") {
    if (value == "gaussian_bump" || value == "gaussian") {
      cfg.initial.kind = InitialState::Kind::gaussian_bump;
    } else if (value.rfind("eigenmode:", 0) == 0) {
      cfg.initial.kind = InitialState::Kind::eigenmode;
      const std::string spec = value.substr(10);
      const auto comma = spec.find(',');
      cfg.initial.mode_x = parse_int(key, spec.substr(0, comma));
      cfg.initial.mode_y =
          comma == std::string::npos ? 1 : parse_int(key, spec.substr(comma + 1));
    } else if (value.rfind("csv:", 0) == 0) {
      cfg.initial.kind = InitialState::Kind::custom_csv;
      cfg.initial.csv_path = value.substr(4);
    } else {
      throw std::invalid_argument("config: unknown initial state '" + value + "'");
    }
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& default_name) {
  ExperimentConfig cfg;
  cfg.name = default_name;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    apply_override(cfg, stripped.substr(0, eq), stripped.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.stem().string());
}

Vector build_initial_state(const InitialState& initial, const ProjectionPair& pair,
                           const GramMatrix& gram) {
  const Grid& grid = pair.grid();
  const Domain& dom = grid.domain();
  switch (initial.kind) {
    case InitialState::Kind::gaussian_bump: {
      const double lx = dom.lengths[0];
      const double ly = dom.lengths[1];
      const double sigma = (dom.dim == 2 ? std::min(lx, ly) : lx) / 8.0;
      const bool two_d = dom.dim == 2;
      const Vector c = pair.decompose([=](Point q) {
        const double dx = q.x - 0.5 * lx;
        const double dy = two_d ? q.y - 0.5 * ly : 0.0;
        return cplx(std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma)), 0.0);
      });
      return normalize(gram, c);
    }
    case InitialState::Kind::eigenmode: {
      const int kx = initial.mode_x;
      const int ky = initial.mode_y;
      const double lx = dom.lengths[0];
      const double ly = dom.lengths[1];
      const bool two_d = dom.dim == 2;
      const Vector c = pair.decompose([=](Point q) {
        double v = std::sin(kx * pi * q.x / lx);
        if (two_d) v *= std::sin(ky * pi * q.y / ly);
        return cplx(v, 0.0);
      });
      return normalize(gram, c);
    }
    case InitialState::Kind::custom_csv: {
      const Vector c = load_vector_csv(initial.csv_path);
      if (c.size() != grid.n_dofs()) {
        throw std::invalid_argument("custom initial state has " +
                                    std::to_string(c.size()) + " entries, grid has " +
                                    std::to_string(grid.n_dofs()));
      }
      if (!c.allFinite()) throw std::invalid_argument("custom initial state not finite");
      if (!(gram.norm(c) > 0.0)) {
        throw std::invalid_argument("custom initial state is zero");
      }
      return c;
    }
  }
  throw std::logic_error("unreachable initial state kind");
}

// ---------------------------------------------------------------------------
// qho2d

ExperimentResult run_qho2d(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.output_dir);
  Checks checks;

  const auto setup = std::make_unique<OscillatorSetup>(cfg.domain, cfg.m);
  checks.check(setup->hamiltonian.hermitian_flag,
               "hamiltonian H1 = H0 + X^2 + Y^2 is M-self-adjoint");

  const Vector psi0 = build_initial_state(cfg.initial, setup->pair, setup->gram);
  const DiscreteGroup group = DiscreteGroup::forward(setup->hamiltonian, cfg.tau, cfg.p);
  checks.note("h_tau = " + fmt(group.propagator().h_tau()) +
              (group.propagator().picard_ok() ? " (Picard regime)" : " (outside Picard regime)"));

  // (i) norm drift and (ii) energy series along the orbit
  {
    auto norm_csv = open_csv(cfg.output_dir / "series_norm.csv", "n,m_norm,drift,bound");
    const double norm0 = setup->gram.norm(psi0);
    ExpectationSeries energy;
    Vector psi = psi0;
    double max_norm_drift = 0.0;
    for (int n = 0; n <= cfg.n_steps; ++n) {
      const double norm_n = setup->gram.norm(psi);
      const double drift = std::abs(norm_n - norm0) / norm0;
      max_norm_drift = std::max(max_norm_drift, drift);
      norm_csv << n << ',' << fmt(norm_n) << ',' << fmt(drift) << ",1e-10\n";
      energy.steps.push_back(n);
      energy.values.push_back(expectation(setup->hamiltonian, psi));
      if (n < cfg.n_steps) psi = group.apply(1, std::move(psi));
    }
    {
      std::ofstream out(cfg.output_dir / "series_energy.csv");
      write_series_csv(out, energy);
    }

    const std::vector<double> variation = energy_variation(energy, cfg.tau);
    auto var_csv = open_csv(cfg.output_dir / "series_energy_variation.csv",
                            "n,delta_tau,bound");
    double max_rel_drift = 0.0;
    const double e0 = std::abs(energy.values[0]);
    for (size_t i = 0; i < variation.size(); ++i) {
      var_csv << i << ',' << fmt(variation[i]) << ',' << fmt(1e-10 * e0 / cfg.tau)
              << '\n';
      max_rel_drift = std::max(max_rel_drift, std::abs(variation[i]) * cfg.tau / e0);
    }
    checks.check(max_norm_drift <= 1e-10,
                 "norm drift over " + std::to_string(cfg.n_steps) +
                     " steps <= 1e-10 (measured " + fmt(max_norm_drift) + ")");
    checks.check(max_rel_drift <= 1e-10,
                 "relative energy drift <= 1e-10 (measured " + fmt(max_rel_drift) + ")");
  }

  if (cfg.dump_matrices) {
    save_matrix_csv(cfg.output_dir / "mass.csv", setup->gram.mass().cast<cplx>());
    save_matrix_binary(cfg.output_dir / "hamiltonian.bin", setup->hamiltonian.matrix);
  }

  // (iii) error table over the (h, tau) matrix against a fine reference.
  // Fixed final time T = 4 * tau0; reference: dense exponential on level
  // m_max, restricted to each coarse grid by nodal interpolation.
  {
    const int m_ref = cfg.m_max;
    const int sweep_lo = cfg.m_min;
    const int sweep_hi = cfg.m_max - 1;
    const int halvings = 4;
    const double tau0 = cfg.tau;
    const double final_time = 4.0 * tau0;

    const auto ref = std::make_unique<OscillatorSetup>(cfg.domain, m_ref);
    const Vector ref0 = build_initial_state(cfg.initial, ref->pair, ref->gram);
    const Vector ref_t =
        hermitian_expm(ref->gram, ref->hamiltonian.matrix, final_time) * ref0;
    const ScalarField ref_field = ref->pair.summate(ref_t);

    auto orders = open_csv(cfg.output_dir / "orders.csv",
                           "level,h,tau,steps,error,spatial_plateau,temporal_bound");

    std::vector<std::vector<double>> table;  // [row: level][col: tau halving]
    for (int m = sweep_lo; m <= sweep_hi; ++m) {
      const auto coarse = std::make_unique<OscillatorSetup>(cfg.domain, m);
      const double coarse_norm = operator_scale_norm(*coarse);
      const Vector c0 = build_initial_state(cfg.initial, coarse->pair, coarse->gram);
      const Vector ref_on_coarse = coarse->pair.decompose(ref_field);
      std::vector<double> row;
      for (int j = 0; j <= halvings; ++j) {
        const double tau = tau0 / (1 << j);
        const long steps = 4L << j;
        const DiscreteGroup g = DiscreteGroup::forward(coarse->hamiltonian, tau, cfg.p);
        const Vector psi_t = g.apply(steps, c0);
        row.push_back(coarse->gram.norm(psi_t - ref_on_coarse));
      }
      table.push_back(row);
      for (int j = 0; j <= halvings; ++j) {
        const double tau = tau0 / (1 << j);
        orders << m << ',' << fmt(coarse->pair.grid().h()) << ',' << fmt(tau) << ','
               << (4L << j) << ',' << fmt(row[static_cast<size_t>(j)]) << ','
               << fmt(row.back()) << ','
               << fmt(multi_step_bound(cfg.p, static_cast<int>(4L << j),
                                       tau * coarse_norm))
               << '\n';
      }
    }

    // tau-refinement plateau per row, then h^2 ordering of the plateaus
    bool plateaus = true;
    for (const auto& row : table) {
      const double ratio = row[row.size() - 2] / row.back();
      if (!(ratio <= 1.5)) plateaus = false;
    }
    checks.check(plateaus, "every fixed-h row plateaus under tau refinement");
    bool spatial_ordered = true;
    for (size_t i = 0; i + 1 < table.size(); ++i) {
      const double ratio = table[i].back() / table[i + 1].back();
      if (!(ratio >= 2.0 && ratio <= 8.0)) spatial_ordered = false;
      checks.note("spatial plateau ratio level " + std::to_string(cfg.m_min + (int)i) +
                  " over " + std::to_string(cfg.m_min + (int)i + 1) + ": " + fmt(ratio));
    }
    checks.check(spatial_ordered,
                 "plateau levels follow the h^2 prediction within a factor of 2");

    // h-refinement at the coarsest tau runs into the temporal floor
    if (table.size() >= 2) {
      const double last = table.back().front();
      const double prev = table[table.size() - 2].front();
      checks.check(last >= 0.45 * prev,
                   "fixed-tau column flattens under h refinement (floor " +
                       fmt(last) + " vs " + fmt(prev) + ")");
    }

    // single-window temporal errors on the finest sweep grid: tau^{2p+1}
    {
      const auto fine = std::make_unique<OscillatorSetup>(cfg.domain, sweep_hi);
      const double norm_h = operator_scale_norm(*fine);
      auto temporal = open_csv(cfg.output_dir / "orders_temporal.csv",
                               "tau,h_tau,error,bound");
      std::vector<double> taus, errors;
      double tau = 0.5 / norm_h;
      for (int j = 0; j < 4; ++j) {
        const PadePropagator prop = PadePropagator::build(fine->hamiltonian, tau, cfg.p);
        const StepError e = single_step_error(
            prop, hermitian_expm(fine->gram, fine->hamiltonian.matrix, tau));
        temporal << fmt(tau) << ',' << fmt(prop.h_tau()) << ',' << fmt(e.measured)
                 << ',' << fmt(e.bound) << '\n';
        taus.push_back(tau);
        errors.push_back(e.measured);
        tau *= 0.5;
      }
      const double slope = loglog_slope(taus, errors);
      const double expected = 2.0 * cfg.p + 1.0;
      checks.check(std::abs(slope - expected) <= 0.2,
                   "single-window temporal order " + fmt(slope) + " within " +
                       fmt(expected) + " +- 0.2");
      bool ordered = true;
      for (size_t j = 0; j + 1 < errors.size(); ++j) {
        const double ratio = errors[j] / errors[j + 1];
        const double predicted = std::pow(2.0, expected);
        if (!(ratio >= 0.5 * predicted && ratio <= 2.0 * predicted)) ordered = false;
      }
      checks.check(ordered, "temporal levels follow the tau^(2p+1) prediction "
                            "within a factor of 2");
    }

    // spatial order from the plateau column
    if (table.size() >= 2) {
      std::vector<double> hs, errs;
      for (size_t i = 0; i < table.size(); ++i) {
        hs.push_back(build_grid(cfg.domain, sweep_lo + static_cast<int>(i)).h());
        errs.push_back(table[i].back());
      }
      const double slope = loglog_slope(hs, errs);
      checks.check(slope >= 1.8 && slope <= 2.2,
                   "solution spatial order " + fmt(slope) + " within [1.8, 2.2]");
    } else {
      checks.note("spatial slope skipped: sweep has a single level");
    }
  }

  return finish(cfg, checks, start);
}

// ---------------------------------------------------------------------------
// nls

ExperimentResult run_nls(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.output_dir);
  Checks checks;

  const auto setup = std::make_unique<OscillatorSetup>(cfg.domain, cfg.m);
  const GramMatrix& gram = setup->gram;
  const ParticularOperator& h0 = setup->kinetic.assembled;

  const Vector psi0 = build_initial_state(cfg.initial, setup->pair, gram);
  const double radius = 2.0 * gram.norm(psi0);
  const NonlinearTerm v = power_law_term(gram, cfg.alpha, cfg.nonlinear_n, radius);

  // instantiate the contraction constant, then the window length
  double tau = cfg.tau;
  if (tau <= 0.0) tau = cfg.contraction_target / v.lipschitz_c;
  const double contraction = v.lipschitz_c * tau;
  if (contraction >= 1.0) {
    throw std::invalid_argument("nls config rejected: c_V * tau = " + fmt(contraction) +
                                " >= 1 (c_V = " + fmt(v.lipschitz_c) + ")");
  }
  checks.note("c_V = " + fmt(v.lipschitz_c) + ", tau = " + fmt(tau) +
              ", K = " + fmt(contraction) + ", ball radius = " + fmt(radius));

  const QuadratureRule rule = cfg.p >= 2 ? QuadratureRule::simpson(cfg.substeps, tau)
                                         : QuadratureRule::trapezoid(cfg.substeps, tau);
  const DiscreteGroup group = DiscreteGroup::forward(h0, rule.substep(), cfg.p);

  auto windows_csv =
      open_csv(cfg.output_dir / "series_windows.csv", "window,K,iterations,bound,m_norm");
  auto bound_csv = open_csv(cfg.output_dir / "nls_bound_check.csv",
                            "window,self_oracle_error,a_posteriori_bound,"
                            "estimate_bound,norm_drift");

  const double norm0 = gram.norm(psi0);
  bool ratios_ok = true;
  bool bounds_ok = true;
  bool estimate_ok = true;
  Vector psi = psi0;
  for (int w = 0; w < cfg.n_windows; ++w) {
    PicardResult loose;
    PicardResult shadow;
    try {
      loose = picard_solve(group, rule, v, psi, cfg.tol, 400);
      shadow = picard_solve(group, rule, v, psi, cfg.tol / 100.0, 600);
    } catch (const ball_exit_error& e) {
      checks.fail("window " + std::to_string(w) + ": " + e.what());
      return finish(cfg, checks, start);
    }
    if (!loose.state.converged || !shadow.state.converged) {
      checks.fail("window " + std::to_string(w) + ": picard did not converge");
      return finish(cfg, checks, start);
    }

    for (size_t i = 1; i < loose.increment_history.size(); ++i) {
      const double ratio = loose.increment_history[i] / loose.increment_history[i - 1];
      if (!(ratio <= contraction * (1.0 + 1e-9))) ratios_ok = false;
    }

    const double oracle_error = gram.norm(loose.trajectory.back() - shadow.trajectory.back());
    if (!(oracle_error <= loose.state.a_posteriori_bound)) bounds_ok = false;

    // overall estimate with the instantiated constants: the n-th iterate
    // satisfies (c_V tau)^n / (1 - c_V tau) * (2 ||Psi0|| + M_V tau) plus the
    // spatial term, reported here without the (unknown) c_psi h^2 offset.
    // The a-posteriori bound must sit below it (first-iterate estimate
    // delta_1 <= 2 ||Psi0|| + M_V tau).
    const double iterate_bound =
        std::pow(contraction, loose.state.iterate_index) / (1.0 - contraction) *
        (2.0 * gram.norm(psi) + v.sup_bound * tau);
    if (!(loose.state.a_posteriori_bound <= iterate_bound * (1.0 + 1e-12))) {
      estimate_ok = false;
    }

    WindowRecord rec;
    rec.window = w;
    rec.contraction_k = contraction;
    rec.iterations = loose.state.iterate_index;
    rec.bound = loose.state.a_posteriori_bound;
    psi = loose.trajectory.back();
    rec.state_norm = gram.norm(psi);
    write_window_csv_row(windows_csv, rec);
    bound_csv << w << ',' << fmt(oracle_error) << ',' << fmt(rec.bound) << ','
              << fmt(iterate_bound) << ',' << fmt(std::abs(rec.state_norm - norm0) / norm0)
              << '\n';
  }

  checks.check(ratios_ok, "picard increment ratios <= K on every window");
  checks.check(bounds_ok, "a-posteriori bound dominates the tol/100 self-oracle");
  checks.check(estimate_ok,
               "a-posteriori bound sits below the instantiated overall estimate");
  if (cfg.alpha.imag() == 0.0) {
    const double drift = std::abs(gram.norm(psi) - norm0) / norm0;
    checks.note("norm drift over " + std::to_string(cfg.n_windows) +
                " windows (real alpha): " + fmt(drift));
  }

  return finish(cfg, checks, start);
}

// ---------------------------------------------------------------------------
// pade_order_sweep

ExperimentResult run_pade_order_sweep(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.output_dir);
  Checks checks;

  const auto setup = std::make_unique<OscillatorSetup>(cfg.domain, cfg.m);
  const double norm_h = operator_scale_norm(*setup);
  checks.note("||H1|| = " + fmt(norm_h) + ", N = " + std::to_string(setup->gram.size()));

  auto orders = open_csv(cfg.output_dir / "orders.csv",
                         "p,kind,tau,h_tau,steps,error,bound");

  for (int p : {1, 2}) {
    // single-step order sweep
    std::vector<double> h_taus, errors;
    double tau = 0.5 / norm_h;
    bool under_bound = true;
    for (int j = 0; j < 5; ++j) {
      const PadePropagator prop = PadePropagator::build(setup->hamiltonian, tau, p);
      const StepError e = single_step_error(
          prop, hermitian_expm(setup->gram, setup->hamiltonian.matrix, tau));
      orders << p << ",single," << fmt(tau) << ',' << fmt(prop.h_tau()) << ",1,"
             << fmt(e.measured) << ',' << fmt(e.bound) << '\n';
      if (e.measured > e.bound) under_bound = false;
      h_taus.push_back(prop.h_tau());
      errors.push_back(e.measured);
      tau *= 0.5;
    }
    const double slope = loglog_slope(h_taus, errors);
    const double expected = 2.0 * p + 1.0;
    checks.check(std::abs(slope - expected) <= 0.2,
                 "p = " + std::to_string(p) + " single-step order " + fmt(slope) +
                     " within " + fmt(expected) + " +- 0.2");
    checks.check(under_bound,
                 "p = " + std::to_string(p) + " single-step errors below the bound");

    // multi-step bound
    bool multi_ok = true;
    for (double h_tau : {0.25, 0.5}) {
      const double step = h_tau / norm_h;
      const PadePropagator prop = PadePropagator::build(setup->hamiltonian, step, p);
      for (int m_steps : {1, 2, 4, 8, 16, 32}) {
        const StepError e = multi_step_error(
            prop, m_steps,
            hermitian_expm(setup->gram, setup->hamiltonian.matrix, m_steps * step));
        orders << p << ",multi," << fmt(step) << ',' << fmt(h_tau) << ','
               << m_steps << ',' << fmt(e.measured) << ',' << fmt(e.bound) << '\n';
        if (e.measured > e.bound) multi_ok = false;
      }
    }
    checks.check(multi_ok, "p = " + std::to_string(p) +
                               " m-step errors below m^(2p+1)/(2p+1)! h_tau^(2p+1)");

    // global order at fixed final time
    const double final_time = 6.0 / norm_h;
    std::vector<double> taus_g, errors_g;
    for (int m_steps : {8, 16, 32, 64}) {
      const double step = final_time / m_steps;
      const PadePropagator prop = PadePropagator::build(setup->hamiltonian, step, p);
      const StepError e = multi_step_error(
          prop, m_steps,
          hermitian_expm(setup->gram, setup->hamiltonian.matrix, final_time));
      orders << p << ",global," << fmt(step) << ',' << fmt(prop.h_tau()) << ','
             << m_steps << ',' << fmt(e.measured) << ',' << fmt(e.bound) << '\n';
      taus_g.push_back(step);
      errors_g.push_back(e.measured);
    }
    const double gslope = loglog_slope(taus_g, errors_g);
    checks.check(std::abs(gslope - 2.0 * p) <= 0.2,
                 "p = " + std::to_string(p) + " global order " + fmt(gslope) +
                     " within " + fmt(2.0 * p) + " +- 0.2");
  }

  // compatibility variant: the tau-scaled Crank-Nicolson equals R_11 at 2 tau
  {
    const double tau = 0.25 / norm_h;
    const PadePropagator paper =
        PadePropagator::build(setup->hamiltonian, tau, 1, PadeVariant::full_step_cn);
    const PadePropagator doubled = PadePropagator::build(setup->hamiltonian, 2.0 * tau, 1);
    const double gap = setup->gram.operator_norm(paper.dense_map() - doubled.dense_map());
    checks.check(gap <= 1e-11, "full-step CN variant matches R_11 at twice the step");
  }

  return finish(cfg, checks, start);
}

// ---------------------------------------------------------------------------
// spatial_order_sweep

ExperimentResult run_spatial_order_sweep(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.output_dir);
  Checks checks;

  // reference_h2: the pure h^2 prediction anchored at the coarsest level
  auto orders = open_csv(cfg.output_dir / "orders.csv", "dim,kind,m,h,error,reference_h2");

  const auto h2_reference = [](const std::vector<double>& hs,
                               const std::vector<double>& errors, size_t i) {
    return errors.front() * (hs[i] / hs.front()) * (hs[i] / hs.front());
  };

  const auto projection_sweep = [&](const Domain& dom, int m_max, const ScalarField& v,
                                    const std::string& label) {
    const OrderFit fit = measure_approximation_order(dom, m_max, v);
    for (size_t i = 0; i < fit.hs.size(); ++i) {
      orders << dom.dim << ",projection," << i << ',' << fmt(fit.hs[i]) << ','
             << fmt(fit.errors[i]) << ',' << fmt(h2_reference(fit.hs, fit.errors, i))
             << '\n';
    }
    checks.check(fit.slope >= 1.8 && fit.slope <= 2.2,
                 label + " projection order " + fmt(fit.slope) + " within [1.8, 2.2]");
  };

  projection_sweep(Domain::interval(1.0), std::min(cfg.m_max + 1, 4),
                   [](Point q) { return cplx(std::sin(pi * q.x), 0.0); }, "1d");
  projection_sweep(Domain::box(1.0, 1.0), std::min(cfg.m_max, 3),
                   [](Point q) {
                     return cplx(std::sin(pi * q.x) * std::sin(pi * q.y), 0.0);
                   },
                   "2d");

  // solution error against the exact free evolution of box eigenmodes
  const auto solution_sweep = [&](const Domain& dom, int m_max, const std::string& label) {
    const bool two_d = dom.dim == 2;
    const double final_time = 0.02;
    const double l1 = dom.lengths[0];
    const double l2 = dom.lengths[1];
    const double lam1 =
        pi * pi / (l1 * l1) + (two_d ? pi * pi / (l2 * l2) : 0.0);
    const double lam2 =
        4.0 * pi * pi / (l1 * l1) + (two_d ? pi * pi / (l2 * l2) : 0.0);
    const auto mode = [=](Point q, int k) {
      double v = std::sin(k * pi * q.x / l1);
      if (two_d) v *= std::sin(pi * q.y / l2);
      return v;
    };
    const ScalarField initial = [=](Point q) {
      return cplx(mode(q, 1) + 0.5 * mode(q, 2), 0.0);
    };
    const ScalarField exact_t = [=](Point q) {
      return std::exp(cplx(0.0, -lam1 * final_time)) * mode(q, 1) +
             0.5 * std::exp(cplx(0.0, -lam2 * final_time)) * mode(q, 2);
    };

    std::vector<double> hs, errs;
    for (int m = cfg.m_min; m <= m_max; ++m) {
      ProjectionPair pair(build_grid(dom, m));
      const GramMatrix gram = assemble_mass(pair.basis());
      const ParticularOperator h0 = assemble_kinetic(pair.basis(), gram).assembled;
      const Vector c0 = pair.decompose(initial);
      // dense exponential: exact in time, leaving the pure spatial error
      const Vector ct = hermitian_expm(gram, h0.matrix, final_time) * c0;
      const double err = quadrature_l2_distance(pair.grid(), pair.summate(ct), exact_t);
      hs.push_back(pair.grid().h());
      errs.push_back(err);
      orders << dom.dim << ",solution," << m << ',' << fmt(pair.grid().h()) << ','
             << fmt(err) << ',' << fmt(h2_reference(hs, errs, hs.size() - 1)) << '\n';
    }
    const double slope = loglog_slope(hs, errs);
    checks.check(slope >= 1.8 && slope <= 2.2,
                 label + " solution order " + fmt(slope) + " within [1.8, 2.2]");
  };

  solution_sweep(Domain::interval(1.0), std::min(cfg.m_max + 1, 4), "1d");
  solution_sweep(Domain::box(1.0, 1.0), std::min(cfg.m_max, 3), "2d");

  return finish(cfg, checks, start);
}

// ---------------------------------------------------------------------------
// unitarity_soak

ExperimentResult run_unitarity_soak(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.output_dir);
  Checks checks;

  // random M-self-adjoint generators on a random SPD gram
  {
    const Index n = 64;
    const GramMatrix gram(detail::random_spd(n, 2024));
    const ParticularOperator h = detail::random_m_self_adjoint(gram, 2025);
    const double norm_h = PadePropagator::build(h, 1.0, 1).h_tau();

    for (int p : {1, 2, 3}) {
      const PadePropagator prop = PadePropagator::build(h, 0.25 / norm_h, p);
      Vector psi = normalize(gram, random_state(n, 77));
      double max_drift = 0.0;
      for (int k = 0; k < 1000; ++k) {
        psi = prop.step(psi);
        max_drift = std::max(max_drift, std::abs(gram.norm(psi) - 1.0));
      }
      checks.check(max_drift <= 1e-10, "random Hermitian, p = " + std::to_string(p) +
                                           ": drift over 1000 steps " + fmt(max_drift));
    }
  }

  // assembled oscillator Hamiltonian
  const auto setup = std::make_unique<OscillatorSetup>(cfg.domain, cfg.m);
  auto norm_csv = open_csv(cfg.output_dir / "series_norm.csv", "n,m_norm,drift,bound");
  for (int p : {1, 2, 3}) {
    const DiscreteGroup group = DiscreteGroup::forward(setup->hamiltonian, cfg.tau, p);
    Vector psi = build_initial_state(cfg.initial, setup->pair, setup->gram);
    double max_drift = 0.0;
    for (int k = 1; k <= 1000; ++k) {
      psi = group.apply(1, std::move(psi));
      const double drift = std::abs(setup->gram.norm(psi) - 1.0);
      max_drift = std::max(max_drift, drift);
      if (p == 1 && k % 10 == 0) {
        norm_csv << k << ',' << fmt(setup->gram.norm(psi)) << ',' << fmt(drift)
                 << ",1e-10\n";
      }
    }
    checks.check(max_drift <= 1e-10, "H1, p = " + std::to_string(p) +
                                         ": drift over 1000 steps " + fmt(max_drift));

    // time reversal
    const DiscreteGroup rev = group.reversed();
    const Vector psi0 = build_initial_state(cfg.initial, setup->pair, setup->gram);
    bool reversal_ok = true;
    for (long k : {16L, 64L, 256L}) {
      const Vector round_trip = rev.apply(k, group.apply(k, psi0));
      const double err = setup->gram.norm(round_trip - psi0);
      if (!(err <= 1e-10 * static_cast<double>(k))) reversal_ok = false;
    }
    checks.check(reversal_ok,
                 "p = " + std::to_string(p) + ": reversal error <= 1e-10 * k");
  }

  return finish(cfg, checks, start);
}

// ---------------------------------------------------------------------------
// constants_of_motion

ExperimentResult run_constants_of_motion(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(cfg.output_dir);
  Checks checks;

  const auto setup = std::make_unique<OscillatorSetup>(cfg.domain, cfg.m);
  const DiscreteGroup group = DiscreteGroup::forward(setup->hamiltonian, cfg.tau, cfg.p);
  const Vector psi0 = build_initial_state(cfg.initial, setup->pair, setup->gram);

  const ParticularOperator& h1 = setup->hamiltonian;
  const auto report_line = [&](const std::string& name,
                               const ConstantOfMotionReport& rep, bool expect_constant) {
    if (expect_constant) {
      checks.check(rep.compatible && rep.constant,
                   name + " is a discrete constant of motion (commutator " +
                       fmt(rep.commutator_residual) + ", drift " +
                       fmt(rep.max_drift.value_or(-1.0)) + ")");
    } else {
      checks.check(!rep.compatible, name + " flagged not compatible (commutator " +
                                        fmt(rep.commutator_residual) + " > " +
                                        fmt(rep.commutator_tolerance) + ")");
    }
  };

  report_line("identity", verify_constant_of_motion(identity_operator(setup->gram), h1,
                                                    group, psi0, cfg.n_steps),
              true);
  report_line("H1",
              verify_constant_of_motion(h1, h1, group, psi0, cfg.n_steps), true);
  const ParticularOperator quad = make_operator(
      setup->gram, (h1.matrix * h1.matrix + 3.0 * h1.matrix).eval());
  report_line("H1^2 + 3 H1",
              verify_constant_of_motion(quad, h1, group, psi0, cfg.n_steps), true);

  const ParticularOperator x_mult = assemble_potential(
      setup->pair.basis(), setup->gram, [](Point q) { return q.x; });
  report_line("X (negative control)",
              verify_constant_of_motion(x_mult, h1, group, psi0, cfg.n_steps), false);

  // energy series for the record
  const ExpectationSeries series = track_expectation(h1, group, psi0, cfg.n_steps);
  std::ofstream out(cfg.output_dir / "series_energy.csv");
  write_series_csv(out, series);

  return finish(cfg, checks, start);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  switch (cfg.experiment) {
    case ExperimentKind::qho2d: return run_qho2d(cfg);
    case ExperimentKind::nls: return run_nls(cfg);
    case ExperimentKind::pade_order_sweep: return run_pade_order_sweep(cfg);
    case ExperimentKind::spatial_order_sweep: return run_spatial_order_sweep(cfg);
    case ExperimentKind::unitarity_soak: return run_unitarity_soak(cfg);
    case ExperimentKind::constants_of_motion: return run_constants_of_motion(cfg);
  }
  throw std::logic_error("unreachable experiment kind");
}

SuiteResult run_suite(const std::vector<ExperimentConfig>& configs) {
  std::set<std::string> names;
  for (const auto& cfg : configs) {
    cfg.validate();
    if (!names.insert(cfg.name).second) {
      throw std::invalid_argument("duplicate experiment name '" + cfg.name + "'");
    }
  }

  SuiteResult suite;
  suite.results.resize(configs.size());
  suite.all_passed = true;
  if (configs.empty()) return suite;

  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("UNIGROUP_THREADS")) {
    try {
      workers = static_cast<unsigned>(std::max(1, std::stoi(env)));
    } catch (const std::exception&) {
      throw std::invalid_argument("UNIGROUP_THREADS is not an integer");
    }
  }
  workers = std::min<unsigned>(workers, static_cast<unsigned>(configs.size()));

  std::atomic<size_t> next{0};
  const auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= configs.size()) return;
      try {
        suite.results[i] = run_experiment(configs[i]);
      } catch (const std::exception& e) {
        ExperimentResult failed;
        failed.name = configs[i].name;
        failed.kind = configs[i].experiment;
        failed.passed = false;
        failed.notes = {std::string("error: ") + e.what()};
        suite.results[i] = failed;
      }
    }
  };

  std::vector<std::thread> pool;
  for (unsigned i = 0; i + 1 < workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& r : suite.results) suite.all_passed = suite.all_passed && r.passed;
  return suite;
}

std::vector<ExperimentConfig> default_suite(const std::filesystem::path& out_root) {
  std::vector<ExperimentConfig> configs;

  ExperimentConfig qho;
  qho.name = "qho2d";
  qho.experiment = ExperimentKind::qho2d;
  qho.domain = Domain::box(1.0, 1.0);
  qho.m = 2;
  qho.m_min = 1;
  qho.m_max = 3;
  qho.p = 1;
  qho.tau = 4e-3;
  qho.n_steps = 200;
  qho.initial.kind = InitialState::Kind::gaussian_bump;
  qho.output_dir = out_root / "qho2d";
  configs.push_back(qho);

  ExperimentConfig nls;
  nls.name = "nls";
  nls.experiment = ExperimentKind::nls;
  nls.domain = Domain::box(1.0, 1.0);
  nls.m = 2;
  nls.p = 1;
  nls.tau = 0.0;  // derive from the contraction target
  nls.n_windows = 10;
  nls.substeps = 8;
  nls.alpha = cplx(-1.0, 0.0);
  nls.nonlinear_n = 2;
  nls.tol = 1e-10;
  nls.initial.kind = InitialState::Kind::gaussian_bump;
  nls.output_dir = out_root / "nls";
  configs.push_back(nls);

  ExperimentConfig pade;
  pade.name = "pade_order_sweep";
  pade.experiment = ExperimentKind::pade_order_sweep;
  pade.domain = Domain::box(1.0, 1.0);
  pade.m = 2;
  pade.output_dir = out_root / "pade_order_sweep";
  configs.push_back(pade);

  ExperimentConfig spatial;
  spatial.name = "spatial_order_sweep";
  spatial.experiment = ExperimentKind::spatial_order_sweep;
  spatial.m_min = 0;
  spatial.m_max = 3;
  spatial.output_dir = out_root / "spatial_order_sweep";
  configs.push_back(spatial);

  ExperimentConfig soak;
  soak.name = "unitarity_soak";
  soak.experiment = ExperimentKind::unitarity_soak;
  soak.domain = Domain::box(1.0, 1.0);
  soak.m = 2;
  soak.tau = 1e-3;
  soak.initial.kind = InitialState::Kind::gaussian_bump;
  soak.output_dir = out_root / "unitarity_soak";
  configs.push_back(soak);

  ExperimentConfig constants;
  constants.name = "constants_of_motion";
  constants.experiment = ExperimentKind::constants_of_motion;
  constants.domain = Domain::box(1.0, 1.0);
  constants.m = 1;
  constants.tau = 0.01;
  constants.n_steps = 200;
  constants.initial.kind = InitialState::Kind::gaussian_bump;
  constants.output_dir = out_root / "constants_of_motion";
  configs.push_back(constants);

  return configs;
}

void write_suite_summary(std::ostream& out, const SuiteResult& suite) {
  for (const auto& r : suite.results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << to_string(r.kind)
        << ", " << fmt(r.seconds) << " s)\n";
  }
  out << (suite.all_passed ? "SUITE PASS" : "SUITE FAIL") << '\n';
}

}  // namespace unigroup
