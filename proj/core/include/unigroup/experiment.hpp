#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "unigroup/duhamel.hpp"
#include "unigroup/observables.hpp"

namespace unigroup {

enum class ExperimentKind {
  qho2d,
  nls,
  pade_order_sweep,
  spatial_order_sweep,
  unitarity_soak,
  constants_of_motion,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct InitialState {
  enum class Kind { gaussian_bump, eigenmode, custom_csv };
  Kind kind = Kind::gaussian_bump;
  int mode_x = 1;
  int mode_y = 1;
  std::filesystem::path csv_path;
};

// Flat experiment description; see parse_config_text for the key = value
// file format and apply_override for the CLI override names.
struct ExperimentConfig {
  std::string name;
  ExperimentKind experiment = ExperimentKind::qho2d;
  Domain domain = Domain::box(1.0, 1.0);
  int m = 2;        // working grid level
  int m_min = 0;    // sweep range
  int m_max = 3;
  int p = 1;        // diagonal Pade order
  double tau = 0.01;  // time step; 0 = derive from the contraction target (nls)
  int n_steps = 200;
  int n_windows = 8;
  int substeps = 8;
  cplx alpha = cplx(-1.0, 0.0);
  int nonlinear_n = 2;
  double contraction_target = 0.32;  // K used when tau is derived
  InitialState initial;
  double tol = 1e-10;
  bool dump_matrices = false;
  std::filesystem::path output_dir = "runs/out";

  void validate() const;  // throws std::invalid_argument
};

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& default_name);
ExperimentConfig load_config(const std::filesystem::path& path);

// CLI override names: experiment, m, p, tau, steps, windows, out (and any
// config file key).
void apply_override(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value);

struct ExperimentResult {
  std::string name;
  ExperimentKind kind = ExperimentKind::qho2d;
  bool passed = false;
  std::vector<std::string> notes;
  double seconds = 0.0;
};

// Dispatches on cfg.experiment; writes series_*.csv / orders.csv /
// summary.txt under cfg.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

ExperimentResult run_qho2d(const ExperimentConfig& cfg);
ExperimentResult run_nls(const ExperimentConfig& cfg);
ExperimentResult run_pade_order_sweep(const ExperimentConfig& cfg);
ExperimentResult run_spatial_order_sweep(const ExperimentConfig& cfg);
ExperimentResult run_unitarity_soak(const ExperimentConfig& cfg);
ExperimentResult run_constants_of_motion(const ExperimentConfig& cfg);

struct SuiteResult {
  std::vector<ExperimentResult> results;
  bool all_passed = false;
};

// Runs experiments (in parallel up to UNIGROUP_THREADS workers; default is
// the hardware concurrency). Duplicate experiment names are rejected up
// front. Failures are captured per experiment; the suite keeps going.
SuiteResult run_suite(const std::vector<ExperimentConfig>& configs);

// The bundled desk-scale suite: one config per experiment kind.
std::vector<ExperimentConfig> default_suite(const std::filesystem::path& out_root);

void write_suite_summary(std::ostream& out, const SuiteResult& suite);

// Interpolated (and, except for custom csv data, normalized) coefficients.
Vector build_initial_state(const InitialState& initial, const ProjectionPair& pair,
                           const GramMatrix& gram);

}  // namespace unigroup
