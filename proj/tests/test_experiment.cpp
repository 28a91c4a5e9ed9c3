#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "unigroup/experiment.hpp"
#include "unigroup/matrix_io.hpp"

using namespace unigroup;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& leaf) {
  const fs::path dir = fs::temp_directory_path() / "unigroup_experiments" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config text parses every key") {
  const std::string text = R"(
# oscillator demo
experiment = qho2d
name = demo
dim = 2
length = 1.0
m = 1
m_min = 0
m_max = 2
p = 2
tau = 0.001
steps = 50
windows = 4
substeps = 6
alpha_re = -0.5
alpha_im = 0.25
nonlinear_n = 3
tol = 1e-9
initial = eigenmode:2,1
out = runs/demo
)";
  const ExperimentConfig cfg = parse_config_text(text, "fallback");
  CHECK(cfg.name == "demo");
  CHECK(cfg.experiment == ExperimentKind::qho2d);
  CHECK(cfg.domain.dim == 2);
  CHECK(cfg.m == 1);
  CHECK(cfg.m_max == 2);
  CHECK(cfg.p == 2);
  CHECK(cfg.tau == doctest::Approx(0.001));
  CHECK(cfg.n_steps == 50);
  CHECK(cfg.n_windows == 4);
  CHECK(cfg.substeps == 6);
  CHECK(cfg.alpha == cplx(-0.5, 0.25));
  CHECK(cfg.nonlinear_n == 3);
  CHECK(cfg.initial.kind == InitialState::Kind::eigenmode);
  CHECK(cfg.initial.mode_x == 2);
  CHECK(cfg.initial.mode_y == 1);
  CHECK(cfg.output_dir == fs::path("runs/demo"));
  cfg.validate();
}

TEST_CASE("config rejects malformed input") {
  CHECK_THROWS_AS(parse_config_text("experiment qho2d\n", "x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("mystery = 1\n", "x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("experiment = warp\n", "x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("tau = fast\n", "x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config_text("initial = vortex\n", "x"), std::invalid_argument);
}

TEST_CASE("overrides mirror the CLI flags") {
  ExperimentConfig cfg;
  cfg.name = "base";
  apply_override(cfg, "experiment", "nls");
  apply_override(cfg, "m", "3");
  apply_override(cfg, "p", "2");
  apply_override(cfg, "tau", "auto");
  apply_override(cfg, "steps", "7");
  apply_override(cfg, "out", "elsewhere");
  CHECK(cfg.experiment == ExperimentKind::nls);
  CHECK(cfg.m == 3);
  CHECK(cfg.p == 2);
  CHECK(cfg.tau == 0.0);
  CHECK(cfg.n_steps == 7);
  CHECK(cfg.output_dir == fs::path("elsewhere"));
}

TEST_CASE("validation catches bad ranges") {
  ExperimentConfig cfg;
  cfg.name = "x";
  cfg.p = 9;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.p = 1;
  cfg.m_min = 3;
  cfg.m_max = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.m_min = 0;
  cfg.m_max = 3;
  cfg.tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("nls config with an oversized step is rejected at instantiation") {
  ExperimentConfig cfg;
  cfg.name = "nls-too-fast";
  cfg.experiment = ExperimentKind::nls;
  cfg.domain = Domain::box(1.0, 1.0);
  cfg.m = 1;
  cfg.tau = 10.0;  // far beyond 1/c_V
  cfg.n_windows = 2;
  cfg.output_dir = scratch_dir("nls_reject");
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("suite rejects duplicate names and tolerates the empty list") {
  const SuiteResult empty = run_suite({});
  CHECK(empty.all_passed);
  CHECK(empty.results.empty());

  ExperimentConfig a;
  a.name = "same";
  ExperimentConfig b;
  b.name = "same";
  CHECK_THROWS_AS(run_suite({a, b}), std::invalid_argument);
}

TEST_CASE("default suite covers all six experiment kinds exactly once") {
  const auto configs = default_suite("runs");
  CHECK(configs.size() == 6);
  std::set<ExperimentKind> kinds;
  std::set<std::string> names;
  for (const auto& cfg : configs) {
    kinds.insert(cfg.experiment);
    names.insert(cfg.name);
    CHECK_NOTHROW(cfg.validate());
  }
  CHECK(kinds.size() == 6);
  CHECK(names.size() == 6);
}

TEST_CASE("initial states are interpolated and normalized") {
  ProjectionPair pair(build_grid(Domain::box(1.0, 1.0), 1));
  const GramMatrix gram = assemble_mass(pair.basis());

  InitialState gaussian;
  const Vector g = build_initial_state(gaussian, pair, gram);
  CHECK(std::abs(gram.norm(g) - 1.0) <= 1e-13);

  InitialState mode;
  mode.kind = InitialState::Kind::eigenmode;
  mode.mode_x = 1;
  mode.mode_y = 2;
  const Vector e = build_initial_state(mode, pair, gram);
  CHECK(std::abs(gram.norm(e) - 1.0) <= 1e-13);

  const fs::path dir = scratch_dir("initial_csv");
  save_vector_csv(dir / "state.csv", g);
  InitialState custom;
  custom.kind = InitialState::Kind::custom_csv;
  custom.csv_path = dir / "state.csv";
  const Vector c = build_initial_state(custom, pair, gram);
  CHECK((c - g).cwiseAbs().maxCoeff() == 0.0);

  ProjectionPair tiny(build_grid(Domain::interval(1.0), 0));
  const GramMatrix tiny_gram = assemble_mass(tiny.basis());
  CHECK_THROWS_AS(build_initial_state(custom, tiny, tiny_gram), std::invalid_argument);
}

TEST_CASE("constants-of-motion experiment runs and emits deterministic csv") {
  ExperimentConfig cfg;
  cfg.name = "com";
  cfg.experiment = ExperimentKind::constants_of_motion;
  cfg.domain = Domain::box(1.0, 1.0);
  cfg.m = 1;
  cfg.tau = 0.01;
  cfg.n_steps = 60;
  cfg.initial.kind = InitialState::Kind::gaussian_bump;

  cfg.output_dir = scratch_dir("com_a");
  const ExperimentResult first = run_experiment(cfg);
  CHECK(first.passed);
  CHECK(fs::exists(cfg.output_dir / "summary.txt"));
  CHECK(fs::exists(cfg.output_dir / "series_energy.csv"));
  const std::string csv_a = slurp(cfg.output_dir / "series_energy.csv");

  cfg.output_dir = scratch_dir("com_b");
  const ExperimentResult second = run_experiment(cfg);
  CHECK(second.passed);
  const std::string csv_b = slurp(cfg.output_dir / "series_energy.csv");
  CHECK(csv_a == csv_b);  // byte-identical across runs
}

TEST_CASE("spatial order sweep passes at desk scale") {
  ExperimentConfig cfg;
  cfg.name = "spatial";
  cfg.experiment = ExperimentKind::spatial_order_sweep;
  cfg.m_min = 0;
  cfg.m_max = 3;
  cfg.output_dir = scratch_dir("spatial");
  const ExperimentResult result = run_experiment(cfg);
  for (const auto& note : result.notes) INFO(note);
  CHECK(result.passed);
  CHECK(fs::exists(cfg.output_dir / "orders.csv"));
}

TEST_CASE("UNIGROUP_THREADS caps the suite workers") {
  ExperimentConfig a;
  a.name = "com_one";
  a.experiment = ExperimentKind::constants_of_motion;
  a.domain = Domain::interval(1.0);
  a.m = 1;
  a.tau = 0.01;
  a.n_steps = 30;
  a.output_dir = scratch_dir("threads_a");
  ExperimentConfig b = a;
  b.name = "com_two";
  b.output_dir = scratch_dir("threads_b");

  setenv("UNIGROUP_THREADS", "1", 1);
  const SuiteResult serial = run_suite({a, b});
  CHECK(serial.all_passed);
  CHECK(serial.results.size() == 2);
  CHECK(serial.results[0].name == "com_one");
  CHECK(serial.results[1].name == "com_two");

  setenv("UNIGROUP_THREADS", "not-a-number", 1);
  CHECK_THROWS_AS(run_suite({a, b}), std::invalid_argument);
  unsetenv("UNIGROUP_THREADS");
}

TEST_CASE("suite captures experiment failures instead of aborting") {
  ExperimentConfig bad;
  bad.name = "nls_bad";
  bad.experiment = ExperimentKind::nls;
  bad.domain = Domain::box(1.0, 1.0);
  bad.m = 1;
  bad.tau = 10.0;  // violates the contraction restriction
  bad.output_dir = scratch_dir("suite_bad");
  const SuiteResult suite = run_suite({bad});
  CHECK_FALSE(suite.all_passed);
  REQUIRE(suite.results.size() == 1);
  CHECK_FALSE(suite.results[0].passed);
  REQUIRE(!suite.results[0].notes.empty());
  CHECK(suite.results[0].notes[0].find("error:") == 0);
}

TEST_CASE("suite summary format") {
  SuiteResult suite;
  ExperimentResult r;
  r.name = "spatial";
  r.kind = ExperimentKind::spatial_order_sweep;
  r.passed = true;
  r.seconds = 0.5;
  suite.results.push_back(r);
  suite.all_passed = true;
  std::stringstream ss;
  write_suite_summary(ss, suite);
  CHECK(ss.str() == "PASS spatial (spatial_order_sweep, 0.5 s)\nSUITE PASS\n");
}
