#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "unigroup/acceptance.hpp"
#include "unigroup/experiment.hpp"

namespace fs = std::filesystem;

namespace {

int command_run(const std::string& config_path,
                const std::vector<std::pair<std::string, std::string>>& overrides) {
  unigroup::ExperimentConfig cfg = unigroup::load_config(config_path);
  for (const auto& [key, value] : overrides) unigroup::apply_override(cfg, key, value);
  cfg.validate();

  std::cout << "running " << cfg.name << " (" << unigroup::to_string(cfg.experiment)
            << ") -> " << cfg.output_dir.string() << std::endl;
  const unigroup::ExperimentResult result = unigroup::run_experiment(cfg);
  for (const auto& note : result.notes) std::cout << "  " << note << '\n';
  std::cout << (result.passed ? "PASS " : "FAIL ") << result.name << std::endl;
  return result.passed ? 0 : 1;
}

int command_suite(const std::string& dir, const std::string& out_root) {
  std::vector<unigroup::ExperimentConfig> configs;
  if (dir.empty()) {
    configs = unigroup::default_suite(out_root);
  } else {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && (entry.path().extension() == ".cfg" ||
                                      entry.path().extension() == ".conf")) {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      std::cerr << "no .cfg files under " << dir << std::endl;
      return 2;
    }
    for (const auto& file : files) {
      unigroup::ExperimentConfig cfg = unigroup::load_config(file);
      if (cfg.output_dir == fs::path("runs/out")) {
        cfg.output_dir = fs::path(out_root) / cfg.name;
      }
      configs.push_back(std::move(cfg));
    }
  }

  const unigroup::SuiteResult suite = unigroup::run_suite(configs);
  unigroup::write_suite_summary(std::cout, suite);
  fs::create_directories(out_root);
  std::ofstream summary(fs::path(out_root) / "summary.txt");
  unigroup::write_suite_summary(summary, suite);
  return suite.all_passed ? 0 : 1;
}

int command_verify() {
  const auto results = unigroup::acceptance::run_all(&std::cout);
  const bool ok = unigroup::acceptance::all_passed(results);
  std::cout << (ok ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL") << std::endl;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unitary-group propagation experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string experiment, m, p, tau, steps, windows, out;
  std::vector<std::string> sets;
  CLI::App* run = app.add_subcommand("run", "run one experiment from a config file");
  run->add_option("config", config_path, "key = value config file")->required();
  run->add_option("--experiment", experiment, "override the experiment kind");
  run->add_option("--m", m, "override the working grid level");
  run->add_option("--p", p, "override the Pade order");
  run->add_option("--tau", tau, "override the time step");
  run->add_option("--steps", steps, "override the step count");
  run->add_option("--windows", windows, "override the window count");
  run->add_option("--out", out, "override the output directory");
  run->add_option("--set", sets, "extra key=value overrides")->take_all();

  std::string suite_dir;
  std::string suite_out = "runs";
  CLI::App* suite = app.add_subcommand(
      "suite", "run every config in a directory (bundled suite when omitted)");
  suite->add_option("dir", suite_dir, "directory of .cfg files");
  suite->add_option("--out", suite_out, "output root directory");

  app.add_subcommand("verify", "run the bundled acceptance suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      std::vector<std::pair<std::string, std::string>> overrides;
      const auto add = [&](const std::string& key, const std::string& value) {
        if (!value.empty()) overrides.emplace_back(key, value);
      };
      add("experiment", experiment);
      add("m", m);
      add("p", p);
      add("tau", tau);
      add("steps", steps);
      add("windows", windows);
      add("out", out);
      for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
          std::cerr << "--set expects key=value, got '" << kv << "'" << std::endl;
          return 2;
        }
        overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
      }
      return command_run(config_path, overrides);
    }
    if (suite->parsed()) return command_suite(suite_dir, suite_out);
    return command_verify();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
}
