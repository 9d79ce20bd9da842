#include <CLI11.hpp>

#include <iostream>

#include "singlab/experiments.hpp"

namespace {

enum Exit { kPass = 0, kFail = 1, kConfig = 2, kSolver = 3 };

void print(const std::string& title, const singlab::Judgement& j) {
  std::cout << title << ": " << (j.passed ? "PASS" : "FAIL") << '\n';
  for (const auto& l : j.lines) std::cout << "  " << l << '\n';
}

std::filesystem::path target_dir(const singlab::ScenarioConfig& cfg, const std::string& fallback) {
  return singlab::output_root() / (cfg.output.directory.empty() ? fallback : cfg.output.directory);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for semilinear problems with singular nonlinearities"};
  app.require_subcommand(1);

  std::string name, config_path, verify_dir;
  std::vector<std::string> sets;
  auto* run = app.add_subcommand("run", "run one registered experiment");
  run->add_option("name", name, "experiment name (see `list`)")->required();
  run->add_option("--config", config_path, "INI file overlaid on the experiment defaults");
  run->add_option("--set", sets, "section.key=value override, repeatable");

  auto* scan = app.add_subcommand("scan", "parameter scan of a threshold experiment");
  scan->add_option("--config", config_path, "INI file; run.experiment selects the experiment")->required();
  scan->add_option("--set", sets, "section.key=value override, repeatable");

  auto* list = app.add_subcommand("list", "list experiments");
  auto* verify = app.add_subcommand("verify", "re-judge a finished run from its CSV files");
  verify->add_option("dir", verify_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  auto overrides = [&] {
    std::vector<std::pair<std::string, std::string>> kv;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw singlab::ConfigError("--set expects section.key=value, got '" + s + "'");
      kv.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return kv;
  };

  try {
    if (*list) {
      for (const auto& e : singlab::experiment_registry()) {
        std::cout << e.name << (singlab::scannable(e.name) ? "  [scan]" : "") << '\n'
                  << "  anchor: " << e.anchor << '\n'
                  << "  rule:   " << e.rule << '\n';
      }
      return kPass;
    }
    if (*run) {
      auto cfg = singlab::find_experiment(name).defaults();
      if (!config_path.empty()) cfg = singlab::load_config(config_path, cfg);
      cfg = singlab::apply_assignments(cfg, overrides());
      const auto dir = target_dir(cfg, name);
      const auto res = singlab::run_experiment(name, cfg, dir);
      print(name, res.judgement);
      std::cout << "output: " << dir.string() << '\n';
      return res.judgement.passed ? kPass : kFail;
    }
    if (*scan) {
      // run.experiment has to be read before the scan defaults can be chosen.
      const auto probe = singlab::load_config(config_path);
      if (probe.experiment.empty()) throw singlab::ConfigError("scan config must set run.experiment");
      auto cfg = singlab::load_config(config_path, singlab::scan_defaults(probe.experiment));
      cfg = singlab::apply_assignments(cfg, overrides());
      const auto dir = target_dir(cfg, cfg.experiment + "_scan");
      const auto res = singlab::run_scan(cfg, dir);
      print("scan " + cfg.experiment, res.judgement);
      std::cout << "output: " << dir.string() << '\n';
      return res.judgement.passed ? kPass : kFail;
    }
    if (*verify) {
      const auto j = singlab::verify_run(verify_dir);
      print("verify " + verify_dir, j);
      return j.passed ? kPass : kFail;
    }
  } catch (const singlab::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
  return kFail;
}
