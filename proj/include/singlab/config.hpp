#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "singlab/diagnostics.hpp"
#include "singlab/geometry.hpp"
#include "singlab/solver.hpp"

namespace singlab {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GridConfig {
  DomainKind domain = DomainKind::RadialBall;
  int dimension = 2;
  std::vector<int> cells = {128, 256, 512, 1024};
  double coefficient = 1.0;
};

struct NonlinearityConfig {
  /// model | bounded | two_power | constant | oscillating | bump
  std::string family = "model";
  double gamma = 1.0;
  double theta = 1.2;
  double h_infinity = 0.0;
  double k1 = 1.0;
  double cap = 1.0;
  double center = 2.0;
  double width = 0.5;
  double height = 1.0;
};

struct DatumConfig {
  /// constant | power_of_distance | example_ex | log_profile | log_weight |
  /// radial_power | example_luigi | atom
  std::string kind = "example_ex";
  double exponent = -0.5;
  double scale = 1.0;
  double eta = 0.8;
  double m = 2.0;
  double a = 2.0;
  /// A mollified atom of this mass is added to the datum when positive.
  double atom_mass = 0.0;
  double atom_width = 0.05;
  double atom_location = 0.0;
};

struct SolverConfig {
  Method method = Method::Automatic;
  Scheme scheme = Scheme::Truncation;
  /// Continuation runs over n = 2^0, ..., 2^schedule_last.
  int schedule_last = 30;
  double residual_tolerance = 1e-10;
  double gap_tolerance = 1e-8;
  int max_iterations = 500;
  double relaxation = 1.0;
};

struct DiagnosticsConfig {
  double truncation_level = 1.0;
  int strip_count = 4;
  int strip_first_cells = 16;
  double threshold_fraction = 0.9;
  double bounded_ratio = 1.1;
  double divergent_ratio = 1.5;
  double min_decay = 0.02;
  double exponent_tolerance = 0.1;
  double error_tolerance = 1e-2;
  double min_order = 1.0;
  double agreement = 1e-6;
  double coefficient_tolerance = 0.1;
  double vanishing_tolerance = 1e-2;
  double annulus_outer = 0.5;
};

struct SweepConfig {
  std::vector<double> gammas;
  std::vector<double> ms;
  std::vector<double> etas;
  std::vector<double> widths;
  std::vector<double> h_infinities;
  double witness_t = 0.55;
  double borderline = 0.05;
  double min_match = 0.9;
  /// 0 means one thread per hardware core.
  int threads = 0;
};

struct OutputConfig {
  /// Relative to the output root; empty means the experiment name.
  std::string directory;
  bool plotdata = true;
};

struct ScenarioConfig {
  /// Experiment run by `scan`; `run` takes the name from the command line.
  std::string experiment;
  GridConfig grid;
  NonlinearityConfig nonlinearity;
  DatumConfig datum;
  SolverConfig solver;
  DiagnosticsConfig diagnostics;
  SweepConfig sweep;
  OutputConfig output;

  SolverOptions solver_options() const;
  RefinementOptions refinement_options() const;
};

/// Every field as ("section.key", value), in a fixed order.
std::vector<std::pair<std::string, std::string>> echo(const ScenarioConfig& cfg);

/// Overlays "section.key" assignments on `base`. Unknown keys and malformed
/// values raise ConfigError.
ScenarioConfig apply_assignments(ScenarioConfig base, const std::vector<std::pair<std::string, std::string>>& kv);

/// Reads an INI file and overlays it on `base`.
ScenarioConfig load_config(const std::filesystem::path& path, ScenarioConfig base = {});

/// Writes the full configuration as an INI file.
void save_config(const std::filesystem::path& path, const ScenarioConfig& cfg);

}  // namespace singlab
