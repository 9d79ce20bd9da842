#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "singlab/config.hpp"
#include "singlab/datum.hpp"
#include "singlab/diagnostics.hpp"
#include "singlab/solver.hpp"
#include "singlab/table.hpp"

namespace singlab {

/// Named tables produced by one experiment, in output order.
using Artifacts = std::vector<std::pair<std::string, Table>>;

const Table& artifact(const Artifacts& artifacts, const std::string& name);

struct Judgement {
  bool passed = false;
  std::vector<std::string> lines;
};

struct Experiment {
  std::string name;
  std::string anchor;
  std::string rule;
  std::function<ScenarioConfig()> defaults;
  std::function<Artifacts(const ScenarioConfig&)> compute;
  /// Pure function of the tables and the configuration.
  std::function<Judgement(const Artifacts&, const ScenarioConfig&)> judge;
};

const std::vector<Experiment>& experiment_registry();
/// Throws ConfigError for unknown names.
const Experiment& find_experiment(const std::string& name);

NonlinearitySpec build_nonlinearity(const NonlinearityConfig& cfg);
Datum build_datum(const DatumConfig& cfg, double gamma);
DiscreteOperator build_operator(const GridConfig& cfg, int cells);

struct LevelSolution {
  DiscreteOperator op;
  std::vector<double> f;
  ContinuationResult result;
};

/// Continuation along 2^0..2^schedule_last on one grid. Throws SolverError
/// when some level does not converge.
LevelSolution solve_level(const ScenarioConfig& cfg, int cells);

/// $SINGLAB_OUTPUT_ROOT, or ./singlab-output when unset.
std::filesystem::path output_root();

struct RunResult {
  Judgement judgement;
  std::filesystem::path directory;
  Artifacts artifacts;
};

/// Computes, writes <dir>/<table>.csv, verdict.txt and (optionally) plot data,
/// then judges.
RunResult run_experiment(const std::string& name, const ScenarioConfig& cfg, const std::filesystem::path& dir);

/// Re-judges a finished run from its CSV files alone.
Judgement verify_run(const std::filesystem::path& dir);

/// Writes whitespace-delimited x/y files under <dir>/plot plus manifest.txt.
/// Returns the number of curve files.
std::size_t emit_plotdata(const Artifacts& artifacts, const std::filesystem::path& dir);

/// Parameter scan over sweep.gammas x sweep.ms for the threshold experiments.
struct ScanResult {
  Table table;
  Judgement judgement;
};

/// Experiments that support scans.
bool scannable(const std::string& name);
/// Defaults of the experiment overlaid with the default scan grid.
ScenarioConfig scan_defaults(const std::string& name);
ScanResult run_scan(const ScenarioConfig& cfg, const std::filesystem::path& dir);

/// Runs fn(0..count-1) on up to `threads` workers (0: hardware concurrency).
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace singlab
