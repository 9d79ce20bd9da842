#include "singlab/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "singlab/table.hpp"

namespace singlab {

namespace {

struct Field {
  std::string key;
  std::function<std::string(const ScenarioConfig&)> get;
  std::function<void(ScenarioConfig&, const std::string&)> set;
};

double to_double(const std::string& key, const std::string& v) {
  try {
    return parse_number(v);
  } catch (const std::invalid_argument&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != static_cast<int>(d)) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return static_cast<int>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    const auto b = item.find_last_not_of(" \t");
    out.push_back(to_double(key, item.substr(a, b - a + 1)));
  }
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + format_number(xs[i]);
  return s;
}

template <class T>
Field number(std::string key, T ScenarioConfig::*section, double T::*member) {
  return {key, [=](const ScenarioConfig& c) { return format_number(c.*section.*member); },
          [=](ScenarioConfig& c, const std::string& v) { c.*section.*member = to_double(key, v); }};
}

template <class T>
Field integer(std::string key, T ScenarioConfig::*section, int T::*member) {
  return {key, [=](const ScenarioConfig& c) { return std::to_string(c.*section.*member); },
          [=](ScenarioConfig& c, const std::string& v) { c.*section.*member = to_int(key, v); }};
}

template <class T>
Field text(std::string key, T ScenarioConfig::*section, std::string T::*member) {
  return {key, [=](const ScenarioConfig& c) { return c.*section.*member; },
          [=](ScenarioConfig& c, const std::string& v) { c.*section.*member = v; }};
}

template <class T>
Field list(std::string key, T ScenarioConfig::*section, std::vector<double> T::*member) {
  return {key, [=](const ScenarioConfig& c) { return join(c.*section.*member); },
          [=](ScenarioConfig& c, const std::string& v) { c.*section.*member = to_list(key, v); }};
}

const std::vector<Field>& fields() {
  using S = ScenarioConfig;
  static const std::vector<Field> f = {
      {"run.experiment", [](const S& c) { return c.experiment; }, [](S& c, const std::string& v) { c.experiment = v; }},
      {"grid.domain", [](const S& c) { return to_string(c.grid.domain); },
       [](S& c, const std::string& v) {
         try {
           c.grid.domain = parse_domain_kind(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(std::string("grid.domain: ") + e.what());
         }
       }},
      integer("grid.dimension", &S::grid, &GridConfig::dimension),
      {"grid.cells",
       [](const S& c) {
         std::vector<double> d(c.grid.cells.begin(), c.grid.cells.end());
         return join(d);
       },
       [](S& c, const std::string& v) {
         c.grid.cells.clear();
         for (double d : to_list("grid.cells", v)) {
           if (d != static_cast<int>(d) || d < 4) throw ConfigError("grid.cells: expected integers >= 4");
           c.grid.cells.push_back(static_cast<int>(d));
         }
       }},
      number("grid.coefficient", &S::grid, &GridConfig::coefficient),
      text("nonlinearity.family", &S::nonlinearity, &NonlinearityConfig::family),
      number("nonlinearity.gamma", &S::nonlinearity, &NonlinearityConfig::gamma),
      number("nonlinearity.theta", &S::nonlinearity, &NonlinearityConfig::theta),
      number("nonlinearity.h_infinity", &S::nonlinearity, &NonlinearityConfig::h_infinity),
      number("nonlinearity.k1", &S::nonlinearity, &NonlinearityConfig::k1),
      number("nonlinearity.cap", &S::nonlinearity, &NonlinearityConfig::cap),
      number("nonlinearity.center", &S::nonlinearity, &NonlinearityConfig::center),
      number("nonlinearity.width", &S::nonlinearity, &NonlinearityConfig::width),
      number("nonlinearity.height", &S::nonlinearity, &NonlinearityConfig::height),
      text("datum.kind", &S::datum, &DatumConfig::kind),
      number("datum.exponent", &S::datum, &DatumConfig::exponent),
      number("datum.scale", &S::datum, &DatumConfig::scale),
      number("datum.eta", &S::datum, &DatumConfig::eta),
      number("datum.m", &S::datum, &DatumConfig::m),
      number("datum.a", &S::datum, &DatumConfig::a),
      number("datum.atom_mass", &S::datum, &DatumConfig::atom_mass),
      number("datum.atom_width", &S::datum, &DatumConfig::atom_width),
      number("datum.atom_location", &S::datum, &DatumConfig::atom_location),
      {"solver.method", [](const S& c) { return to_string(c.solver.method); },
       [](S& c, const std::string& v) {
         try {
           c.solver.method = parse_method(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(std::string("solver.method: ") + e.what());
         }
       }},
      {"solver.scheme", [](const S& c) { return to_string(c.solver.scheme); },
       [](S& c, const std::string& v) {
         try {
           c.solver.scheme = parse_scheme(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(std::string("solver.scheme: ") + e.what());
         }
       }},
      integer("solver.schedule_last", &S::solver, &SolverConfig::schedule_last),
      number("solver.residual_tolerance", &S::solver, &SolverConfig::residual_tolerance),
      number("solver.gap_tolerance", &S::solver, &SolverConfig::gap_tolerance),
      integer("solver.max_iterations", &S::solver, &SolverConfig::max_iterations),
      number("solver.relaxation", &S::solver, &SolverConfig::relaxation),
      number("diagnostics.truncation_level", &S::diagnostics, &DiagnosticsConfig::truncation_level),
      integer("diagnostics.strip_count", &S::diagnostics, &DiagnosticsConfig::strip_count),
      integer("diagnostics.strip_first_cells", &S::diagnostics, &DiagnosticsConfig::strip_first_cells),
      number("diagnostics.threshold_fraction", &S::diagnostics, &DiagnosticsConfig::threshold_fraction),
      number("diagnostics.bounded_ratio", &S::diagnostics, &DiagnosticsConfig::bounded_ratio),
      number("diagnostics.divergent_ratio", &S::diagnostics, &DiagnosticsConfig::divergent_ratio),
      number("diagnostics.min_decay", &S::diagnostics, &DiagnosticsConfig::min_decay),
      number("diagnostics.exponent_tolerance", &S::diagnostics, &DiagnosticsConfig::exponent_tolerance),
      number("diagnostics.error_tolerance", &S::diagnostics, &DiagnosticsConfig::error_tolerance),
      number("diagnostics.min_order", &S::diagnostics, &DiagnosticsConfig::min_order),
      number("diagnostics.agreement", &S::diagnostics, &DiagnosticsConfig::agreement),
      number("diagnostics.coefficient_tolerance", &S::diagnostics, &DiagnosticsConfig::coefficient_tolerance),
      number("diagnostics.vanishing_tolerance", &S::diagnostics, &DiagnosticsConfig::vanishing_tolerance),
      number("diagnostics.annulus_outer", &S::diagnostics, &DiagnosticsConfig::annulus_outer),
      list("sweep.gammas", &S::sweep, &SweepConfig::gammas),
      list("sweep.ms", &S::sweep, &SweepConfig::ms),
      list("sweep.etas", &S::sweep, &SweepConfig::etas),
      list("sweep.widths", &S::sweep, &SweepConfig::widths),
      list("sweep.h_infinities", &S::sweep, &SweepConfig::h_infinities),
      number("sweep.witness_t", &S::sweep, &SweepConfig::witness_t),
      number("sweep.borderline", &S::sweep, &SweepConfig::borderline),
      number("sweep.min_match", &S::sweep, &SweepConfig::min_match),
      integer("sweep.threads", &S::sweep, &SweepConfig::threads),
      text("output.directory", &S::output, &OutputConfig::directory),
      {"output.plotdata", [](const S& c) { return format_bool(c.output.plotdata); },
       [](S& c, const std::string& v) { c.output.plotdata = to_bool("output.plotdata", v); }},
  };
  return f;
}

void validate(const ScenarioConfig& c) {
  if (c.grid.cells.empty()) throw ConfigError("grid.cells must not be empty");
  for (std::size_t i = 1; i < c.grid.cells.size(); ++i)
    if (c.grid.cells[i] <= c.grid.cells[i - 1]) throw ConfigError("grid.cells must increase");
  if (c.grid.domain == DomainKind::Interval && c.grid.dimension != 1)
    throw ConfigError("grid.dimension must be 1 on the interval");
  if (c.grid.domain == DomainKind::RadialBall && c.grid.dimension < 2)
    throw ConfigError("grid.dimension must be at least 2 on the ball");
  if (!(c.grid.coefficient > 0.0)) throw ConfigError("grid.coefficient must be positive");
  if (c.solver.schedule_last < 0 || c.solver.schedule_last > 60) throw ConfigError("solver.schedule_last must lie in [0, 60]");
  if (c.solver.max_iterations < 1) throw ConfigError("solver.max_iterations must be positive");
  if (!(c.solver.relaxation > 0.0 && c.solver.relaxation <= 1.0)) throw ConfigError("solver.relaxation must lie in (0, 1]");
  if (!(c.solver.residual_tolerance > 0.0) || !(c.solver.gap_tolerance > 0.0))
    throw ConfigError("solver tolerances must be positive");
  if (c.diagnostics.strip_count < 2) throw ConfigError("diagnostics.strip_count must be at least 2");
  if (c.diagnostics.strip_first_cells < 4) throw ConfigError("diagnostics.strip_first_cells must be at least 4");
  if (c.sweep.threads < 0) throw ConfigError("sweep.threads must be nonnegative");
}

}  // namespace

SolverOptions ScenarioConfig::solver_options() const {
  SolverOptions o;
  o.method = solver.method;
  o.residual_tolerance = solver.residual_tolerance;
  o.gap_tolerance = solver.gap_tolerance;
  o.max_iterations = solver.max_iterations;
  o.relaxation = solver.relaxation;
  return o;
}

RefinementOptions ScenarioConfig::refinement_options() const {
  RefinementOptions o;
  o.bounded_ratio = diagnostics.bounded_ratio;
  o.divergent_ratio = diagnostics.divergent_ratio;
  o.min_decay = diagnostics.min_decay;
  return o;
}

std::vector<std::pair<std::string, std::string>> echo(const ScenarioConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(cfg));
  return out;
}

ScenarioConfig apply_assignments(ScenarioConfig base, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::map<std::string, const Field*> index;
  for (const auto& f : fields()) index[f.key] = &f;
  for (const auto& [k, v] : kv) {
    const auto it = index.find(k);
    if (it == index.end()) throw ConfigError("unknown configuration key '" + k + "'");
    it->second->set(base, v);
  }
  validate(base);
  return base;
}

ScenarioConfig load_config(const std::filesystem::path& path, ScenarioConfig base) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  std::vector<std::pair<std::string, std::string>> kv;
  for (const auto& [section, node] : tree) {
    if (node.empty()) throw ConfigError("key '" + section + "' must sit inside a section");
    for (const auto& [key, leaf] : node) kv.emplace_back(section + "." + key, leaf.get_value<std::string>());
  }
  return apply_assignments(std::move(base), kv);
}

void save_config(const std::filesystem::path& path, const ScenarioConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::string section;
  for (const auto& [k, v] : echo(cfg)) {
    const auto dot = k.find('.');
    const auto s = k.substr(0, dot);
    if (s != section) {
      out << (section.empty() ? "" : "\n") << '[' << s << "]\n";
      section = s;
    }
    out << k.substr(dot + 1) << " = " << v << '\n';
  }
}

}  // namespace singlab
