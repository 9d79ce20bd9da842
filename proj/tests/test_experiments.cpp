#include <algorithm>
#include <cmath>
#include <cstring>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <unistd.h>

#include "doctest.h"
#include "singlab/experiments.hpp"

using namespace singlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("singlab-test-" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> data_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);)
    if (!l.empty() && l[0] != '#') out.push_back(l);
  return out;
}

ScenarioConfig quick(const std::string& name) {
  auto c = find_experiment(name).defaults();
  c.output.plotdata = false;
  return c;
}

}  // namespace

TEST_SUITE("experiments_cli") {

TEST_CASE("configuration survives an INI round trip") {
  auto cfg = find_experiment("concentration").defaults();
  cfg.experiment = "concentration";
  cfg.grid.cells = {40, 80};
  cfg.datum.eta = 0.1 + 0.2;
  cfg.sweep.gammas = {0.5, 1.0 / 3.0};
  cfg.solver.method = Method::Newton;
  cfg.solver.scheme = Scheme::Shift;
  const auto dir = scratch("ini");
  save_config(dir / "c.ini", cfg);
  const auto back = load_config(dir / "c.ini");
  CHECK(echo(back) == echo(cfg));
  CHECK(back.datum.eta == cfg.datum.eta);
  CHECK(back.sweep.gammas == cfg.sweep.gammas);
}

TEST_CASE("unknown and malformed keys are rejected") {
  CHECK_THROWS_AS(apply_assignments({}, {{"grid.cellz", "4"}}), ConfigError);
  CHECK_THROWS_AS(apply_assignments({}, {{"grid.cells", "8, x"}}), ConfigError);
  CHECK_THROWS_AS(apply_assignments({}, {{"grid.cells", "64, 32"}}), ConfigError);
  CHECK_THROWS_AS(apply_assignments({}, {{"solver.method", "magic"}}), ConfigError);
  CHECK_THROWS_AS(apply_assignments({}, {{"output.plotdata", "maybe"}}), ConfigError);
  const auto dir = scratch("badini");
  std::ofstream(dir / "bad.ini") << "[grid]\ncells = 16\n[solvr]\nmethod = newton\n";
  CHECK_THROWS_AS(load_config(dir / "bad.ini"), ConfigError);
  CHECK_THROWS_AS(find_experiment("no_such_experiment"), ConfigError);
}

TEST_CASE("every echoed default is accepted back") {
  for (const auto& e : experiment_registry()) {
    const auto d = e.defaults();
    CHECK(echo(apply_assignments({}, echo(d))) == echo(d));
  }
}

TEST_CASE("CSV round trip is bit exact") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::uint64_t> bits;
  Table t({"x", "label"});
  t.header = {{"grid.cells", "16, 32"}, {"note", "a = b"}};
  std::vector<double> xs = {0.0, -0.0, 1.0 / 3.0, std::numeric_limits<double>::denorm_min(),
                            std::numeric_limits<double>::max(), std::numeric_limits<double>::infinity(),
                            -std::numeric_limits<double>::infinity()};
  for (int i = 0; i < 500; ++i) {
    const auto b = bits(rng);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (std::isfinite(v)) xs.push_back(v);
  }
  for (double x : xs) t.add_row({format_number(x), "row"});
  t.add_row({format_number(std::nan("")), "nan"});
  const auto dir = scratch("csv");
  write_csv(dir / "t.csv", t);
  const auto back = read_csv(dir / "t.csv");
  CHECK(back.header == t.header);
  CHECK(back.columns() == t.columns());
  REQUIRE(back.row_count() == t.row_count());
  const auto ys = back.numbers("x");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(std::memcmp(&xs[i], &ys[i], sizeof(double)) == 0);
  }
  CHECK(std::isnan(ys.back()));
  CHECK_THROWS_AS(t.add_row({"1"}), std::invalid_argument);
  CHECK_THROWS_AS(parse_number("1.5x"), std::invalid_argument);
}

TEST_CASE("runs are deterministic regardless of the thread count") {
  auto a = quick("weighted_bound");
  auto b = a;
  a.sweep.threads = 1;
  b.sweep.threads = 4;
  const auto da = scratch("det1"), db = scratch("det4");
  run_experiment("weighted_bound", a, da);
  run_experiment("weighted_bound", b, db);
  auto ta = read_csv(da / "levels.csv"), tb = read_csv(db / "levels.csv");
  // the echoed thread count is the only difference
  auto no_threads = [](auto h) {
    std::erase_if(h, [](const auto& kv) { return kv.first == "sweep.threads"; });
    return h;
  };
  CHECK(no_threads(ta.header) == no_threads(tb.header));
  CHECK(ta.rows() == tb.rows());
  CHECK(data_lines(da / "levels.csv") == data_lines(db / "levels.csv"));
}

TEST_CASE("verify re-derives the verdict of a finished run") {
  for (const char* name : {"weighted_bound", "manufactured_solution", "uniqueness_suite"}) {
    const auto dir = scratch(std::string("verify_") + name);
    const auto run = run_experiment(name, quick(name), dir);
    const auto again = verify_run(dir);
    CHECK(again.passed == run.judgement.passed);
    CHECK(again.lines == run.judgement.lines);
  }
  CHECK_THROWS(verify_run(scratch("empty")));
}

TEST_CASE("verify uses the echoed configuration, not the defaults") {
  auto cfg = quick("weighted_bound");
  const auto dir = scratch("verify_tol");
  const auto run = run_experiment("weighted_bound", cfg, dir);
  REQUIRE(run.judgement.passed);
  // tightening the tolerance in the stored header must flip the verdict
  auto t = read_csv(dir / "levels.csv");
  for (auto& [k, v] : t.header)
    if (k == "diagnostics.exponent_tolerance") v = "1e-9";
  write_csv(dir / "levels.csv", t);
  CHECK_FALSE(verify_run(dir).passed);
}

TEST_CASE("plot data for energy against h") {
  auto cfg = find_experiment("weighted_bound").defaults();
  cfg.datum.eta = 0.4;
  const auto dir = scratch("plot");
  const auto res = run_experiment("weighted_bound", cfg, dir);
  const auto lines = data_lines(dir / "plot" / "levels__energy.dat");
  REQUIRE(lines.size() == 4);
  const auto h = artifact(res.artifacts, "levels").numbers("h");
  const auto e = artifact(res.artifacts, "levels").numbers("energy");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::istringstream in(lines[i]);
    std::string x, y, extra;
    in >> x >> y;
    CHECK_FALSE(static_cast<bool>(in >> extra));
    CHECK(parse_number(x) == h[i]);
    CHECK(parse_number(y) == e[i]);
  }
  CHECK(slurp(dir / "plot" / "manifest.txt").find("levels__energy.dat h energy 4") != std::string::npos);
}

TEST_CASE("scan excludes borderline points from the match fraction") {
  auto cfg = scan_defaults("threshold_scan_sharp");
  cfg.grid.cells = {64, 128, 256, 512};
  cfg.sweep.gammas = {1.0, 1.98, 2.6};
  cfg.sweep.ms = {2.0};
  cfg.output.plotdata = false;
  const auto dir = scratch("scan");
  const auto res = run_scan(cfg, dir);
  const auto status = res.table.strings("status");
  REQUIRE(status.size() == 3);
  CHECK(status[0] == "ok");
  CHECK(status[1] == "borderline");
  CHECK(status[2] == "ok");
  CHECK(res.judgement.passed);
  CHECK(res.judgement.lines.front().find("2 of 2") == 0);
  CHECK(read_csv(dir / "scan.csv").row_count() == 3);
}

TEST_CASE("scan records failed rows and keeps going") {
  auto cfg = scan_defaults("threshold_scan_34");
  cfg.grid.cells = {31, 63, 127, 255};
  cfg.sweep.gammas = {1.2, 1.3};
  cfg.sweep.ms = {4.0};
  cfg.solver.max_iterations = 1;
  cfg.output.plotdata = false;
  const auto dir = scratch("scanfail");
  const auto res = run_scan(cfg, dir);
  for (const auto& s : res.table.strings("status")) CHECK(s.rfind("error: ", 0) == 0);
  CHECK_FALSE(res.judgement.passed);
  CHECK(read_csv(dir / "scan.csv").row_count() == 2);
  CHECK_THROWS_AS(scan_defaults("concentration"), ConfigError);
}

TEST_CASE("registry entries are complete and unique") {
  std::set<std::string> names;
  for (const auto& e : experiment_registry()) {
    CHECK_FALSE(e.anchor.empty());
    CHECK_FALSE(e.rule.empty());
    CHECK(e.defaults);
    CHECK(e.compute);
    CHECK(e.judge);
    CHECK(names.insert(e.name).second);
  }
  CHECK(names.size() == 11);
}

TEST_CASE("solver failures and bad data surface as typed errors") {
  auto cfg = quick("weighted_bound");
  cfg.solver.max_iterations = 1;
  CHECK_THROWS_AS(solve_level(cfg, 64), SolverError);
  auto bad = quick("weighted_bound");
  bad.grid.domain = DomainKind::Interval;
  bad.grid.dimension = 1;
  CHECK_THROWS_AS(solve_level(bad, 63), ConfigError);
  NonlinearityConfig n;
  n.family = "cubic";
  CHECK_THROWS_AS(build_nonlinearity(n), ConfigError);
  DatumConfig d;
  d.kind = "dirac";
  CHECK_THROWS_AS(build_datum(d, 1.0), ConfigError);
}

TEST_CASE("parallel_for covers every index and reports the first failure") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 8, [&](std::size_t i) { hits[i] += 1; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  try {
    parallel_for(100, 8, [](std::size_t i) {
      if (i % 10 == 3) throw std::runtime_error(std::to_string(i));
    });
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "3");
  }
}

TEST_CASE("output root follows the environment") {
  ::setenv("SINGLAB_OUTPUT_ROOT", "/tmp/elsewhere", 1);
  CHECK(output_root() == fs::path("/tmp/elsewhere"));
  ::unsetenv("SINGLAB_OUTPUT_ROOT");
  CHECK(output_root() == fs::path("singlab-output"));
}

}
