#include "singlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace singlab {

namespace {

using Row = std::vector<std::string>;
using Cols = std::vector<std::string>;

std::string num(double v) { return format_number(v); }

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

std::string list_text(const std::vector<double>& xs) {
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + fixed(xs[i]);
  return s + "]";
}

const Cols kLevelColumns = {"cells",          "h",           "energy",         "truncation_energy",
                            "truncation_energy_power", "gk_q1", "gk_q", "q",
                            "lower_plain",    "lower_weighted", "operator_plain", "operator_weighted",
                            "source_work",    "sup_u",       "final_n",        "residual",
                            "last_increment", "cauchy"};

Row level_row(const ScenarioConfig& cfg, const NonlinearitySpec& spec, const LevelSolution& s) {
  const auto d = diagnose_level(s.op, spec, s.f, s.result.u, cfg.diagnostics.truncation_level);
  const auto& snaps = s.result.snapshots;
  return {std::to_string(d.cells),  num(d.h),
          num(d.energy),            num(d.truncation_energy),
          num(d.truncation_energy_power), num(d.gk_q1),
          num(d.gk_q),              num(d.q),
          num(d.lower_plain),       num(d.lower_weighted),
          num(d.operator_plain),    num(d.operator_weighted),
          num(d.source_work),       num(d.sup_u),
          num(s.result.final_n),    num(snaps.empty() ? 0.0 : snaps.back().residual),
          num(s.result.increments.empty() ? 0.0 : s.result.increments.back()),
          format_bool(s.result.cauchy)};
}

struct Point {
  Row keys;
  ScenarioConfig cfg;
};

using Extra = std::function<Row(const ScenarioConfig&, const LevelSolution&)>;

struct Study {
  Table table;
  /// Finest-level solution for each point.
  std::vector<LevelSolution> finest;
};

Study level_study(const Cols& key_cols, const std::vector<Point>& points, const Cols& extra_cols, const Extra& extra,
                  int threads) {
  Cols cols = key_cols;
  cols.insert(cols.end(), kLevelColumns.begin(), kLevelColumns.end());
  cols.insert(cols.end(), extra_cols.begin(), extra_cols.end());

  struct Job {
    std::size_t point, level;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < points.size(); ++p)
    for (std::size_t l = 0; l < points[p].cfg.grid.cells.size(); ++l) jobs.push_back({p, l});
  std::vector<Row> rows(jobs.size());
  std::vector<std::optional<LevelSolution>> finest(points.size());

  parallel_for(jobs.size(), threads, [&](std::size_t j) {
    const auto& pt = points[jobs[j].point];
    const auto spec = build_nonlinearity(pt.cfg.nonlinearity);
    auto sol = solve_level(pt.cfg, pt.cfg.grid.cells[jobs[j].level]);
    Row r = pt.keys;
    const Row lv = level_row(pt.cfg, spec, sol);
    r.insert(r.end(), lv.begin(), lv.end());
    if (extra) {
      const Row ex = extra(pt.cfg, sol);
      r.insert(r.end(), ex.begin(), ex.end());
    }
    rows[j] = std::move(r);
    if (jobs[j].level + 1 == pt.cfg.grid.cells.size()) finest[jobs[j].point] = std::move(sol);
  });

  Study s{Table(cols), {}};
  for (auto& r : rows) s.table.add_row(std::move(r));
  for (auto& f : finest) s.finest.push_back(std::move(*f));
  return s;
}

Table indicator_table(const Cols& key_cols, const std::vector<Row>& keys, const std::vector<const LevelSolution*>& sols,
                      const ScenarioConfig& cfg) {
  Cols cols = key_cols;
  cols.insert(cols.end(), {"eps", "value"});
  Table t(cols);
  for (std::size_t p = 0; p < sols.size(); ++p) {
    const auto& g = sols[p]->op.grid();
    const auto eps = aligned_strip_widths(g, cfg.diagnostics.strip_count, cfg.diagnostics.strip_first_cells);
    for (double e : eps) {
      Row r = keys[p];
      r.push_back(num(e));
      r.push_back(num(boundary_strip_integral(g, sols[p]->result.u, e)));
      t.add_row(std::move(r));
    }
  }
  return t;
}

Table continuation_table(const LevelSolution& s) {
  Table t({"n", "iterations", "residual", "gap", "increment"});
  const auto& snaps = s.result.snapshots;
  for (std::size_t j = 0; j < snaps.size(); ++j)
    t.add_row({num(snaps[j].n), std::to_string(snaps[j].iterations), num(snaps[j].residual), num(snaps[j].gap),
               num(j == 0 ? std::nan("") : s.result.increments[j - 1])});
  return t;
}

RefinementVerdict refine(const Table& t, const std::string& column, const ScenarioConfig& cfg) {
  return classify_refinement(t.numbers("h"), t.numbers(column), cfg.refinement_options());
}

std::string describe(const RefinementVerdict& v) {
  return to_string(v.verdict) + " (ratios " + list_text(v.ratios) + ", exponent " + fixed(v.exponent) + ")";
}

double integral(const Grid& g, const std::function<double(std::size_t)>& fn) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.weights()[i] * fn(i);
  return s;
}

ScenarioConfig base(DomainKind kind, int N, std::vector<int> cells) {
  ScenarioConfig c;
  c.grid.domain = kind;
  c.grid.dimension = N;
  c.grid.cells = std::move(cells);
  return c;
}

const std::vector<int> kBallLevels = {128, 256, 512, 1024};
const std::vector<int> kLineLevels = {127, 255, 511, 1023};

bool near_threshold(double gamma, double threshold, double fraction) {
  return std::abs(gamma - threshold) <= fraction * std::abs(threshold);
}

// ---------------------------------------------------------------------------
// manufactured_solution

ScenarioConfig manufactured_defaults() {
  auto c = base(DomainKind::RadialBall, 2, {64, 128, 256, 512});
  c.nonlinearity.gamma = 1.0;
  c.datum.kind = "example_ex";
  c.datum.eta = 0.8;
  c.solver.schedule_last = 10;
  return c;
}

Artifacts manufactured_compute(const ScenarioConfig& cfg) {
  if (cfg.datum.kind != "example_ex") throw ConfigError("manufactured_solution needs datum.kind = example_ex");
  const double eta = cfg.datum.eta;
  auto st = level_study({}, {{{}, cfg}}, {"max_rel_error", "max_abs_error"},
                        [eta](const ScenarioConfig&, const LevelSolution& s) {
                          double rel = 0.0, abs = 0.0;
                          const auto r = s.op.grid().nodes();
                          for (std::size_t i = 0; i < r.size(); ++i) {
                            const double ex = example_ex_solution(eta, r[i]);
                            const double e = std::abs(s.result.u[i] - ex);
                            abs = std::max(abs, e);
                            rel = std::max(rel, e / ex);
                          }
                          return Row{num(rel), num(abs)};
                        },
                        cfg.sweep.threads);
  Artifacts a;
  a.emplace_back("levels", std::move(st.table));
  a.emplace_back("indicator", indicator_table({}, {{}}, {&st.finest[0]}, cfg));
  a.emplace_back("continuation", continuation_table(st.finest[0]));
  return a;
}

Judgement manufactured_judge(const Artifacts& a, const ScenarioConfig& cfg) {
  const auto& t = artifact(a, "levels");
  const auto h = t.numbers("h");
  const auto err = t.numbers("max_rel_error");
  const double order = loglog_slope(h, err);
  Judgement j;
  const bool accurate = err.back() <= cfg.diagnostics.error_tolerance;
  const bool ordered = order >= cfg.diagnostics.min_order;
  j.lines.push_back("max relative error on " + t.strings("cells").back() + " cells: " + fixed(err.back()) +
                    " (limit " + fixed(cfg.diagnostics.error_tolerance) + ")");
  j.lines.push_back("fitted order " + fixed(order) + " (required >= " + fixed(cfg.diagnostics.min_order) + ")");
  j.passed = accurate && ordered;
  return j;
}

// ---------------------------------------------------------------------------
// threshold scans

double sharp_eta(double gamma, double m) { return std::min(1.0, (2.0 - 1.0 / m) / (gamma + 1.0)); }

std::vector<Point> sharp_points(const ScenarioConfig& cfg) {
  std::vector<Point> pts;
  for (double g : cfg.sweep.gammas)
    for (double m : cfg.sweep.ms) {
      ScenarioConfig c = cfg;
      c.nonlinearity.family = "model";
      c.nonlinearity.gamma = g;
      c.datum.kind = "example_ex";
      c.datum.eta = sharp_eta(g, m);
      pts.push_back({{num(g), num(m), num(c.datum.eta)}, c});
    }
  return pts;
}

std::vector<Point> sufficient_points(const ScenarioConfig& cfg) {
  std::vector<Point> pts;
  for (double g : cfg.sweep.gammas)
    for (double m : cfg.sweep.ms) {
      ScenarioConfig c = cfg;
      c.nonlinearity.family = "model";
      c.nonlinearity.gamma = g;
      c.datum.kind = "power_of_distance";
      c.datum.exponent = -0.9 / m;
      pts.push_back({{num(g), num(m), num(c.datum.exponent)}, c});
    }
  return pts;
}

struct PointVerdict {
  double gamma = 0, m = 0, threshold = 0;
  bool borderline = false;
  bool covered = true;
  std::string expected;
  RefinementVerdict verdict;
  bool match = false;
  bool passed = false;
  std::string line;
};

Table point_rows(const Table& t, double gamma, double m) {
  Table out(t.columns());
  const auto g = t.numbers("gamma"), ms = t.numbers("m");
  for (std::size_t i = 0; i < t.row_count(); ++i)
    if (g[i] == gamma && ms[i] == m) out.add_row(t.rows()[i]);
  return out;
}

PointVerdict judge_sharp_point(const Table& pt, double gamma, double m, const ScenarioConfig& cfg, bool strict) {
  PointVerdict p;
  p.gamma = gamma;
  p.m = m;
  p.threshold = 3.0 - 2.0 / m;
  const double eta = pt.numbers("eta").front();
  p.borderline = near_threshold(gamma, p.threshold, cfg.sweep.borderline);
  // For this datum family, finite energy is equivalent to eta > 1/2.
  const bool finite = eta > 0.5;
  p.expected = finite ? "bounded" : "divergent";
  p.verdict = refine(pt, "energy", cfg);
  p.match = to_string(p.verdict.verdict) == p.expected;
  p.passed = p.match;
  std::string extra;
  if (!finite && strict) {
    const double predicted = 2.0 * eta - 1.0;
    const bool ratios_ok = std::all_of(p.verdict.ratios.begin(), p.verdict.ratios.end(),
                                       [&](double q) { return q >= cfg.diagnostics.divergent_ratio; });
    const bool exp_ok = std::abs(p.verdict.exponent - predicted) <= cfg.diagnostics.exponent_tolerance;
    p.passed = p.match && ratios_ok && exp_ok;
    extra = "; predicted exponent " + fixed(predicted) + (exp_ok ? " matched" : " missed") + "; every ratio >= " +
            fixed(cfg.diagnostics.divergent_ratio) + ": " + (ratios_ok ? "yes" : "no");
  }
  p.line = "gamma=" + fixed(gamma) + " m=" + fixed(m) + " eta=" + fixed(eta) + " threshold=" + fixed(p.threshold) +
           (p.borderline ? " [borderline, excluded]" : "") + ": energy " + describe(p.verdict) + ", expected " +
           p.expected + extra;
  return p;
}

PointVerdict judge_sufficient_point(const Table& pt, double gamma, double m, const ScenarioConfig& cfg) {
  PointVerdict p;
  p.gamma = gamma;
  p.m = m;
  p.threshold = 2.0 - 1.0 / m;
  p.borderline = near_threshold(gamma, p.threshold, cfg.sweep.borderline);
  p.covered = gamma > 1.0 && gamma < p.threshold;
  p.expected = p.covered ? "bounded" : "not-claimed";
  p.verdict = refine(pt, "energy", cfg);
  p.match = !p.covered || p.verdict.verdict == Verdict::Bounded;
  p.passed = p.match;
  p.line = "gamma=" + fixed(gamma) + " m=" + fixed(m) + " threshold=" + fixed(p.threshold) +
           (p.borderline ? " [borderline, excluded]" : "") + ": energy " + describe(p.verdict) + ", expected " +
           p.expected;
  return p;
}

Judgement judge_points(const Table& t, const ScenarioConfig& cfg, bool sharp) {
  Judgement j;
  const auto gs = t.numbers("gamma"), ms = t.numbers("m");
  std::vector<std::pair<double, double>> seen;
  int judged = 0;
  bool ok = true;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    if (std::find(seen.begin(), seen.end(), std::pair{gs[i], ms[i]}) != seen.end()) continue;
    seen.emplace_back(gs[i], ms[i]);
    const auto pt = point_rows(t, gs[i], ms[i]);
    const auto p = sharp ? judge_sharp_point(pt, gs[i], ms[i], cfg, true) : judge_sufficient_point(pt, gs[i], ms[i], cfg);
    j.lines.push_back(p.line);
    if (p.borderline || !p.covered) continue;
    ++judged;
    ok = ok && p.passed;
  }
  j.passed = ok && judged > 0;
  if (judged == 0) j.lines.push_back("no parameter point outside the borderline band");
  return j;
}

ScenarioConfig sharp_defaults() {
  auto c = base(DomainKind::RadialBall, 2, kBallLevels);
  c.datum.kind = "example_ex";
  c.sweep.gammas = {1.5, 1.8, 2.2, 2.5};
  c.sweep.ms = {2.0};
  return c;
}

Artifacts sharp_compute(const ScenarioConfig& cfg) {
  auto st = level_study({"gamma", "m", "eta"}, sharp_points(cfg), {}, {}, cfg.sweep.threads);
  return {{"levels", std::move(st.table)}};
}

ScenarioConfig sufficient_defaults() {
  auto c = base(DomainKind::Interval, 1, kLineLevels);
  c.datum.kind = "power_of_distance";
  c.sweep.gammas = {1.2, 1.4, 1.6, 1.8};
  c.sweep.ms = {2.0, 4.0};
  return c;
}

Artifacts sufficient_compute(const ScenarioConfig& cfg) {
  auto st = level_study({"gamma", "m", "exponent"}, sufficient_points(cfg), {}, {}, cfg.sweep.threads);
  return {{"levels", std::move(st.table)}};
}

// ---------------------------------------------------------------------------
// energy_always_L1

ScenarioConfig mild_defaults() {
  auto c = base(DomainKind::Interval, 1, kLineLevels);
  c.nonlinearity.family = "two_power";
  c.nonlinearity.gamma = 0.5;
  c.nonlinearity.theta = 1.2;
  c.datum.kind = "power_of_distance";
  c.datum.exponent = -0.9;
  return c;
}

Row datum_l1(const ScenarioConfig&, const LevelSolution& s) {
  return {num(integral(s.op.grid(), [&](std::size_t i) { return s.f[i]; }))};
}

Artifacts mild_compute(const ScenarioConfig& cfg) {
  auto st = level_study({}, {{{}, cfg}}, {"datum_l1"}, datum_l1, cfg.sweep.threads);
  return {{"levels", std::move(st.table)}, {"continuation", continuation_table(st.finest[0])}};
}

Judgement mild_judge(const Artifacts& a, const ScenarioConfig& cfg) {
  const auto& t = artifact(a, "levels");
  const auto e = refine(t, "energy", cfg);
  const auto d = refine(t, "datum_l1", cfg);
  Judgement j;
  j.lines.push_back("datum L1 norm: " + describe(d));
  j.lines.push_back("energy: " + describe(e));
  j.passed = d.verdict == Verdict::Bounded && e.verdict == Verdict::Bounded &&
             e.ratios.back() <= cfg.diagnostics.bounded_ratio;
  return j;
}

// ---------------------------------------------------------------------------
// strong_singularity_counterexample

ScenarioConfig strong_defaults() {
  auto c = base(DomainKind::RadialBall, 3, kBallLevels);
  c.nonlinearity.gamma = 0.5;
  c.datum.kind = "example_luigi";
  c.datum.a = 2.6;
  // the datum reaches ~1e10 in the innermost shell at 1024 cells
  c.solver.schedule_last = 40;
  return c;
}

Artifacts strong_compute(const ScenarioConfig& cfg) {
  const int N = cfg.grid.dimension;
  const double gamma = cfg.nonlinearity.gamma;
  const double q = N * (gamma + 1.0) / (N + 2.0 * gamma);
  auto st = level_study({}, {{{}, cfg}}, {"fu_gamma", "f_lq", "datum_l1"},
                        [q](const ScenarioConfig& c, const LevelSolution& s) {
                          const auto spec = build_nonlinearity(c.nonlinearity);
                          const auto& u = s.result.u;
                          const auto& g = s.op.grid();
                          // -Laplace u = h(u) g; the product below is f u^gamma with f = h(u) g.
                          const double fu = integral(g, [&](std::size_t i) {
                            return spec(u[i]) * s.f[i] * std::pow(u[i], c.nonlinearity.gamma);
                          });
                          const double flq = integral(g, [&](std::size_t i) { return std::pow(spec(u[i]) * s.f[i], q); });
                          return Row{num(fu), num(flq), datum_l1(c, s)[0]};
                        },
                        cfg.sweep.threads);
  return {{"levels", std::move(st.table)}};
}

Judgement strong_judge(const Artifacts& a, const ScenarioConfig& cfg) {
  const auto& t = artifact(a, "levels");
  const int N = cfg.grid.dimension;
  const double gamma = cfg.nonlinearity.gamma;
  const double q = N * (gamma + 1.0) / (N + 2.0 * gamma);
  const auto e = refine(t, "energy", cfg);
  const auto fu = refine(t, "fu_gamma", cfg);
  const auto flq = refine(t, "f_lq", cfg);
  Judgement j;
  j.lines.push_back("q = N(gamma+1)/(N+2gamma) = " + fixed(q));
  j.lines.push_back("energy: " + describe(e) + ", required divergent");
  j.lines.push_back("integral of f u^gamma: " + describe(fu) + ", required bounded");
  j.lines.push_back("integral of f^q: " + describe(flq));
  j.passed = e.verdict == Verdict::Divergent && fu.verdict == Verdict::Bounded;
  return j;
}

// ---------------------------------------------------------------------------
// L1_lower_order

ScenarioConfig lower_defaults() {
  auto c = base(DomainKind::RadialBall, 2, kBallLevels);
  c.nonlinearity.gamma = 0.5;
  c.datum.m = 3.0;
  c.datum.eta = 0.8;
  c.datum.a = 2.0;
  return c;
}

std::vector<Point> lower_points(const ScenarioConfig& cfg) {
  ScenarioConfig lm = cfg, ex = cfg, lw = cfg;
  lm.datum.kind = "power_of_distance";
  lm.datum.exponent = -1.0 / (2.0 * cfg.datum.m);
  lm.datum.scale = 1.0;
  ex.datum.kind = "example_ex";
  lw.datum.kind = "log_weight";
  return {{{"lm"}, lm}, {{"example_ex"}, ex}, {{"log_weight"}, lw}};
}

Artifacts lower_compute(const ScenarioConfig& cfg) {
  auto st = level_study({"case"}, lower_points(cfg), {}, {}, cfg.sweep.threads);
  return {{"levels", std::move(st.table)}};
}

Judgement lower_judge(const Artifacts& a, const ScenarioConfig& cfg) {
  const auto& t = artifact(a, "levels");
  const double gamma = cfg.nonlinearity.gamma, eta = cfg.datum.eta, m = cfg.datum.m;
  const auto lm = refine(t.where("case", "lm"), "lower_plain", cfg);
  const auto ex = refine(t.where("case", "example_ex"), "lower_plain", cfg);
  const auto lw = refine(t.where("case", "log_weight"), "lower_plain", cfg);
  const double needed = 1.0 / (1.0 - gamma);
  const double ex_m = 1.0 / (2.0 - eta - eta * gamma);
  Judgement j;
  j.lines.push_back("integrability exponent needed: m > " + fixed(needed));
  j.lines.push_back("distance-power datum in L^" + fixed(m) + ": " + describe(lm) + ", required bounded");
  j.lines.push_back("manufactured datum, in L^m only for m < " + fixed(ex_m) + ": " + describe(ex) +
                    ", required divergent");
  j.lines.push_back("log-weight datum a=" + fixed(cfg.datum.a) + ": " + describe(lw) + ", required bounded");
  const bool premises = m > needed && ex_m < needed;
  if (!premises) j.lines.push_back("configuration does not straddle the integrability threshold");
  j.passed = premises && lm.verdict == Verdict::Bounded && ex.verdict == Verdict::Divergent &&
             lw.verdict == Verdict::Bounded;
  return j;
}

// ---------------------------------------------------------------------------
// weighted_bound

ScenarioConfig weighted_defaults() {
  auto c = base(DomainKind::RadialBall, 2, kBallLevels);
  c.nonlinearity.gamma = 1.0;
  c.datum.kind = "example_ex";
  c.datum.eta = 0.6;
  return c;
}

Artifacts weighted_compute(const ScenarioConfig& cfg) {
  auto st = level_study({}, {{{}, cfg}}, {}, {}, cfg.sweep.threads);
  return {{"levels", std::move(st.table)}};
}

Judgement weighted_judge(const Artifacts& a, const ScenarioConfig& cfg) {
  const auto& t = artifact(a, "levels");
  const auto plain = refine(t, "operator_plain", cfg);
  const auto weighted = refine(t, "operator_weighted", cfg);
  const double predicted = cfg.datum.eta - 1.0;
  Judgement j;
  j.lines.push_back("integral of |L_h u|: " + describe(plain) + ", predicted exponent " + fixed(predicted));
  j.lines.push_back("integral of |L_h u| delta: " + describe(weighted));
  j.passed = plain.verdict == Verdict::Divergent &&
             std::abs(plain.exponent - predicted) <= cfg.diagnostics.exponent_tolerance &&
             weighted.verdict == Verdict::Bounded && weighted.ratios.back() <= cfg.diagnostics.bounded_ratio;
  return j;
}

// ---------------------------------------------------------------------------
// boundary_bd

struct Scenario {
  std::string label;
  ScenarioConfig cfg;
  double eta;  // NaN unless the exact solution is (1 - r^2)^eta
};

ScenarioConfig finest_only(ScenarioConfig c) {
  c.grid.cells = {c.grid.cells.back()};
  return c;
}

std::vector<Scenario> bd_scenarios(const ScenarioConfig& cfg) {
  const double none = std::nan("");
  std::vector<Scenario> s;
  auto adopt = [&](ScenarioConfig c) {
    c.diagnostics = cfg.diagnostics;
    c.sweep.threads = cfg.sweep.threads;
    return finest_only(c);
  };
  const auto man = manufactured_defaults();
  s.push_back({"manufactured", adopt(man), man.datum.eta});
  for (const auto& p : sharp_points(sharp_defaults()))
    s.push_back({"sharp_gamma_" + fixed(p.cfg.nonlinearity.gamma), adopt(p.cfg), p.cfg.datum.eta});
  s.push_back({"mild", adopt(mild_defaults()), none});
  s.push_back({"strong", adopt(strong_defaults()), none});
  const auto low = lower_points(lower_defaults());
  s.push_back({"lower_lm", adopt(low[0].cfg), none});
  s.push_back({"lower_example_ex", adopt(low[1].cfg), low[1].cfg.datum.eta});
  s.push_back({"lower_log_weight", adopt(low[2].cfg), none});
  return s;
}

ScenarioConfig bd_defaults() { return base(DomainKind::RadialBall, 2, {1024}); }

Artifacts bd_compute(const ScenarioConfig& cfg) {
  const auto sc = bd_scenarios(cfg);
  std::vector<std::optional<LevelSolution>> sols(sc.size());
  parallel_for(sc.size(), cfg.sweep.threads,
               [&](std::size_t i) { sols[i] = solve_level(sc[i].cfg, sc[i].cfg.grid.cells.front()); });
  std::vector<Row> keys;
  std::vector<const LevelSolution*> ptrs;
  for (std::size_t i = 0; i < sc.size(); ++i) {
    keys.push_back({sc[i].label, num(sc[i].eta), std::to_string(sc[i].cfg.grid.cells.front())});
    ptrs.push_back(&*sols[i]);
  }
  return {{"indicators", indicator_table({"scenario", "eta", "cells"}, keys, ptrs, cfg)}};
}

Judgement bd_judge(const Artifacts& a, const ScenarioConfig& cfg) {
  const auto& t = artifact(a, "indicators");
  Judgement j;
  j.passed = true;
  for (const auto& name : t.distinct("scenario")) {
    const auto rows = t.where("scenario", name);
    const auto c = summarize_indicator(rows.numbers("eps"), rows.numbers("value"), cfg.diagnostics.threshold_fraction);
    const double eta = rows.numbers("eta").front();
    bool ok = c.decreasing && c.exponent > 0.0;
    std::string line = name + ": exponent " + fixed(c.exponent) + (c.decreasing ? ", decreasing" : ", not decreasing");
    if (!std::isnan(eta)) {
      const bool match = std::abs(c.exponent - eta) <= cfg.diagnostics.exponent_tolerance;
      line += ", expected " + fixed(eta) + (match ? " (match)" : " (mismatch)");
      ok = ok && match;
    }
    j.lines.push_back(line + (ok ? "" : "  <-- fails"));
    j.passed = j.passed && ok;
  }
  return j;
}

// ---------------------------------------------------------------------------
// uniqueness_suite

ScenarioConfig uniqueness_defaults() {
  auto c = base(DomainKind::Interval, 1, {255});
  c.sweep.gammas = {0.5, 1.0, 2.0};
  c.datum.exponent = -0.5;
  c.solver.schedule_last = 40;
  return c;
}

Artifacts uniqueness_compute(const ScenarioConfig& cfg) {
  struct Case {
    double gamma;
    std::string datum;
  };
  std::vector<Case> cases;
  for (double g : cfg.sweep.gammas)
    for (const char* d : {"constant", "power_of_distance"}) cases.push_back({g, d});
  std::vector<Row> rows(cases.size());
  parallel_for(cases.size(), cfg.sweep.threads, [&](std::size_t k) {
    ScenarioConfig c = cfg;
    c.nonlinearity.family = "model";
    c.nonlinearity.gamma = cases[k].gamma;
    c.datum.kind = cases[k].datum;
    const auto op = build_operator(c.grid, c.grid.cells.back());
    const auto spec = build_nonlinearity(c.nonlinearity);
    const auto f = build_datum(c.datum, c.nonlinearity.gamma).sample(op.grid());
    const auto rep = uniqueness_probe(op, spec, f, dyadic_schedule(c.solver.schedule_last), c.solver_options(),
                                      c.diagnostics.agreement);
    rows[k] = {num(cases[k].gamma), cases[k].datum, std::to_string(c.grid.cells.back()),
               num(rep.truncation_shift_sup), num(rep.truncation_monotone_sup), num(rep.shift_monotone_sup),
               num(rep.truncation_shift_l1), num(rep.truncation_monotone_l1), num(rep.shift_monotone_l1),
               num(rep.gap), rep.verdict};
  });
  Table t({"gamma", "datum", "cells", "truncation_shift_sup", "truncation_monotone_sup", "shift_monotone_sup",
           "truncation_shift_l1", "truncation_monotone_l1", "shift_monotone_l1", "gap", "verdict"});
  for (auto& r : rows) t.add_row(std::move(r));
  return {{"pairs", std::move(t)}};
}

Judgement uniqueness_judge(const Artifacts& a, const ScenarioConfig& cfg) {
  const auto& t = artifact(a, "pairs");
  Judgement j;
  j.passed = t.row_count() > 0;
  const auto g = t.numbers("gamma");
  const auto d = t.strings("datum");
  const auto ts = t.numbers("truncation_shift_sup"), tm = t.numbers("truncation_monotone_sup"),
             sm = t.numbers("shift_monotone_sup"), gap = t.numbers("gap");
  for (std::size_t i = 0; i < t.row_count(); ++i) {
    const double worst = std::max({ts[i], tm[i], sm[i]});
    const bool ok = worst <= cfg.diagnostics.agreement && gap[i] <= cfg.solver.gap_tolerance;
    j.lines.push_back("gamma=" + fixed(g[i]) + " datum=" + d[i] + ": largest sup distance " + fixed(worst, 3) +
                      ", bracket gap " + fixed(gap[i], 3) + (ok ? "" : "  <-- fails"));
    j.passed = j.passed && ok;
  }
  return j;
}

// ---------------------------------------------------------------------------
// concentration

ScenarioConfig concentration_defaults() {
  auto c = base(DomainKind::RadialBall, 3, {400});
  c.nonlinearity.family = "bounded";
  c.nonlinearity.gamma = 2.0;
  c.nonlinearity.k1 = 0.01;
  c.nonlinearity.cap = 1.0;
  c.datum.kind = "constant";
  c.datum.scale = 1.0;
  c.datum.atom_mass = 1.0;
  c.solver.schedule_last = 24;
  c.sweep.h_infinities = {0.0, 0.5};
  c.sweep.widths = {0.1, 0.05, 0.025};
  return c;
}

Artifacts concentration_compute(const ScenarioConfig& cfg) {
  if (!(cfg.datum.atom_mass > 0.0)) throw ConfigError("concentration needs datum.atom_mass > 0");
  struct Case {
    double c_inf, width;
  };
  std::vector<Case> cases;
  for (double c : cfg.sweep.h_infinities)
    for (double w : cfg.sweep.widths) cases.push_back({c, w});
  std::vector<Row> rows(cases.size());
  parallel_for(cases.size(), cfg.sweep.threads, [&](std::size_t k) {
    ScenarioConfig c = cfg;
    c.nonlinearity.h_infinity = cases[k].c_inf;
    c.datum.atom_width = cases[k].width;
    const auto s = solve_level(c, c.grid.cells.back());
    const double coef = singularity_coefficient(s.op.grid(), s.result.u, cases[k].width, c.diagnostics.annulus_outer);
    const double N = c.grid.dimension;
    const double surface = N * unit_ball_measure(c.grid.dimension);
    // Newtonian kernel r^{2-N} / ((N-2) |S^{N-1}|), or -log r / (2 pi) in the plane.
    const double unit = N == 2 ? 1.0 / surface : 1.0 / ((N - 2.0) * surface);
    rows[k] = {num(cases[k].c_inf), num(cases[k].width), std::to_string(c.grid.cells.back()), num(coef),
               num(cases[k].c_inf * c.datum.atom_mass * unit)};
  });
  Table t({"h_infinity", "width", "cells", "coefficient", "target"});
  for (auto& r : rows) t.add_row(std::move(r));
  return {{"coefficients", std::move(t)}};
}

Judgement concentration_judge(const Artifacts& a, const ScenarioConfig& cfg) {
  const auto& t = artifact(a, "coefficients");
  Judgement j;
  j.passed = t.row_count() > 0;
  for (const auto& key : t.distinct("h_infinity")) {
    auto rows = t.where("h_infinity", key);
    const auto w = rows.numbers("width");
    const auto c = rows.numbers("coefficient");
    const auto target = rows.numbers("target");
    std::vector<std::size_t> order(w.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return w[x] > w[y]; });
    const double tgt = target[order.back()];
    const double band = tgt > 0.0 ? cfg.diagnostics.coefficient_tolerance * tgt : cfg.diagnostics.vanishing_tolerance;
    // growth below 1% of the band is mesh noise from resolving the narrowest mollifier
    const double floor = 0.01 * band;
    bool monotone = true;
    std::vector<double> errs;
    for (auto i : order) errs.push_back(std::abs(c[i] - target[i]));
    for (std::size_t i = 1; i < errs.size(); ++i)
      if (errs[i] > errs[i - 1] + floor) monotone = false;
    const double err = errs.back();
    const bool close = err <= band;
    j.lines.push_back("h(inf)=" + key + ": coefficients " + list_text([&] {
                        std::vector<double> v;
                        for (auto i : order) v.push_back(c[i]);
                        return v;
                      }()) + " for widths " + list_text([&] {
                        std::vector<double> v;
                        for (auto i : order) v.push_back(w[i]);
                        return v;
                      }()) + ", target " + fixed(tgt) + (close ? ", within tolerance" : ", outside tolerance") +
                      (monotone ? ", error nonincreasing" : ", error not monotone"));
    j.passed = j.passed && close && monotone;
  }
  return j;
}

// ---------------------------------------------------------------------------
// energy_criterion

ScenarioConfig criterion_defaults() {
  auto c = base(DomainKind::RadialBall, 2, kBallLevels);
  c.datum.kind = "example_ex";
  c.sweep.gammas = {1.5, 2.5};
  c.sweep.etas = {0.6, 0.4};
  c.sweep.witness_t = 0.55;
  return c;
}

Artifacts criterion_compute(const ScenarioConfig& cfg) {
  if (!(cfg.sweep.witness_t > 0.5 && cfg.sweep.witness_t <= 1.0))
    throw ConfigError("sweep.witness_t must lie in (1/2, 1] so that the witness has finite energy");
  std::vector<Point> pts;
  for (double g : cfg.sweep.gammas)
    for (double eta : cfg.sweep.etas) {
      ScenarioConfig c = cfg;
      c.nonlinearity.family = "model";
      c.nonlinearity.gamma = g;
      c.datum.kind = "example_ex";
      c.datum.eta = eta;
      pts.push_back({{num(g), num(eta)}, c});
    }
  const double t = cfg.sweep.witness_t;
  auto st = level_study({"gamma", "eta"}, pts, {"witness"},
                        [t](const ScenarioConfig& c, const LevelSolution& s) {
                          const auto& g = s.op.grid();
                          const double e = t * (1.0 - c.nonlinearity.gamma);
                          return Row{num(integral(g, [&](std::size_t i) { return s.f[i] * std::pow(g.distance()[i], e); }))};
                        },
                        cfg.sweep.threads);
  return {{"levels", std::move(st.table)}};
}

Judgement criterion_judge(const Artifacts& a, const ScenarioConfig& cfg) {
  const auto& t = artifact(a, "levels");
  Judgement j;
  j.passed = t.row_count() > 0;
  const auto gs = t.numbers("gamma"), es = t.numbers("eta");
  std::vector<std::pair<double, double>> seen;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    if (std::find(seen.begin(), seen.end(), std::pair{gs[i], es[i]}) != seen.end()) continue;
    seen.emplace_back(gs[i], es[i]);
    Table pt(t.columns());
    for (std::size_t k = 0; k < gs.size(); ++k)
      if (gs[k] == gs[i] && es[k] == es[i]) pt.add_row(t.rows()[k]);
    const auto e = refine(pt, "energy", cfg);
    const auto w = refine(pt, "witness", cfg);
    const bool decided = e.verdict != Verdict::Inconclusive && w.verdict != Verdict::Inconclusive;
    const bool ok = decided && e.verdict == w.verdict;
    j.lines.push_back("gamma=" + fixed(gs[i]) + " eta=" + fixed(es[i]) + ": energy " + to_string(e.verdict) +
                      ", witness integral " + to_string(w.verdict) + (ok ? "" : "  <-- fails"));
    j.passed = j.passed && ok;
  }
  return j;
}

std::vector<Experiment> make_registry() {
  std::vector<Experiment> r;
  r.push_back({"manufactured_solution", "u = (1 - r^2)^eta solves the problem with f = u^gamma (-Laplace u)",
               "max relative error at the finest level <= diagnostics.error_tolerance and fitted order >= "
               "diagnostics.min_order",
               manufactured_defaults, manufactured_compute, manufactured_judge});
  r.push_back({"threshold_scan_34", "sufficient condition 1 < gamma < 2 - 1/m for finite energy with f in L^m",
               "energy bounded at every non-borderline point with 1 < gamma < 2 - 1/m", sufficient_defaults,
               sufficient_compute, [](const Artifacts& a, const ScenarioConfig& c) {
                 return judge_points(artifact(a, "levels"), c, false);
               }});
  r.push_back({"threshold_scan_sharp", "finite energy if and only if gamma < 3 - 2/m (manufactured borderline data)",
               "energy bounded below the threshold; above it divergent with every ratio >= "
               "diagnostics.divergent_ratio and exponent within diagnostics.exponent_tolerance of 2 eta - 1",
               sharp_defaults, sharp_compute, [](const Artifacts& a, const ScenarioConfig& c) {
                 return judge_points(artifact(a, "levels"), c, true);
               }});
  r.push_back({"energy_always_L1", "finite energy for every nonnegative f in L1 when the singularity is mild",
               "datum L1 norm and energy bounded, last energy ratio <= diagnostics.bounded_ratio", mild_defaults,
               mild_compute, mild_judge});
  r.push_back({"strong_singularity_counterexample",
               "a Newtonian potential outside H1_0 solves a singular problem whose f u^gamma is integrable",
               "energy divergent and integral of f u^gamma bounded", strong_defaults, strong_compute, strong_judge});
  r.push_back({"L1_lower_order", "h(u) f is integrable when f lies in L^m with m > 1/(1 - gamma)",
               "lower-order integral bounded for the L^m and log-weight data, divergent for the manufactured datum",
               lower_defaults, lower_compute, lower_judge});
  r.push_back({"weighted_bound", "the lower-order term is always integrable against the distance",
               "integral of |L_h u| divergent with exponent eta - 1 (within diagnostics.exponent_tolerance); weighted "
               "integral bounded",
               weighted_defaults, weighted_compute, weighted_judge});
  r.push_back({"boundary_bd", "(1/eps) times the integral of u over the eps-strip tends to zero",
               "indicator decreasing with positive exponent in every scenario; exponent within "
               "diagnostics.exponent_tolerance of eta for manufactured solutions",
               bd_defaults, bd_compute, bd_judge});
  r.push_back({"concentration", "a concentrated datum enters the limit equation with weight h(infinity)",
               "fitted singularity coefficient within diagnostics.coefficient_tolerance of h(inf)/(N-2)|S^{N-1}| "
               "(absolute diagnostics.vanishing_tolerance when h(inf) = 0), error nonincreasing as the width shrinks",
               concentration_defaults, concentration_compute, concentration_judge});
  r.push_back({"uniqueness_suite", "uniqueness of the distributional solution for nonincreasing h",
               "truncation, shift and monotone solutions pairwise within diagnostics.agreement in sup norm; bracket "
               "gap <= solver.gap_tolerance",
               uniqueness_defaults, uniqueness_compute, uniqueness_judge});
  r.push_back({"energy_criterion", "finite energy if and only if the integral of f u0^(1-gamma) is finite for some u0 in H1_0",
               "energy verdict equals the verdict for the witness u0 = delta^t at every point, neither inconclusive",
               criterion_defaults, criterion_compute, criterion_judge});
  return r;
}

std::string sanitize(std::string s) {
  for (auto& ch : s)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-' || ch == '_')) ch = '_';
  return s;
}

std::string one_line(std::string s) {
  for (auto& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return s;
}

bool determined(const Table& t, const std::string& col, const Cols& by) {
  std::map<std::vector<std::string>, std::string> seen;
  const auto cj = t.column_index(col);
  for (const auto& r : t.rows()) {
    std::vector<std::string> key;
    for (const auto& b : by) key.push_back(r[t.column_index(b)]);
    auto [it, fresh] = seen.emplace(key, r[cj]);
    if (!fresh && it->second != r[cj]) return false;
  }
  return true;
}

}  // namespace

const Table& artifact(const Artifacts& artifacts, const std::string& name) {
  for (const auto& [n, t] : artifacts)
    if (n == name) return t;
  throw std::invalid_argument("no table named '" + name + "'");
}

const std::vector<Experiment>& experiment_registry() {
  static const std::vector<Experiment> r = make_registry();
  return r;
}

const Experiment& find_experiment(const std::string& name) {
  for (const auto& e : experiment_registry())
    if (e.name == name) return e;
  throw ConfigError("unknown experiment '" + name + "'");
}

NonlinearitySpec build_nonlinearity(const NonlinearityConfig& c) {
  try {
    if (c.family == "model") return make_model_h(c.gamma);
    if (c.family == "bounded") return make_bounded_h(c.h_infinity, c.gamma, c.k1, c.cap);
    if (c.family == "two_power") return make_two_power_h(c.gamma, c.theta);
    if (c.family == "constant") return make_constant_h(c.k1);
    if (c.family == "oscillating") return make_oscillating_h(c.gamma);
    if (c.family == "bump") return make_bump_h(c.gamma, c.center, c.width, c.height);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("nonlinearity: ") + e.what());
  }
  throw ConfigError("unknown nonlinearity family '" + c.family + "'");
}

Datum build_datum(const DatumConfig& c, double gamma) {
  try {
    Datum d;
    if (c.kind == "constant") d = Datum::constant(c.scale);
    else if (c.kind == "power_of_distance") d = Datum::power_of_distance(c.exponent, c.scale);
    else if (c.kind == "example_ex") d = Datum::example_ex(c.eta, gamma);
    else if (c.kind == "log_profile") d = Datum::log_profile(c.m);
    else if (c.kind == "log_weight") d = Datum::log_weight(gamma, c.a);
    else if (c.kind == "radial_power") d = Datum::radial_power(c.a, c.scale);
    else if (c.kind == "example_luigi") d = Datum::example_luigi(c.a, gamma);
    else if (c.kind == "atom") return Datum::mollified_atom(c.atom_location, c.atom_mass, c.atom_width);
    else throw ConfigError("unknown datum kind '" + c.kind + "'");
    if (c.atom_mass > 0.0) d = d + Datum::mollified_atom(c.atom_location, c.atom_mass, c.atom_width);
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("datum: ") + e.what());
  }
}

DiscreteOperator build_operator(const GridConfig& c, int cells) {
  try {
    return DiscreteOperator::assemble(Grid::build(c.domain, c.dimension, cells),
                                      CoefficientField::constant(c.coefficient));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

LevelSolution solve_level(const ScenarioConfig& cfg, int cells) {
  auto op = build_operator(cfg.grid, cells);
  const auto spec = build_nonlinearity(cfg.nonlinearity);
  std::vector<double> f;
  try {
    f = build_datum(cfg.datum, cfg.nonlinearity.gamma).sample(op.grid());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("datum: ") + e.what());
  }
  auto res = continue_in_n(op, spec, f, dyadic_schedule(cfg.solver.schedule_last), cfg.solver.scheme,
                           cfg.solver_options());
  if (!res.converged) {
    const auto& last = res.snapshots.back();
    throw SolverError("no convergence on " + std::to_string(cells) + " cells at n = " + format_number(last.n) +
                      " (residual " + format_number(last.residual) + ", gap " + format_number(last.gap) + ")");
  }
  return {std::move(op), std::move(f), std::move(res)};
}

std::filesystem::path output_root() {
  const char* env = std::getenv("SINGLAB_OUTPUT_ROOT");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("singlab-output");
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::mutex mu;
  std::size_t next = 0;
  std::exception_ptr first;
  std::size_t first_index = count;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i;
        {
          std::lock_guard lock(mu);
          if (next >= count) return;
          i = next++;
        }
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          // keep the lowest index so failures are reported deterministically
          if (i < first_index) {
            first_index = i;
            first = std::current_exception();
          }
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

std::size_t emit_plotdata(const Artifacts& artifacts, const std::filesystem::path& dir) {
  if (artifacts.empty()) throw std::invalid_argument("nothing to plot");
  const auto plot = dir / "plot";
  std::filesystem::create_directories(plot);
  std::ofstream manifest(plot / "manifest.txt");
  if (!manifest) throw std::runtime_error("cannot write " + (plot / "manifest.txt").string());
  manifest << "# file x y rows\n";
  static const Cols x_candidates = {"h", "eps", "width", "n", "gamma"};
  static const Cols group_candidates = {"case", "scenario", "datum", "h_infinity", "gamma", "m", "eta"};
  std::size_t files = 0;
  for (const auto& [name, t] : artifacts) {
    std::string x;
    for (const auto& c : x_candidates)
      if (t.has_column(c)) {
        x = c;
        break;
      }
    if (x.empty()) x = t.columns().front();
    // keys already fixed by x and the chosen groups add nothing (eta along a gamma scan)
    Cols groups;
    for (const auto& c : group_candidates) {
      if (c == x || !t.has_column(c)) continue;
      Cols by = groups;
      by.push_back(x);
      if (!determined(t, c, by)) groups.push_back(c);
    }

    // rows grouped by the joined group keys, in first-appearance order
    std::vector<std::pair<std::string, std::vector<std::size_t>>> buckets;
    for (std::size_t i = 0; i < t.row_count(); ++i) {
      std::string key;
      for (const auto& g : groups) key += (key.empty() ? "" : "_") + g + "=" + t.rows()[i][t.column_index(g)];
      auto it = std::find_if(buckets.begin(), buckets.end(), [&](const auto& b) { return b.first == key; });
      if (it == buckets.end()) buckets.push_back({key, {i}});
      else it->second.push_back(i);
    }
    const auto xj = t.column_index(x);
    for (std::size_t yj = 0; yj < t.columns().size(); ++yj) {
      const auto& y = t.columns()[yj];
      if (yj == xj || std::find(groups.begin(), groups.end(), y) != groups.end()) continue;
      bool numeric = true;
      for (const auto& r : t.rows()) {
        try {
          parse_number(r[yj]);
          parse_number(r[xj]);
        } catch (const std::invalid_argument&) {
          numeric = false;
          break;
        }
      }
      if (!numeric) continue;
      for (const auto& [key, idx] : buckets) {
        const std::string file = sanitize(name + (key.empty() ? "" : "__" + key) + "__" + y) + ".dat";
        std::ofstream out(plot / file);
        if (!out) throw std::runtime_error("cannot write " + (plot / file).string());
        out << "# " << x << ' ' << y << '\n';
        for (auto i : idx) out << t.rows()[i][xj] << ' ' << t.rows()[i][yj] << '\n';
        manifest << file << ' ' << x << ' ' << y << ' ' << idx.size() << '\n';
        ++files;
      }
    }
  }
  return files;
}

RunResult run_experiment(const std::string& name, const ScenarioConfig& cfg, const std::filesystem::path& dir) {
  const auto& exp = find_experiment(name);
  RunResult out;
  out.directory = dir;
  out.artifacts = exp.compute(cfg);
  ScenarioConfig echoed = cfg;
  echoed.experiment = name;
  const auto header = echo(echoed);
  std::filesystem::create_directories(dir);
  std::string names;
  for (auto& [table_name, t] : out.artifacts) {
    t.header = header;
    write_csv(dir / (table_name + ".csv"), t);
    names += (names.empty() ? "" : ", ") + table_name;
  }
  if (cfg.output.plotdata) emit_plotdata(out.artifacts, dir);
  out.judgement = exp.judge(out.artifacts, cfg);

  std::ofstream v(dir / "verdict.txt");
  if (!v) throw std::runtime_error("cannot write " + (dir / "verdict.txt").string());
  v << "experiment = " << name << '\n'
    << "anchor = " << exp.anchor << '\n'
    << "rule = " << exp.rule << '\n'
    << "tables = " << names << '\n'
    << "verdict = " << (out.judgement.passed ? "PASS" : "FAIL") << '\n';
  for (const auto& l : out.judgement.lines) v << "- " << l << '\n';
  return out;
}

Judgement verify_run(const std::filesystem::path& dir) {
  std::ifstream v(dir / "verdict.txt");
  if (!v) throw std::runtime_error("no verdict.txt in " + dir.string());
  std::string line, name, tables;
  while (std::getline(v, line)) {
    if (line.rfind("experiment = ", 0) == 0) name = line.substr(13);
    if (line.rfind("tables = ", 0) == 0) tables = line.substr(9);
  }
  const auto& exp = find_experiment(name);
  Artifacts a;
  std::stringstream ss(tables);
  std::string t;
  while (std::getline(ss, t, ',')) {
    t.erase(0, t.find_first_not_of(' '));
    a.emplace_back(t, read_csv(dir / (t + ".csv")));
  }
  if (a.empty()) throw std::runtime_error("verdict.txt lists no tables");
  const auto cfg = apply_assignments(ScenarioConfig{}, a.front().second.header);
  if (cfg.experiment != name) throw std::runtime_error("verdict.txt and the CSV header disagree on the experiment");
  return exp.judge(a, cfg);
}

bool scannable(const std::string& name) { return name == "threshold_scan_sharp" || name == "threshold_scan_34"; }

ScenarioConfig scan_defaults(const std::string& name) {
  if (!scannable(name)) throw ConfigError("experiment '" + name + "' does not support scans");
  auto c = find_experiment(name).defaults();
  c.experiment = name;
  c.sweep.gammas = {0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0};
  c.sweep.ms = {1.5, 2.0, 4.0};
  return c;
}

ScanResult run_scan(const ScenarioConfig& cfg, const std::filesystem::path& dir) {
  if (!scannable(cfg.experiment)) throw ConfigError("run.experiment must name a scannable experiment");
  const bool sharp = cfg.experiment == "threshold_scan_sharp";
  const auto points = sharp ? sharp_points(cfg) : sufficient_points(cfg);
  const Cols key_cols = sharp ? Cols{"gamma", "m", "eta"} : Cols{"gamma", "m", "exponent"};

  struct Outcome {
    std::optional<Table> levels;
    std::string error;
  };
  std::vector<Outcome> outcomes(points.size());
  // Rows are independent; a failing row is recorded and the scan continues.
  parallel_for(points.size(), cfg.sweep.threads, [&](std::size_t i) {
    try {
      ScenarioConfig c = points[i].cfg;
      c.sweep.threads = 1;
      outcomes[i].levels = level_study(key_cols, {points[i]}, {}, {}, 1).table;
    } catch (const std::exception& e) {
      outcomes[i].error = one_line(e.what());
    }
  });

  Table levels;
  bool have_levels = false;
  Table scan({"gamma", "m", key_cols[2], "threshold", "expected", "verdict", "exponent", "last_ratio", "borderline",
              "status", "match"});
  int judged = 0, matched = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double g = parse_number(points[i].keys[0]), m = parse_number(points[i].keys[1]);
    const double threshold = sharp ? 3.0 - 2.0 / m : 2.0 - 1.0 / m;
    const bool borderline = near_threshold(g, threshold, cfg.sweep.borderline);
    if (!outcomes[i].levels) {
      scan.add_row({num(g), num(m), points[i].keys[2], num(threshold), "", "", "nan", "nan", format_bool(borderline),
                    "error: " + outcomes[i].error, "false"});
      if (!borderline) ++judged;
      continue;
    }
    const auto& lv = *outcomes[i].levels;
    if (!have_levels) {
      levels = Table(lv.columns());
      have_levels = true;
    }
    for (const auto& r : lv.rows()) levels.add_row(r);
    const auto p = sharp ? judge_sharp_point(lv, g, m, cfg, false) : judge_sufficient_point(lv, g, m, cfg);
    const bool counted = !borderline && p.covered;
    if (counted) {
      ++judged;
      if (p.match) ++matched;
    }
    scan.add_row({num(g), num(m), points[i].keys[2], num(threshold), p.expected, to_string(p.verdict.verdict),
                  num(p.verdict.exponent), num(p.verdict.ratios.back()), format_bool(borderline),
                  borderline ? "borderline" : (p.covered ? "ok" : "not-claimed"), format_bool(p.match)});
  }

  auto header = echo(cfg);
  scan.header = header;
  std::filesystem::create_directories(dir);
  write_csv(dir / "scan.csv", scan);
  if (have_levels) {
    levels.header = header;
    write_csv(dir / "levels.csv", levels);
  }
  if (cfg.output.plotdata) emit_plotdata({{"scan", scan}}, dir);

  ScanResult res;
  res.table = std::move(scan);
  const double fraction = judged > 0 ? static_cast<double>(matched) / judged : 0.0;
  res.judgement.passed = judged > 0 && fraction >= cfg.sweep.min_match;
  res.judgement.lines.push_back(std::to_string(matched) + " of " + std::to_string(judged) +
                                " non-borderline points match the analytic threshold map (" + fixed(100 * fraction, 3) +
                                "%, required " + fixed(100 * cfg.sweep.min_match, 3) + "%)");
  std::ofstream v(dir / "verdict.txt");
  v << "scan = " << cfg.experiment << '\n' << "verdict = " << (res.judgement.passed ? "PASS" : "FAIL") << '\n';
  for (const auto& l : res.judgement.lines) v << "- " << l << '\n';
  return res;
}

}  // namespace singlab
