#include "singlab/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace singlab {

namespace {

// Differences across links with zero boundary values; link 0 on radial grids
// joins the first node to itself through the origin face and carries no area.
std::vector<double> link_jumps(const Grid& grid, std::span<const double> u) {
  const std::size_t n = u.size();
  std::vector<double> d(n + 1);
  const bool radial = grid.kind() == DomainKind::RadialBall;
  d[0] = radial ? 0.0 : u[0];
  for (std::size_t k = 1; k < n; ++k) d[k] = u[k] - u[k - 1];
  d[n] = -u[n - 1];
  return d;
}

}  // namespace

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double energy(const DiscreteOperator& op, std::span<const double> u) {
  if (u.size() != op.size()) throw std::invalid_argument("energy: size mismatch");
  const auto d = link_jumps(op.grid(), u);
  auto c = op.conductances();
  double e = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) e += c[k] * d[k] * d[k];
  return e;
}

TruncationEnergies truncation_energy(const DiscreteOperator& op, std::span<const double> u, double k, double gamma) {
  std::vector<double> t(u.size()), p(u.size());
  const double e = 0.5 * (gamma + 1.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    t[i] = truncate_T(k, u[i]);
    p[i] = std::pow(std::max(t[i], 0.0), e);
  }
  return {energy(op, t), energy(op, p)};
}

double gk_seminorm(const Grid& grid, std::span<const double> u, double k, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("seminorm exponent must be >= 1");
  std::vector<double> g(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) g[i] = truncate_G(k, u[i]);
  const auto d = link_jumps(grid, g);
  auto len = grid.link_lengths();
  auto area = grid.link_areas();
  double s = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) s += area[j] * len[j] * std::pow(std::abs(d[j]) / len[j], q);
  return std::pow(s, 1.0 / q);
}

double intermediate_exponent(int dimension) {
  if (dimension <= 1) return 1.5;
  return 1.0 + 0.5 * (static_cast<double>(dimension) / (dimension - 1) - 1.0);
}

std::vector<double> aligned_strip_widths(const Grid& grid, int count, int first_cells) {
  if (first_cells < 4) throw std::invalid_argument("strips must span at least four cells");
  const double h = grid.mesh_width();
  const double half = grid.kind() == DomainKind::Interval ? 0.5 * h : 0.0;
  std::vector<double> eps;
  for (int j = 0; j < count; ++j) {
    const double e = first_cells * std::ldexp(1.0, j) * h + half;
    if (e >= 0.5) throw std::invalid_argument("grid too coarse for the requested strip widths");
    eps.push_back(e);
  }
  return eps;
}

IndicatorCurve summarize_indicator(std::span<const double> eps, std::span<const double> values,
                                   double threshold_fraction) {
  if (eps.size() != values.size()) throw std::invalid_argument("indicator: size mismatch");
  if (eps.size() < 2) throw std::invalid_argument("indicator curve needs two strip widths");
  IndicatorCurve c;
  c.eps.assign(eps.begin(), eps.end());
  c.values.assign(values.begin(), values.end());
  c.exponent = loglog_slope(c.eps, c.values);

  std::vector<std::size_t> order(eps.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return eps[a] < eps[b]; });
  c.decreasing = true;
  for (std::size_t i = 1; i < order.size(); ++i)
    if (!(c.values[order[i - 1]] < c.values[order[i]])) c.decreasing = false;
  const double smallest = c.values[order.front()], largest = c.values[order.back()];
  c.satisfied = c.decreasing && c.exponent > 0.0 && smallest <= threshold_fraction * largest;
  return c;
}

IndicatorCurve boundary_indicator_curve(const Grid& grid, std::span<const double> u, std::span<const double> eps,
                                        double threshold_fraction) {
  if (eps.size() < 2) throw std::invalid_argument("indicator curve needs two strip widths");
  std::vector<double> values;
  for (double e : eps) values.push_back(boundary_strip_integral(grid, u, e));
  return summarize_indicator(eps, values, threshold_fraction);
}

WeightedNorms lower_order_norms(const Grid& grid, const NonlinearitySpec& spec, std::span<const double> f,
                                std::span<const double> u) {
  auto w = grid.weights();
  auto d = grid.distance();
  WeightedNorms out;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0)) throw std::invalid_argument("lower-order norms need u > 0");
    const double v = spec(u[i]) * f[i] * w[i];
    out.plain += v;
    out.weighted += v * d[i];
  }
  return out;
}

WeightedNorms operator_norms(const DiscreteOperator& op, std::span<const double> u) {
  const auto Ku = op.apply_stiffness(u);
  auto d = op.grid().distance();
  WeightedNorms out;
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.plain += std::abs(Ku[i]);
    out.weighted += std::abs(Ku[i]) * d[i];
  }
  return out;
}

double source_work(const Grid& grid, const NonlinearitySpec& spec, std::span<const double> f,
                   std::span<const double> u) {
  auto w = grid.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * spec(u[i]) * f[i] * u[i];
  return s;
}

double power_integral(const Grid& grid, std::span<const double> f, double m) {
  auto w = grid.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * std::pow(f[i], m);
  return s;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Bounded: return "bounded";
    case Verdict::Divergent: return "divergent";
    case Verdict::Borderline: return "borderline";
    default: return "inconclusive";
  }
}

Verdict parse_verdict(const std::string& text) {
  if (text == "bounded") return Verdict::Bounded;
  if (text == "divergent") return Verdict::Divergent;
  if (text == "borderline") return Verdict::Borderline;
  if (text == "inconclusive") return Verdict::Inconclusive;
  throw std::invalid_argument("unknown verdict '" + text + "'");
}

RefinementVerdict classify_refinement(std::span<const double> h, std::span<const double> values,
                                      const RefinementOptions& opts) {
  if (h.size() != values.size()) throw std::invalid_argument("refinement: size mismatch");
  if (values.size() < 3) throw std::invalid_argument("refinement verdicts need at least three levels");
  for (std::size_t j = 1; j < h.size(); ++j)
    if (!(h[j] < h[j - 1])) throw std::invalid_argument("refinement: mesh widths must decrease");

  RefinementVerdict r;
  const std::size_t L = values.size();
  const double last = std::abs(values.back());
  bool all_up = true, all_nonzero = true;
  std::vector<double> hs, mags;
  for (std::size_t j = 0; j + 1 < L; ++j) {
    const double a = values[j], b = values[j + 1];
    r.ratios.push_back(a != 0.0 ? b / a : (b == 0.0 ? 1.0 : std::numeric_limits<double>::infinity()));
    const double D = b - a;
    r.increments.push_back(D);
    if (!(D > opts.negligible * last)) all_up = false;
    if (!(std::abs(D) > opts.negligible * last)) all_nonzero = false;
    hs.push_back(h[j + 1]);
    mags.push_back(std::abs(D));
  }
  r.exponent = all_nonzero ? loglog_slope(hs, mags) : std::numeric_limits<double>::quiet_NaN();
  r.increasing = all_up;
  r.persistent_growth = std::all_of(r.ratios.begin(), r.ratios.end(), [&](double q) { return q >= opts.divergent_ratio; });

  // Increments of one sign that do not decay with h sum to infinity.
  if (r.persistent_growth || (all_up && r.exponent < opts.min_decay)) {
    r.verdict = Verdict::Divergent;
  } else if (r.ratios.back() <= opts.bounded_ratio) {
    r.verdict = Verdict::Bounded;
  } else {
    r.verdict = Verdict::Inconclusive;
  }
  return r;
}

std::vector<LmVerdict> lm_membership(const std::vector<Grid>& grids, const Datum& datum, std::span<const double> m_list,
                                     const RefinementOptions& opts) {
  std::vector<double> h;
  std::vector<std::vector<double>> samples;
  for (const auto& g : grids) {
    h.push_back(g.mesh_width());
    samples.push_back(datum.sample(g));
  }
  std::vector<LmVerdict> out;
  for (double m : m_list) {
    if (!(m >= 1.0)) throw std::invalid_argument("L^m membership needs m >= 1");
    LmVerdict v;
    v.m = m;
    for (std::size_t j = 0; j < grids.size(); ++j) v.values.push_back(power_integral(grids[j], samples[j], m));
    v.verdict = classify_refinement(h, v.values, opts);
    out.push_back(std::move(v));
  }
  return out;
}

double singularity_coefficient(const Grid& grid, std::span<const double> u, double width, double outer) {
  if (grid.kind() != DomainKind::RadialBall) throw std::invalid_argument("singularity fit needs a radial grid");
  auto r = grid.nodes();
  const int N = grid.dimension();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (r[i] >= 2.0 * width && r[i] <= outer) idx.push_back(i);
  if (idx.size() < 6) throw std::invalid_argument("annulus for the singularity fit is empty");

  Eigen::MatrixXd A(idx.size(), 4);
  Eigen::VectorXd b(idx.size());
  for (std::size_t row = 0; row < idx.size(); ++row) {
    const double x = r[idx[row]];
    A(row, 0) = N == 2 ? -std::log(x) : std::pow(x, 2.0 - N);
    A(row, 1) = 1.0;
    A(row, 2) = x * x;
    A(row, 3) = x * x * x * x;
    b(row) = u[idx[row]];
  }
  const Eigen::VectorXd scale = A.colwise().norm().transpose();
  for (int c = 0; c < 4; ++c) A.col(c) /= scale(c);
  const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);
  return coef(0) / scale(0);
}

LevelDiagnostics diagnose_level(const DiscreteOperator& op, const NonlinearitySpec& spec, std::span<const double> f,
                                std::span<const double> u, double k) {
  const Grid& g = op.grid();
  LevelDiagnostics d;
  d.cells = g.num_cells();
  d.h = g.mesh_width();
  d.energy = energy(op, u);
  const auto te = truncation_energy(op, u, k, spec.gamma);
  d.truncation_energy = te.plain;
  d.truncation_energy_power = te.power;
  d.q = intermediate_exponent(g.dimension());
  d.gk_q1 = gk_seminorm(g, u, k, 1.0);
  d.gk_q = gk_seminorm(g, u, k, d.q);
  const auto lo = lower_order_norms(g, spec, f, u);
  d.lower_plain = lo.plain;
  d.lower_weighted = lo.weighted;
  const auto on = operator_norms(op, u);
  d.operator_plain = on.plain;
  d.operator_weighted = on.weighted;
  d.source_work = source_work(g, spec, f, u);
  for (double v : u) d.sup_u = std::max(d.sup_u, v);
  return d;
}

}  // namespace singlab
