#include "singlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace singlab {

std::string to_string(Method method) {
  switch (method) {
    case Method::Picard: return "picard";
    case Method::Newton: return "newton";
    case Method::Monotone: return "monotone";
    default: return "automatic";
  }
}

Method parse_method(std::string_view text) {
  if (text == "picard") return Method::Picard;
  if (text == "newton") return Method::Newton;
  if (text == "monotone") return Method::Monotone;
  if (text == "automatic" || text == "auto") return Method::Automatic;
  throw std::invalid_argument("unknown solver method '" + std::string(text) + "'");
}

namespace {

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double l1_distance(const Grid& grid, std::span<const double> a, std::span<const double> b) {
  auto w = grid.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * std::abs(a[i] - b[i]);
  return s;
}

// K u = V h_n(u) f_n with f_n = T_n(f).
class Problem {
 public:
  Problem(const DiscreteOperator& op, const NonlinearitySpec& spec, std::span<const double> f, double n, Scheme scheme)
      : op_(op), hn_(spec, n, scheme), vf_(f.size()) {
    if (f.size() != op.size()) throw std::invalid_argument("datum size does not match the grid");
    auto w = op.grid().weights();
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!(f[i] >= 0.0)) throw std::invalid_argument("datum must be nonnegative");
      vf_[i] = w[i] * std::min(f[i], n);
    }
  }

  const RegularizedNonlinearity& hn() const { return hn_; }
  std::span<const double> vf() const { return vf_; }
  std::size_t size() const { return vf_.size(); }

  std::vector<double> source(std::span<const double> u) const {
    std::vector<double> s(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) s[i] = vf_[i] * hn_(u[i]);
    return s;
  }

  std::vector<double> S(std::span<const double> u) const { return op_.solve_stiffness(source(u)); }

  std::vector<double> defect(std::span<const double> u) const {
    auto F = op_.apply_stiffness(u);
    for (std::size_t i = 0; i < u.size(); ++i) F[i] -= vf_[i] * hn_(u[i]);
    return F;
  }

  double residual(std::span<const double> u) const {
    const auto F = defect(u);
    auto d = op_.diagonal();
    auto o = op_.off_diagonal();
    const std::size_t n = u.size();
    double top = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double mag = d[i] * std::abs(u[i]) + vf_[i] * hn_(u[i]);
      if (i > 0) mag += std::abs(o[i - 1] * u[i - 1]);
      if (i + 1 < n) mag += std::abs(o[i] * u[i + 1]);
      top = std::max(top, std::abs(F[i]));
      scale = std::max(scale, mag);
    }
    return scale > 0.0 ? top / scale : top;
  }

  bool is_subsolution(std::span<const double> a) const {
    const auto F = defect(a);
    const auto s = source(a);
    const double tol = 1e-12 * std::max(sup_norm(s), std::numeric_limits<double>::min());
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] < 0.0 || F[i] > tol) return false;
    return true;
  }

  const DiscreteOperator& op() const { return op_; }

 private:
  const DiscreteOperator& op_;
  RegularizedNonlinearity hn_;
  std::vector<double> vf_;
};

SolveReport picard(const Problem& P, const SolverOptions& opt, std::span<const double> initial) {
  if (!(opt.relaxation > 0.0 && opt.relaxation <= 1.0)) throw std::invalid_argument("relaxation must lie in (0, 1]");
  SolveReport r;
  r.method = Method::Picard;
  std::vector<double> u(P.size(), 0.0);
  if (!initial.empty()) u.assign(initial.begin(), initial.end());
  for (int k = 1; k <= opt.max_iterations; ++k) {
    const auto s = P.S(u);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = (1.0 - opt.relaxation) * u[i] + opt.relaxation * s[i];
    r.iterations = k;
    r.residual = P.residual(u);
    if (r.residual <= opt.residual_tolerance) {
      r.converged = true;
      break;
    }
  }
  r.u = std::move(u);
  return r;
}

SolveReport newton(const Problem& P, const SolverOptions& opt, std::span<const double> initial) {
  SolveReport r;
  r.method = Method::Newton;
  const std::size_t n = P.size();
  std::vector<double> u;
  if (!initial.empty()) {
    u.assign(initial.begin(), initial.end());
  } else {
    u = P.op().solve_stiffness(P.vf());
    const double top = sup_norm(u);
    if (top > 0.0)
      for (auto& v : u) v /= top;
  }
  for (auto& v : u) v = std::max(v, 0.0);

  auto merit = [](std::span<const double> F) {
    double s = 0.0;
    for (double x : F) s += x * x;
    return s;
  };

  auto F = P.defect(u);
  double phi = merit(F);
  auto vf = P.vf();
  for (int k = 0; k <= opt.max_iterations; ++k) {
    r.iterations = k;
    r.residual = P.residual(u);
    if (r.residual <= opt.residual_tolerance) {
      r.converged = true;
      break;
    }
    if (k == opt.max_iterations) break;

    std::vector<double> jd(P.op().diagonal().begin(), P.op().diagonal().end());
    for (std::size_t i = 0; i < n; ++i) jd[i] -= vf[i] * P.hn().slope(u[i]);
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -F[i];

    std::vector<double> du;
    bool ok = true;
    try {
      du = solve_symmetric_tridiagonal(jd, P.op().off_diagonal(), rhs);
      for (double v : du) ok = ok && std::isfinite(v);
    } catch (const std::runtime_error&) {
      ok = false;
    }

    bool accepted = false;
    if (ok) {
      for (double t = 1.0; t >= 1e-10; t *= 0.5) {
        std::vector<double> trial(n);
        for (std::size_t i = 0; i < n; ++i) trial[i] = std::max(u[i] + t * du[i], 0.0);
        auto Ft = P.defect(trial);
        const double pt = merit(Ft);
        if (pt <= (1.0 - 2e-4 * t) * phi) {
          u = std::move(trial);
          F = std::move(Ft);
          phi = pt;
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      // fall back on one fixed-point step
      auto s = P.S(u);
      auto Fs = P.defect(s);
      const double ps = merit(Fs);
      if (!(ps < phi)) break;
      u = std::move(s);
      F = std::move(Fs);
      phi = ps;
    }
  }
  r.u = std::move(u);
  return r;
}

SolveReport monotone(const Problem& P, const SolverOptions& opt, std::span<const double> initial) {
  SolveReport r;
  r.method = Method::Monotone;
  const std::size_t n = P.size();
  std::vector<double> a(n, 0.0);
  if (!initial.empty() && P.is_subsolution(initial)) a.assign(initial.begin(), initial.end());
  std::vector<double> b = P.S(a);
  for (std::size_t i = 0; i < n; ++i) b[i] = std::max(b[i], a[i]);

  auto vf = P.vf();
  std::vector<double> C(n), rhs(n);
  double best_gap = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int k = 0;; ++k) {
    r.iterations = k;
    const double gap = sup_distance(a, b);
    if (gap <= opt.gap_tolerance) {
      std::vector<double> mid(n);
      for (std::size_t i = 0; i < n; ++i) mid[i] = 0.5 * (a[i] + b[i]);
      r.residual = P.residual(mid);
      if (r.residual <= opt.residual_tolerance || stalled >= 3) break;
    }
    if (k == opt.max_iterations) break;
    if (gap < best_gap) {
      best_gap = gap;
      stalled = 0;
    } else {
      ++stalled;
      if (stalled >= 3 && gap <= opt.gap_tolerance) break;
      if (stalled >= 20) break;
    }

    for (std::size_t i = 0; i < n; ++i) C[i] = vf[i] * P.hn().max_abs_slope(a[i], b[i]);
    auto step = [&](const std::vector<double>& y) {
      const auto s = P.source(y);
      for (std::size_t i = 0; i < n; ++i) rhs[i] = s[i] + C[i] * y[i];
      return P.op().solve_stiffness(rhs, C);
    };
    auto a1 = step(a);
    auto b1 = step(b);
    const auto a2 = P.S(b1);
    const auto b2 = P.S(a1);
    for (std::size_t i = 0; i < n; ++i) {
      const double an = std::max(a1[i], a2[i]);
      const double bn = std::min(b1[i], b2[i]);
      r.order_violation = std::max({r.order_violation, a[i] - an, an - bn, bn - b[i]});
      b[i] = std::max(std::min(bn, b[i]), a[i]);
      a[i] = std::min(std::max(an, a[i]), b[i]);
    }
  }
  r.gap = sup_distance(a, b);
  r.u.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.u[i] = 0.5 * (a[i] + b[i]);
  r.residual = P.residual(r.u);
  r.converged = r.gap <= opt.gap_tolerance;
  r.lower = std::move(a);
  r.upper = std::move(b);
  return r;
}

}  // namespace

double regularized_residual(const DiscreteOperator& op, const RegularizedNonlinearity& hn,
                            std::span<const double> f, std::span<const double> u) {
  auto F = op.apply_stiffness(u);
  auto w = op.grid().weights();
  auto d = op.diagonal();
  auto o = op.off_diagonal();
  const std::size_t n = u.size();
  double top = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = w[i] * std::min(f[i], hn.level()) * hn(u[i]);
    double mag = d[i] * std::abs(u[i]) + s;
    if (i > 0) mag += std::abs(o[i - 1] * u[i - 1]);
    if (i + 1 < n) mag += std::abs(o[i] * u[i + 1]);
    top = std::max(top, std::abs(F[i] - s));
    scale = std::max(scale, mag);
  }
  return scale > 0.0 ? top / scale : top;
}

SolveReport solve_desingularized(const DiscreteOperator& op, const NonlinearitySpec& spec,
                                 std::span<const double> f, double n, Scheme scheme,
                                 const SolverOptions& options, std::span<const double> initial) {
  if (!initial.empty() && initial.size() != op.size()) throw std::invalid_argument("initial guess size mismatch");
  const Problem P(op, spec, f, n, scheme);
  Method m = options.method;
  if (m == Method::Automatic) m = spec.nonincreasing() ? Method::Monotone : Method::Newton;
  if (m == Method::Monotone && !spec.nonincreasing())
    throw std::invalid_argument("the monotone method needs a nonincreasing nonlinearity");
  switch (m) {
    case Method::Picard: return picard(P, options, initial);
    case Method::Monotone: return monotone(P, options, initial);
    default: {
      auto r = newton(P, options, initial);
      if (!r.converged && options.method == Method::Automatic) {
        auto p = picard(P, options, r.u);
        if (p.converged) return p;
      }
      return r;
    }
  }
}

std::vector<double> dyadic_schedule(int last) {
  if (last < 0) throw std::invalid_argument("schedule length must be nonnegative");
  std::vector<double> s;
  for (int j = 0; j <= last; ++j) s.push_back(std::ldexp(1.0, j));
  return s;
}

std::vector<std::pair<double, double>> interior_lower_bound(std::span<const double> u, const Grid& grid,
                                                           std::span<const double> depths) {
  auto d = grid.distance();
  std::vector<std::pair<double, double>> out;
  for (double depth : depths) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.size(); ++i)
      if (d[i] >= depth) m = std::min(m, u[i]);
    if (!std::isfinite(m)) throw std::invalid_argument("no nodes at the requested depth");
    out.emplace_back(depth, m);
  }
  return out;
}

ContinuationResult continue_in_n(const DiscreteOperator& op, const NonlinearitySpec& spec,
                                 std::span<const double> f, const std::vector<double>& schedule, Scheme scheme,
                                 const SolverOptions& options, const std::vector<double>& lower_bound_depths) {
  if (schedule.empty()) throw std::invalid_argument("empty continuation schedule");
  for (std::size_t j = 1; j < schedule.size(); ++j)
    if (!(schedule[j] > schedule[j - 1])) throw std::invalid_argument("schedule must increase");

  ContinuationResult res;
  std::vector<double> warm;
  res.converged = true;
  for (double n : schedule) {
    auto rep = solve_desingularized(op, spec, f, n, scheme, options, warm);
    Snapshot s;
    s.n = n;
    s.iterations = rep.iterations;
    s.residual = rep.residual;
    s.gap = rep.gap;
    s.converged = rep.converged;
    s.u = rep.u;
    warm = rep.lower.empty() ? rep.u : rep.lower;
    res.snapshots.push_back(std::move(s));
    res.final_n = n;
    if (!rep.converged) {
      res.converged = false;
      break;
    }
  }
  res.u = res.snapshots.back().u;
  const double scale = std::max(sup_norm(res.u), 1e-300);
  for (std::size_t j = 1; j < res.snapshots.size(); ++j) {
    res.increments.push_back(l1_distance(op.grid(), res.snapshots[j].u, res.snapshots[j - 1].u));
    if (j >= 2 && res.increments[j - 1] > res.increments[j - 2] * (1.0 + 1e-9) + 1e-12 * scale)
      res.cauchy = false;
  }
  std::vector<double> valid;
  const double deepest = *std::max_element(op.grid().distance().begin(), op.grid().distance().end());
  for (double d : lower_bound_depths)
    if (d <= deepest) valid.push_back(d);
  res.lower_bounds = interior_lower_bound(res.u, op.grid(), valid);
  return res;
}

double UniquenessReport::max_sup_distance() const {
  double m = truncation_shift_sup;
  if (monotone_applicable) m = std::max({m, truncation_monotone_sup, shift_monotone_sup});
  return m;
}

UniquenessReport uniqueness_probe(const DiscreteOperator& op, const NonlinearitySpec& spec,
                                  std::span<const double> f, const std::vector<double>& schedule,
                                  const SolverOptions& options, double agreement) {
  if (agreement <= 0.0) agreement = 100.0 * options.gap_tolerance;
  SolverOptions nopt = options;
  nopt.method = spec.nonincreasing() ? Method::Newton : Method::Automatic;

  UniquenessReport rep;
  const auto trunc = continue_in_n(op, spec, f, schedule, Scheme::Truncation, nopt);
  const auto shift = continue_in_n(op, spec, f, schedule, Scheme::Shift, nopt);
  rep.truncation = trunc.u;
  rep.shift = shift.u;
  rep.truncation_shift_sup = sup_distance(trunc.u, shift.u);
  rep.truncation_shift_l1 = l1_distance(op.grid(), trunc.u, shift.u);
  bool ok = trunc.converged && shift.converged;

  rep.monotone_applicable = spec.nonincreasing();
  if (rep.monotone_applicable) {
    SolverOptions mopt = options;
    mopt.method = Method::Monotone;
    mopt.max_iterations = std::max(options.max_iterations, 2000);
    const auto mono = solve_desingularized(op, spec, f, schedule.back(), Scheme::Truncation, mopt);
    rep.monotone = mono.u;
    rep.gap = mono.gap;
    rep.truncation_monotone_sup = sup_distance(trunc.u, mono.u);
    rep.shift_monotone_sup = sup_distance(shift.u, mono.u);
    rep.truncation_monotone_l1 = l1_distance(op.grid(), trunc.u, mono.u);
    rep.shift_monotone_l1 = l1_distance(op.grid(), shift.u, mono.u);
    ok = ok && mono.converged;
  }
  rep.consistent = rep.monotone_applicable && ok && rep.max_sup_distance() <= agreement;
  rep.verdict = rep.consistent ? "consistent-with-uniqueness" : "not-certified";
  return rep;
}

}  // namespace singlab
