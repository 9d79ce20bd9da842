#include "singlab/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace singlab {

namespace {

constexpr double kTiny = std::numeric_limits<double>::min();

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(what) + " must be positive");
}

class PowerProfile final : public Profile {
 public:
  PowerProfile(double k, double gamma) : k_(k), gamma_(gamma) {}
  double value(double s) const override { return k_ * std::pow(s, -gamma_); }
  double slope(double s) const override { return -gamma_ * k_ * std::pow(s, -gamma_ - 1.0); }
  double max_abs_slope(double lo, double) const override {
    return gamma_ * k_ * std::pow(std::max(lo, kTiny), -gamma_ - 1.0);
  }

 private:
  double k_, gamma_;
};

class BoundedProfile final : public Profile {
 public:
  BoundedProfile(double c_inf, double gamma, double k1, double cap)
      : c_(c_inf), gamma_(gamma), k1_(k1), cap_(cap) {
    s_cap_ = std::pow(k1 / cap, 1.0 / gamma);
    s_floor_ = c_inf > 0.0 ? std::pow(k1 / c_inf, 1.0 / gamma) : std::numeric_limits<double>::infinity();
  }
  double value(double s) const override {
    return std::max(c_, std::min(cap_, k1_ * std::pow(s, -gamma_)));
  }
  double slope(double s) const override {
    if (s <= s_cap_ || s >= s_floor_ || cap_ <= c_) return 0.0;
    return -gamma_ * k1_ * std::pow(s, -gamma_ - 1.0);
  }
  double max_abs_slope(double lo, double hi) const override {
    if (cap_ <= c_) return 0.0;
    const double a = std::max(lo, s_cap_);
    if (a > hi || a >= s_floor_) return 0.0;
    return gamma_ * k1_ * std::pow(a, -gamma_ - 1.0);
  }

 private:
  double c_, gamma_, k1_, cap_, s_cap_, s_floor_;
};

class TwoPowerProfile final : public Profile {
 public:
  TwoPowerProfile(double gamma, double theta) : gamma_(gamma), theta_(theta) {}
  double value(double s) const override {
    return s < 1.0 ? std::pow(s, -gamma_) : std::pow(s, -theta_);
  }
  double slope(double s) const override {
    return s < 1.0 ? -gamma_ * std::pow(s, -gamma_ - 1.0) : -theta_ * std::pow(s, -theta_ - 1.0);
  }
  double max_abs_slope(double lo, double hi) const override {
    double m = 0.0;
    if (lo < 1.0) m = gamma_ * std::pow(std::max(lo, kTiny), -gamma_ - 1.0);
    if (hi >= 1.0) m = std::max(m, theta_ * std::pow(std::max(lo, 1.0), -theta_ - 1.0));
    return m;
  }

 private:
  double gamma_, theta_;
};

class ConstantProfile final : public Profile {
 public:
  explicit ConstantProfile(double c) : c_(c) {}
  double value(double) const override { return c_; }
  double slope(double) const override { return 0.0; }
  double max_abs_slope(double, double) const override { return 0.0; }

 private:
  double c_;
};

class OscillatingProfile final : public Profile {
 public:
  explicit OscillatingProfile(double gamma) : gamma_(gamma) {}
  double value(double s) const override {
    return std::pow(s, -gamma_) * (1.5 + 0.5 * std::sin(s));
  }
  double minorant(double s) const override { return std::pow(s, -gamma_); }
  double tail_majorant(double s) const override { return 2.0 * std::pow(s, -gamma_); }
  double slope(double s) const override {
    const double p = std::pow(s, -gamma_);
    return -gamma_ * p / s * (1.5 + 0.5 * std::sin(s)) + 0.5 * p * std::cos(s);
  }

 private:
  double gamma_;
};

class BumpProfile final : public Profile {
 public:
  BumpProfile(double gamma, double center, double width, double height)
      : gamma_(gamma), c_(center), w_(width), a_(height) {}
  double minorant(double s) const override { return a_ >= 0.0 ? std::pow(s, -gamma_) : Profile::minorant(s); }
  double value(double s) const override {
    double v = std::pow(s, -gamma_);
    const double t = (s - c_) / w_;
    if (std::abs(t) < 1.0) v += a_ * 0.5 * (1.0 + std::cos(std::numbers::pi * t));
    return v;
  }
  double slope(double s) const override {
    double d = -gamma_ * std::pow(s, -gamma_ - 1.0);
    const double t = (s - c_) / w_;
    if (std::abs(t) < 1.0) d -= a_ * 0.5 * std::numbers::pi / w_ * std::sin(std::numbers::pi * t);
    return d;
  }

 private:
  double gamma_, c_, w_, a_;
};

class TableProfile final : public Profile {
 public:
  TableProfile(std::vector<std::pair<double, double>> pts, double gamma)
      : pts_(std::move(pts)), gamma_(gamma) {}
  double value(double s) const override {
    if (s < pts_.front().first) return pts_.front().second * std::pow(pts_.front().first / s, gamma_);
    if (s >= pts_.back().first) return pts_.back().second;
    const auto i = segment(s);
    const auto& [s0, h0] = pts_[i];
    const auto& [s1, h1] = pts_[i + 1];
    return h0 + (h1 - h0) * (s - s0) / (s1 - s0);
  }
  double slope(double s) const override {
    if (s < pts_.front().first) return -gamma_ * value(s) / s;
    if (s >= pts_.back().first) return 0.0;
    const auto i = segment(s);
    return (pts_[i + 1].second - pts_[i].second) / (pts_[i + 1].first - pts_[i].first);
  }
  double max_abs_slope(double lo, double hi) const override {
    double m = 0.0;
    const double s0 = pts_.front().first;
    if (lo < s0) m = gamma_ * value(std::max(lo, kTiny)) / std::max(lo, kTiny);
    for (std::size_t i = 0; i + 1 < pts_.size(); ++i) {
      if (pts_[i + 1].first < lo || pts_[i].first > hi) continue;
      m = std::max(m, std::abs((pts_[i + 1].second - pts_[i].second) / (pts_[i + 1].first - pts_[i].first)));
    }
    return m;
  }

 private:
  std::size_t segment(double s) const {
    auto it = std::upper_bound(pts_.begin(), pts_.end(), s,
                               [](double v, const auto& p) { return v < p.first; });
    return static_cast<std::size_t>(it - pts_.begin()) - 1;
  }

  std::vector<std::pair<double, double>> pts_;
  double gamma_;
};

}  // namespace

double Profile::slope(double s) const {
  const double d = 1e-6 * s;
  return (value(s + d) - value(s - d)) / (2.0 * d);
}

double Profile::minorant(double) const { return std::numeric_limits<double>::infinity(); }

double Profile::tail_majorant(double) const { return 0.0; }

double Profile::max_abs_slope(double lo, double hi) const {
  lo = std::max(lo, kTiny);
  if (!(hi > lo)) return std::abs(slope(lo));
  constexpr int kSamples = 129;
  const bool geometric = hi / lo > 2.0;
  double m = 0.0;
  for (int j = 0; j < kSamples; ++j) {
    const double t = static_cast<double>(j) / (kSamples - 1);
    const double s = geometric ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo);
    m = std::max(m, std::abs(slope(s)));
  }
  return 1.05 * m;
}

double truncate_T(double k, double s) {
  if (!(k > 0.0)) throw std::invalid_argument("truncation level must be positive");
  return std::max(-k, std::min(s, k));
}

double truncate_G(double k, double s) {
  if (!(k > 0.0)) throw std::invalid_argument("truncation level must be positive");
  if (std::abs(s) <= k) return 0.0;
  return s > 0.0 ? s - k : s + k;
}

NonlinearitySpec make_model_h(double gamma) {
  require_positive(gamma, "gamma");
  NonlinearitySpec spec;
  spec.name = "model_power";
  spec.profile = std::make_shared<PowerProfile>(1.0, gamma);
  spec.gamma = gamma;
  spec.theta = gamma;
  spec.k1 = 1.0;
  spec.k2 = 1.0;
  spec.omega_low = 1.0;
  spec.omega_high = 1.0;
  spec.h_infinity = 0.0;
  return spec;
}

NonlinearitySpec make_bounded_h(double c_inf, double gamma, double k1, double cap) {
  if (!(c_inf >= 0.0)) throw std::invalid_argument("h(inf) must be nonnegative");
  require_positive(gamma, "gamma");
  require_positive(k1, "k1");
  require_positive(cap, "cap");
  NonlinearitySpec spec;
  spec.name = "bounded";
  spec.profile = std::make_shared<BoundedProfile>(c_inf, gamma, k1, cap);
  spec.gamma = gamma;
  spec.k1 = k1;
  spec.omega_low = c_inf > 0.0 ? std::min(1.0, std::pow(k1 / c_inf, 1.0 / gamma)) : 1.0;
  if (c_inf == 0.0) {
    spec.theta = gamma;
    spec.k2 = k1;
    spec.omega_high = 1.0;
  }
  spec.h_infinity = c_inf;
  return spec;
}

NonlinearitySpec make_two_power_h(double gamma, double theta) {
  require_positive(gamma, "gamma");
  require_positive(theta, "theta");
  NonlinearitySpec spec;
  spec.name = "two_power";
  spec.profile = std::make_shared<TwoPowerProfile>(gamma, theta);
  spec.gamma = gamma;
  spec.theta = theta;
  spec.k1 = 1.0;
  spec.k2 = 1.0;
  spec.omega_low = 1.0;
  spec.omega_high = 1.0;
  return spec;
}

NonlinearitySpec make_constant_h(double c) {
  require_positive(c, "constant");
  NonlinearitySpec spec;
  spec.name = "constant";
  spec.profile = std::make_shared<ConstantProfile>(c);
  spec.gamma = 1.0;
  spec.k1 = c;
  spec.omega_low = 1.0;
  spec.h_infinity = c;
  return spec;
}

NonlinearitySpec make_oscillating_h(double gamma) {
  require_positive(gamma, "gamma");
  NonlinearitySpec spec;
  spec.name = "oscillating";
  spec.profile = std::make_shared<OscillatingProfile>(gamma);
  spec.gamma = gamma;
  spec.theta = gamma;
  spec.k1 = 2.0;
  spec.k2 = 2.0;
  spec.omega_low = 1.0;
  spec.omega_high = 1.0;
  spec.monotonicity = Monotonicity::General;
  return spec;
}

NonlinearitySpec make_bump_h(double gamma, double center, double width, double height) {
  require_positive(gamma, "gamma");
  require_positive(width, "bump width");
  if (!(center - width > 0.0)) throw std::invalid_argument("bump must sit inside (0, inf)");
  if (!(height >= 0.0)) throw std::invalid_argument("bump height must be nonnegative");
  NonlinearitySpec spec;
  spec.name = "bump";
  spec.profile = std::make_shared<BumpProfile>(gamma, center, width, height);
  spec.gamma = gamma;
  spec.theta = gamma;
  spec.k1 = 1.0;
  spec.k2 = 1.0;
  spec.omega_low = center - width;
  spec.omega_high = center + width;
  spec.monotonicity = height > 0.0 ? Monotonicity::General : Monotonicity::Nonincreasing;
  return spec;
}

NonlinearitySpec make_table_h(std::vector<std::pair<double, double>> points, double gamma) {
  require_positive(gamma, "gamma");
  if (points.size() < 2) throw std::invalid_argument("table needs at least two points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].first > 0.0) || !(points[i].second >= 0.0))
      throw std::invalid_argument("table entries need s > 0 and h >= 0");
    if (i > 0 && !(points[i].first > points[i - 1].first))
      throw std::invalid_argument("table abscissae must increase");
  }
  if (!(points.front().second > 0.0)) throw std::invalid_argument("table must start positive");
  NonlinearitySpec spec;
  spec.name = "table";
  spec.gamma = gamma;
  spec.k1 = points.front().second * std::pow(points.front().first, gamma);
  spec.omega_low = points.front().first;
  spec.h_infinity = points.back().second;
  if (spec.h_infinity == 0.0) {
    spec.theta = gamma;
    spec.k2 = 1.0;
    spec.omega_high = points.back().first;
  }
  bool mono = true;
  for (std::size_t i = 1; i < points.size(); ++i) mono = mono && points[i].second <= points[i - 1].second;
  spec.monotonicity = mono ? Monotonicity::Nonincreasing : Monotonicity::General;
  spec.profile = std::make_shared<TableProfile>(std::move(points), gamma);
  return spec;
}

AssumptionReport check_assumptions(const NonlinearitySpec& spec) {
  AssumptionReport r;
  constexpr int kSamples = 1201;
  const double lo = 1e-6, hi = 1e6;
  double prev = 0.0;
  for (int j = 0; j < kSamples; ++j) {
    const double s = lo * std::pow(hi / lo, static_cast<double>(j) / (kSamples - 1));
    const double v = spec(s);
    if (!(v >= 0.0) || std::isnan(v)) r.nonnegative = false;
    if (s < spec.omega_low && v > spec.k1 * std::pow(s, -spec.gamma) * (1.0 + 1e-12)) r.h1 = false;
    if (spec.theta && spec.k2 && s > spec.omega_high.value_or(spec.omega_low) &&
        v > *spec.k2 * std::pow(s, -*spec.theta) * (1.0 + 1e-12))
      r.h2 = false;
    if (spec.nonincreasing() && j > 0 && v > prev * (1.0 + 1e-12)) r.monotone = false;
    prev = v;
  }
  double last = std::numeric_limits<double>::infinity();
  for (double s : {1e2, 1e4, 1e6}) {
    const double d = std::abs(spec(s) - spec.h_infinity);
    if (d > last * (1.0 + 1e-12) + 1e-15) r.limit = false;
    last = d;
  }
  if (last > spec.limit_tolerance) r.limit = false;
  return r;
}

UpperEnvelope::UpperEnvelope(const NonlinearitySpec& spec, const EnvelopeOptions& opts)
    : profile_(spec.profile),
      gamma_(spec.gamma),
      k1_(spec.k1),
      theta_(spec.theta),
      k2_(spec.k2),
      omega_high_(spec.omega_high),
      safety_(opts.safety),
      per_unit_(opts.samples_per_unit) {
  if (per_unit_ < 1) throw std::invalid_argument("samples_per_unit must be positive");
  const double inflate = 1.0 + safety_;
  const double L = opts.linear_horizon;
  const double H = std::max(opts.log_horizon, 2.0 * (spec.omega_low + L));
  const double ratio = 1.0 + 1.0 / per_unit_;

  auto checked = [&](double s) {
    const double v = profile_->value(s);
    if (!std::isfinite(v)) throw std::invalid_argument("h is unbounded on [omega_low, inf)");
    return v;
  };
  auto tail_at = [&](double x) {
    if (theta_ && k2_ && x >= omega_high_.value_or(spec.omega_low)) return *k2_ * std::pow(x, -*theta_);
    return std::max(checked(x), spec.h_infinity) * inflate;
  };

  // sup of h over [omega_low, inf), which fixes rho
  double sup = tail_at(H);
  const long count = static_cast<long>(L * per_unit_);
  for (long j = 0; j <= count; ++j) sup = std::max(sup, checked(spec.omega_low + static_cast<double>(j) / per_unit_) * inflate);
  for (double s = spec.omega_low + L; s < H; s *= ratio) sup = std::max(sup, checked(s) * inflate);

  rho_ = sup > 0.0 ? std::min(spec.omega_low, std::pow(k1_ / sup, 1.0 / gamma_)) : spec.omega_low;
  i0_ = k1_ * std::pow(rho_, -gamma_);

  tail_bound_ = tail_at(H);
  for (double s = rho_ + L * ratio; s < H; s *= ratio) far_s_.push_back(s);
  far_suffix_.resize(far_s_.size());
  double run = std::max(tail_bound_, profile_->tail_majorant(H));
  for (std::size_t k = far_s_.size(); k-- > 0;) {
    run = std::max({run, checked(far_s_[k]) * inflate, profile_->tail_majorant(far_s_[k])});
    far_suffix_[k] = run;
  }
  // covers the gap between the linear and the log samples
  run = std::max(run, profile_->tail_majorant(rho_ + L));

  linear_units_ = static_cast<long>(L);
  const long total = linear_units_ * per_unit_;
  suffix_.resize(static_cast<std::size_t>(total) + 1);
  for (long j = total; j >= 0; --j) {
    run = std::max(run, checked(rho_ + static_cast<double>(j) / per_unit_) * inflate);
    suffix_[static_cast<std::size_t>(j)] = std::min(run, i0_);
  }
}

double UpperEnvelope::far_tail_sup(double x) const {
  // log-spaced samples cannot see oscillations, so a known majorant takes over
  const double known = profile_->tail_majorant(x);
  if (far_s_.empty() || x > far_s_.back()) {
    if (theta_ && k2_ && x >= omega_high_.value_or(0.0)) return std::min(tail_bound_, *k2_ * std::pow(x, -*theta_));
    return std::max(tail_bound_, known);
  }
  const auto k = static_cast<std::size_t>(std::lower_bound(far_s_.begin(), far_s_.end(), x) - far_s_.begin());
  if (known > 0.0) return std::max(far_suffix_[k], known);
  return std::max(profile_->value(x) * (1.0 + safety_), far_suffix_[k]);
}

double UpperEnvelope::tail_sup(long m) const {
  if (m <= 0) return i0_;
  const long offset = m - 1;
  if (offset <= linear_units_) return suffix_[static_cast<std::size_t>(offset * per_unit_)];
  return std::min(suffix_.back(), far_tail_sup(rho_ + static_cast<double>(offset)));
}

double UpperEnvelope::operator()(double s) const {
  if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
  if (s < rho_) return k1_ * std::pow(s, -gamma_);
  const double u = s - rho_;
  if (u > 1e15) return std::min(suffix_.back(), far_tail_sup(s));
  const long m = static_cast<long>(std::floor(u)) + 1;
  const double t = u - static_cast<double>(m - 1);
  const double b = tail_sup(m);
  if (t >= 0.5) return b;
  const double a = tail_sup(m - 1);
  return a + (b - a) * (2.0 * t);
}

LowerEnvelope::LowerEnvelope(const NonlinearitySpec& spec, const EnvelopeOptions& opts)
    : profile_(spec.profile), safety_(opts.safety) {
  const double ratio = 1.0 + 1.0 / opts.samples_per_unit;
  std::vector<double> s;
  for (double v = 1e-12; v < opts.log_horizon; v *= ratio) s.push_back(v);
  const long count = static_cast<long>(opts.linear_horizon * opts.samples_per_unit);
  for (long j = 1; j <= count; ++j) s.push_back(static_cast<double>(j) / opts.samples_per_unit);
  s.push_back(opts.log_horizon);
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());

  std::vector<double> run(s.size());
  double m = 1.0;
  for (std::size_t j = 0; j < s.size(); ++j) {
    m = std::min(m, profile_->value(s[j]));
    run[j] = m;
  }
  // each knot carries the running infimum up to the next knot
  prefix_.resize(s.size());
  for (std::size_t j = 0; j < s.size(); ++j)
    prefix_[j] = run[std::min(j + 1, s.size() - 1)] * (1.0 - safety_);
  horizon_value_ = prefix_.back();
  s_ = std::move(s);
}

double LowerEnvelope::operator()(double s) const {
  const double floor = profile_->minorant(s) * (1.0 - safety_);
  return std::min(sampled(s), floor);
}

double LowerEnvelope::sampled(double s) const {
  if (s <= s_.front()) return prefix_.front();
  if (s >= s_.back()) {
    double m = horizon_value_;
    const double step = std::pow(10.0, 0.05);
    for (double t = s_.back(); t < s; t *= step) m = std::min(m, profile_->value(t) * (1.0 - safety_));
    return std::min(m, profile_->value(s) * (1.0 - safety_));
  }
  const auto j = static_cast<std::size_t>(std::upper_bound(s_.begin(), s_.end(), s) - s_.begin()) - 1;
  const double t = (s - s_[j]) / (s_[j + 1] - s_[j]);
  return prefix_[j] + (prefix_[j + 1] - prefix_[j]) * t;
}

std::string to_string(Scheme scheme) {
  return scheme == Scheme::Truncation ? "truncation" : "shift";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "truncation") return Scheme::Truncation;
  if (text == "shift") return Scheme::Shift;
  throw std::invalid_argument("unknown scheme '" + std::string(text) + "'");
}

RegularizedNonlinearity::RegularizedNonlinearity(const NonlinearitySpec& spec, double n, Scheme scheme)
    : profile_(spec.profile), n_(n), scheme_(scheme), monotone_(spec.nonincreasing()) {
  if (!(n >= 1.0)) throw std::invalid_argument("regularization index must be >= 1");
  if (scheme_ != Scheme::Truncation || !monotone_) return;
  double lo = 1e-300, hi = 1e300;
  if (profile_->value(lo) < n_) {
    kink_ = 0.0;
    return;
  }
  if (profile_->value(hi) >= n_) {
    kink_ = std::numeric_limits<double>::infinity();
    return;
  }
  for (int it = 0; it < 200 && hi / lo > 1.0 + 1e-15; ++it) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    (profile_->value(mid) >= n_ ? lo : hi) = mid;
  }
  kink_ = lo;
}

double RegularizedNonlinearity::operator()(double s) const {
  if (scheme_ == Scheme::Shift) return profile_->value(std::max(s, 0.0) + 1.0 / n_);
  if (s <= 0.0) return n_;
  return std::min(profile_->value(s), n_);
}

double RegularizedNonlinearity::slope(double s) const {
  if (scheme_ == Scheme::Shift) return s < 0.0 ? 0.0 : profile_->slope(s + 1.0 / n_);
  if (s <= 0.0 || profile_->value(s) >= n_) return 0.0;
  return profile_->slope(s);
}

double RegularizedNonlinearity::max_abs_slope(double lo, double hi) const {
  lo = std::max(lo, 0.0);
  hi = std::max(hi, lo);
  if (scheme_ == Scheme::Shift) return profile_->max_abs_slope(lo + 1.0 / n_, hi + 1.0 / n_);
  if (!monotone_) return profile_->max_abs_slope(std::max(lo, kTiny), hi);
  const double a = std::max(lo, kink_);
  if (a > hi) return 0.0;
  return profile_->max_abs_slope(std::max(a, kTiny), hi);
}

}  // namespace singlab
