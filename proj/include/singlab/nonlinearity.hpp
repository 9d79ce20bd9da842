#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace singlab {

double truncate_T(double k, double s);
double truncate_G(double k, double s);

/// Scalar profile s -> h(s) on (0, inf).
class Profile {
 public:
  virtual ~Profile() = default;
  virtual double value(double s) const = 0;
  /// Derivative where it exists (one sided at kinks). Default is a central difference.
  virtual double slope(double s) const;
  /// Upper bound for |h'| on [lo, hi], lo > 0. The default samples the slope
  /// and is not certified.
  virtual double max_abs_slope(double lo, double hi) const;
  /// Known nonincreasing minorant of value(), +inf when none is known.
  virtual double minorant(double s) const;
  /// Known bound for sup of value() over [s, inf), 0 when none is known.
  virtual double tail_majorant(double s) const;
};

enum class Monotonicity { Nonincreasing, General };

/// h together with the structural constants of (h1)/(h2):
///   h(s) <= k1 s^-gamma for s < omega_low,
///   h(s) <= k2 s^-theta for s > omega_high (when theta is set).
struct NonlinearitySpec {
  std::string name;
  std::shared_ptr<const Profile> profile;
  double gamma = 1.0;
  std::optional<double> theta;
  double k1 = 1.0;
  std::optional<double> k2;
  double omega_low = 1.0;
  std::optional<double> omega_high;
  double h_infinity = 0.0;
  Monotonicity monotonicity = Monotonicity::Nonincreasing;
  /// Allowed |h(s) - h(inf)| at s = 1e6.
  double limit_tolerance = 1e-2;

  double operator()(double s) const { return profile->value(s); }
  double slope(double s) const { return profile->slope(s); }
  bool nonincreasing() const { return monotonicity == Monotonicity::Nonincreasing; }
};

/// h(s) = s^-gamma.
NonlinearitySpec make_model_h(double gamma);

/// h(s) = max(c_inf, min(cap, k1 s^-gamma)).
NonlinearitySpec make_bounded_h(double c_inf, double gamma, double k1 = 1.0, double cap = 1.0);

/// h(s) = s^-gamma for s < 1 and s^-theta for s >= 1.
NonlinearitySpec make_two_power_h(double gamma, double theta);

/// h(s) = c.
NonlinearitySpec make_constant_h(double c);

/// h(s) = s^-gamma (1.5 + 0.5 sin s). Not monotone.
NonlinearitySpec make_oscillating_h(double gamma);

/// Nonincreasing power law with a positive bump on [center - width, center + width].
NonlinearitySpec make_bump_h(double gamma, double center, double width, double height);

/// Piecewise linear through the points (s_i, h_i), h_0 (s_0/s)^gamma below the
/// first point and the constant h_last beyond the last one.
NonlinearitySpec make_table_h(std::vector<std::pair<double, double>> points, double gamma);

struct AssumptionReport {
  bool h1 = true;
  bool h2 = true;
  bool limit = true;
  bool monotone = true;
  bool nonnegative = true;
  bool all() const { return h1 && h2 && limit && monotone && nonnegative; }
};

/// Spot checks of (h1), (h2), the limit at infinity and the monotone flag on
/// log-spaced samples.
AssumptionReport check_assumptions(const NonlinearitySpec& spec);

struct EnvelopeOptions {
  /// Linear samples per unit length for the tail suprema.
  int samples_per_unit = 32;
  /// End of the linearly sampled range (relative to rho).
  double linear_horizon = 4096.0;
  /// End of the log sampled range.
  double log_horizon = 1e8;
  /// Relative inflation of sampled suprema (and deflation of infima).
  double safety = 1e-3;
};

/// Nonincreasing continuous majorant built from the tail suprema
/// i_m = sup_{[rho+m-1, inf)} h: k1 s^-gamma on (0, rho), then on each
/// [rho+m-1, rho+m] a linear descent from i_{m-1} to i_m over the first half
/// and the constant i_m over the second half.
class UpperEnvelope {
 public:
  UpperEnvelope(const NonlinearitySpec& spec, const EnvelopeOptions& opts = {});
  double operator()(double s) const;
  double rho() const { return rho_; }
  /// i_m, m >= 0 (i_0 = k1 rho^-gamma).
  double tail_sup(long m) const;

 private:
  double far_tail_sup(double x) const;

  std::shared_ptr<const Profile> profile_;
  double gamma_ = 1.0, k1_ = 1.0, rho_ = 1.0, i0_ = 1.0;
  std::optional<double> theta_, k2_, omega_high_;
  double safety_ = 0.0;
  int per_unit_ = 32;
  long linear_units_ = 0;
  // suffix_[j] bounds h on [rho + j/per_unit, inf) for the aligned linear samples.
  std::vector<double> suffix_;
  // Log-spaced samples beyond the linear range and their suffix suprema.
  std::vector<double> far_s_, far_suffix_;
  double tail_bound_ = 0.0;
};

/// Nonincreasing continuous minorant min(1, inf_{(0,s]} h), positive on
/// compacts. Being capped by 1 it sits below T_n(h) for every n >= 1.
class LowerEnvelope {
 public:
  LowerEnvelope(const NonlinearitySpec& spec, const EnvelopeOptions& opts = {});
  double operator()(double s) const;

 private:
  double sampled(double s) const;

  std::shared_ptr<const Profile> profile_;
  double safety_ = 0.0;
  std::vector<double> s_, prefix_;
  double horizon_value_ = 0.0;
};

enum class Scheme { Truncation, Shift };

std::string to_string(Scheme scheme);
Scheme parse_scheme(std::string_view text);

/// h_n: min(h, n) (value n for s <= 0) or h(s + 1/n).
class RegularizedNonlinearity {
 public:
  RegularizedNonlinearity(const NonlinearitySpec& spec, double n, Scheme scheme);
  double operator()(double s) const;
  /// Generalized derivative, zero on the truncated plateau.
  double slope(double s) const;
  /// Upper bound for |h_n'| on [lo, hi].
  double max_abs_slope(double lo, double hi) const;
  double level() const { return n_; }
  Scheme scheme() const { return scheme_; }

 private:
  std::shared_ptr<const Profile> profile_;
  double n_;
  Scheme scheme_;
  bool monotone_;
  // For nonincreasing h: h >= n exactly on (0, kink_].
  double kink_ = 0.0;
};

}  // namespace singlab
