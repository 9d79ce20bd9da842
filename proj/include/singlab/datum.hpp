#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "singlab/geometry.hpp"

namespace singlab {

/// u = (1 - r^2)^eta and -Laplace u in R^N as functions of r.
double example_ex_solution(double eta, double r);
double example_ex_laplacian(double eta, int dimension, double r);

/// Newtonian solution of -Laplace u = r^-a on B_1 in R^N (2 < a < N):
/// u = (r^{2-a} - 1) / ((N - a)(a - 2)).
double example_luigi_solution(double a, int dimension, double r);

/// Nonnegative datum f, a sum of the components below. Atoms are sampled as
/// exact cell averages; every other component is sampled at the nodes.
class Datum {
 public:
  /// scale * delta^exponent
  struct PowerOfDistance { double exponent; double scale; };
  /// u^gamma (-Laplace u) with u = (1 - r^2)^eta, 0 < eta <= 1. Radial grids only.
  struct ExampleEx { double eta; double gamma; };
  /// max(1 / (d^{1/m} log(1/d)), 1) with d = min(delta, 1/e).
  struct LogProfile { double m; };
  /// 1 / (d^{1-gamma} (-log d)^a) with d = min(delta, 1/e).
  struct LogWeight { double gamma; double a; };
  /// mass * (1 + cos(pi |x - x0| / w)) normalized to unit mass, support |x - x0| < w.
  /// On radial grids the location must be the origin.
  struct MollifiedAtom { double location; double mass; double width; };
  /// scale * r^-a, radial grids only.
  struct RadialPower { double a; double scale; };
  /// r^-a u_a(r)^gamma with u_a the Newtonian solution above. Radial grids only.
  struct ExampleLuigi { double a; double gamma; };
  /// Piecewise linear in delta through (delta_i, f_i), constant outside.
  struct Table { std::vector<std::pair<double, double>> points; };

  using Component = std::variant<PowerOfDistance, ExampleEx, LogProfile, LogWeight, MollifiedAtom, RadialPower,
                                 ExampleLuigi, Table>;

  Datum() = default;
  explicit Datum(Component c) { parts_.push_back(std::move(c)); }

  static Datum constant(double c) { return Datum(PowerOfDistance{0.0, c}); }
  static Datum power_of_distance(double exponent, double scale = 1.0) {
    return Datum(PowerOfDistance{exponent, scale});
  }
  static Datum example_ex(double eta, double gamma);
  static Datum log_profile(double m);
  static Datum log_weight(double gamma, double a);
  static Datum mollified_atom(double location, double mass, double width);
  static Datum radial_power(double a, double scale = 1.0) { return Datum(RadialPower{a, scale}); }
  static Datum example_luigi(double a, double gamma);
  static Datum table(std::vector<std::pair<double, double>> points);

  Datum operator+(const Datum& other) const;

  const std::vector<Component>& components() const { return parts_; }

  /// Nodal values; throws if any value is negative or not finite.
  std::vector<double> sample(const Grid& grid) const;

  std::string describe() const;

 private:
  std::vector<Component> parts_;
};

}  // namespace singlab
