#include "singlab/datum.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace singlab {

namespace {

constexpr double kInvE = 0.36787944117144233;

void require_radial(const Grid& grid, const char* what) {
  if (grid.kind() != DomainKind::RadialBall)
    throw std::invalid_argument(std::string(what) + " needs a radial grid");
}

// Unnormalized bump profile and its integral over the ball (or the line).
double bump(double t) { return t < 1.0 ? 1.0 + std::cos(std::numbers::pi * t) : 0.0; }

double atom_normalization(int dimension, bool radial, double w) {
  if (!radial) return 2.0 * w;
  const double area = dimension * unit_ball_measure(dimension);
  using Q = boost::math::quadrature::gauss<double, 30>;
  const double I = Q::integrate([&](double r) { return bump(r / w) * std::pow(r, dimension - 1.0); }, 0.0, w);
  return area * I;
}

double cell_average(const Grid& grid, std::size_t i, double location, double w) {
  const auto [lo, hi] = grid.cell(i);
  const bool radial = grid.kind() == DomainKind::RadialBall;
  const double a = std::max(lo, radial ? 0.0 : location - w);
  const double b = std::min(hi, location + w);
  if (radial ? lo >= w : (hi <= location - w || lo >= location + w)) return 0.0;
  using Q = boost::math::quadrature::gauss<double, 20>;
  const int N = grid.dimension();
  auto weight = [&](double x) { return radial ? std::pow(x, N - 1.0) : 1.0; };
  const double top = Q::integrate([&](double x) { return bump(std::abs(x - location) / w) * weight(x); }, a, b);
  const double vol = Q::integrate(weight, lo, hi);
  return top / vol;
}

}  // namespace

double example_ex_solution(double eta, double r) { return std::pow(1.0 - r * r, eta); }

double example_ex_laplacian(double eta, int dimension, double r) {
  const double q = 1.0 - r * r;
  return 2.0 * eta * dimension * std::pow(q, eta - 1.0) - 4.0 * eta * (eta - 1.0) * r * r * std::pow(q, eta - 2.0);
}

double example_luigi_solution(double a, int dimension, double r) {
  return (std::pow(r, 2.0 - a) - 1.0) / ((dimension - a) * (a - 2.0));
}

Datum Datum::example_ex(double eta, double gamma) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("example_ex needs 0 < eta <= 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("example_ex needs gamma > 0");
  return Datum(ExampleEx{eta, gamma});
}

Datum Datum::log_profile(double m) {
  if (!(m >= 1.0)) throw std::invalid_argument("log profile needs m >= 1");
  return Datum(LogProfile{m});
}

Datum Datum::log_weight(double gamma, double a) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("log weight needs 0 < gamma < 1");
  return Datum(LogWeight{gamma, a});
}

Datum Datum::mollified_atom(double location, double mass, double width) {
  if (!(mass >= 0.0)) throw std::invalid_argument("atom mass must be nonnegative");
  if (!(width > 0.0)) throw std::invalid_argument("atom width must be positive");
  return Datum(MollifiedAtom{location, mass, width});
}

Datum Datum::example_luigi(double a, double gamma) {
  if (!(a > 2.0)) throw std::invalid_argument("example_luigi needs a > 2");
  if (!(gamma > 0.0)) throw std::invalid_argument("example_luigi needs gamma > 0");
  return Datum(ExampleLuigi{a, gamma});
}

Datum Datum::table(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw std::invalid_argument("datum table needs two points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].second >= 0.0)) throw std::invalid_argument("datum table values must be nonnegative");
    if (i > 0 && !(points[i].first > points[i - 1].first))
      throw std::invalid_argument("datum table abscissae must increase");
  }
  return Datum(Table{std::move(points)});
}

Datum Datum::operator+(const Datum& other) const {
  Datum out = *this;
  out.parts_.insert(out.parts_.end(), other.parts_.begin(), other.parts_.end());
  return out;
}

std::vector<double> Datum::sample(const Grid& grid) const {
  const std::size_t n = grid.size();
  auto x = grid.nodes();
  auto d = grid.distance();
  const int N = grid.dimension();
  const bool radial = grid.kind() == DomainKind::RadialBall;
  std::vector<double> f(n, 0.0);

  for (const auto& part : parts_) {
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, PowerOfDistance>) {
            for (std::size_t i = 0; i < n; ++i) f[i] += c.scale * std::pow(d[i], c.exponent);
          } else if constexpr (std::is_same_v<T, ExampleEx>) {
            require_radial(grid, "example_ex datum");
            for (std::size_t i = 0; i < n; ++i)
              f[i] += std::pow(example_ex_solution(c.eta, x[i]), c.gamma) * example_ex_laplacian(c.eta, N, x[i]);
          } else if constexpr (std::is_same_v<T, LogProfile>) {
            for (std::size_t i = 0; i < n; ++i) {
              const double t = std::min(d[i], kInvE);
              f[i] += std::max(1.0 / (std::pow(t, 1.0 / c.m) * std::log(1.0 / t)), 1.0);
            }
          } else if constexpr (std::is_same_v<T, LogWeight>) {
            for (std::size_t i = 0; i < n; ++i) {
              const double t = std::min(d[i], kInvE);
              f[i] += 1.0 / (std::pow(t, 1.0 - c.gamma) * std::pow(-std::log(t), c.a));
            }
          } else if constexpr (std::is_same_v<T, MollifiedAtom>) {
            if (radial && c.location != 0.0) throw std::invalid_argument("radial atoms must sit at the origin");
            const double norm = atom_normalization(N, radial, c.width);
            for (std::size_t i = 0; i < n; ++i) f[i] += c.mass * cell_average(grid, i, c.location, c.width) / norm;
          } else if constexpr (std::is_same_v<T, RadialPower>) {
            require_radial(grid, "radial power datum");
            for (std::size_t i = 0; i < n; ++i) f[i] += c.scale * std::pow(x[i], -c.a);
          } else if constexpr (std::is_same_v<T, ExampleLuigi>) {
            require_radial(grid, "example_luigi datum");
            if (!(c.a < N)) throw std::invalid_argument("example_luigi needs a < N");
            for (std::size_t i = 0; i < n; ++i)
              f[i] += std::pow(x[i], -c.a) * std::pow(example_luigi_solution(c.a, N, x[i]), c.gamma);
          } else {
            const auto& p = c.points;
            for (std::size_t i = 0; i < n; ++i) {
              const double t = d[i];
              double v;
              if (t <= p.front().first) v = p.front().second;
              else if (t >= p.back().first) v = p.back().second;
              else {
                auto it = std::upper_bound(p.begin(), p.end(), t, [](double s, const auto& q) { return s < q.first; });
                const auto& [d1, f1] = *it;
                const auto& [d0, f0] = *(it - 1);
                v = f0 + (f1 - f0) * (t - d0) / (d1 - d0);
              }
              f[i] += v;
            }
          }
        },
        part);
  }
  for (double v : f)
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("datum is negative or not finite");
  return f;
}

std::string Datum::describe() const {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& part : parts_) {
    if (!first) os << " + ";
    first = false;
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, PowerOfDistance>) os << c.scale << "*delta^" << c.exponent;
          else if constexpr (std::is_same_v<T, ExampleEx>) os << "example_ex(eta=" << c.eta << ",gamma=" << c.gamma << ")";
          else if constexpr (std::is_same_v<T, LogProfile>) os << "log_profile(m=" << c.m << ")";
          else if constexpr (std::is_same_v<T, LogWeight>) os << "log_weight(gamma=" << c.gamma << ",a=" << c.a << ")";
          else if constexpr (std::is_same_v<T, MollifiedAtom>)
            os << "atom(x0=" << c.location << ",mass=" << c.mass << ",w=" << c.width << ")";
          else if constexpr (std::is_same_v<T, RadialPower>) os << c.scale << "*r^-" << c.a;
          else if constexpr (std::is_same_v<T, ExampleLuigi>) os << "example_luigi(a=" << c.a << ",gamma=" << c.gamma << ")";
          else os << "table(" << c.points.size() << " points)";
        },
        part);
  }
  return first ? "0" : os.str();
}

}  // namespace singlab
