#include "singlab/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace singlab {

std::string to_string(DomainKind kind) {
  return kind == DomainKind::Interval ? "interval" : "radial_ball";
}

DomainKind parse_domain_kind(std::string_view text) {
  if (text == "interval") return DomainKind::Interval;
  if (text == "radial_ball" || text == "ball") return DomainKind::RadialBall;
  throw std::invalid_argument("unknown domain kind '" + std::string(text) + "'");
}

double unit_ball_measure(int dimension) {
  const double n = dimension;
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

Grid Grid::build(DomainKind kind, int dimension, int num_cells) {
  if (num_cells < 4) throw std::invalid_argument("grid needs at least 4 cells");
  if (kind == DomainKind::Interval && dimension != 1)
    throw std::invalid_argument("interval grids are one dimensional");
  if (kind == DomainKind::RadialBall && dimension < 2)
    throw std::invalid_argument("radial grids need dimension >= 2");

  Grid g;
  g.kind_ = kind;
  g.dimension_ = dimension;
  g.num_cells_ = num_cells;
  const auto n = static_cast<std::size_t>(num_cells);
  g.nodes_.resize(n);
  g.weights_.resize(n);
  g.distance_.resize(n);
  g.link_pos_.resize(n + 1);
  g.link_len_.resize(n + 1);
  g.link_area_.resize(n + 1);

  if (kind == DomainKind::Interval) {
    const double h = 1.0 / (num_cells + 1);
    g.h_ = h;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = (i + 1) * h;
      g.nodes_[i] = x;
      g.weights_[i] = h;
      g.distance_[i] = std::min(x, 1.0 - x);
    }
    for (std::size_t k = 0; k <= n; ++k) {
      g.link_pos_[k] = (k + 0.5) * h;
      g.link_len_[k] = h;
      g.link_area_[k] = 1.0;
    }
    return g;
  }

  const double h = 1.0 / num_cells;
  const double omega = unit_ball_measure(dimension);
  const double N = dimension;
  g.h_ = h;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = i * h, hi = (i + 1) * h;
    g.nodes_[i] = (i + 0.5) * h;
    g.weights_[i] = omega * (std::pow(hi, N) - std::pow(lo, N));
    g.distance_[i] = 1.0 - g.nodes_[i];
  }
  for (std::size_t k = 0; k <= n; ++k) {
    const double r = k * h;
    g.link_pos_[k] = r;
    g.link_len_[k] = (k == 0 || k == n) ? 0.5 * h : h;
    g.link_area_[k] = N * omega * std::pow(r, N - 1.0);
  }
  return g;
}

std::pair<double, double> Grid::cell(std::size_t i) const {
  return {nodes_[i] - 0.5 * h_, nodes_[i] + 0.5 * h_};
}

double Grid::domain_measure() const {
  return kind_ == DomainKind::Interval ? 1.0 : unit_ball_measure(dimension_);
}

double Grid::boundary_measure() const {
  return kind_ == DomainKind::Interval ? 2.0 : dimension_ * unit_ball_measure(dimension_);
}

double integrate(const Grid& grid, std::span<const double> v) {
  if (v.size() != grid.size()) throw std::invalid_argument("integrate: size mismatch");
  auto w = grid.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += w[i] * v[i];
  return s;
}

BoundaryStrip boundary_strip(const Grid& grid, double eps) {
  if (!(eps > 0.0) || eps >= 0.5) throw std::invalid_argument("strip width must lie in (0, 1/2)");
  if (eps < 4.0 * grid.mesh_width() * (1.0 - 1e-12))
    throw std::invalid_argument("under-resolved strip: width below four mesh widths");
  BoundaryStrip strip;
  strip.width = eps;
  auto d = grid.distance();
  strip.mask.resize(grid.size());
  for (std::size_t i = 0; i < d.size(); ++i) strip.mask[i] = d[i] < eps;
  return strip;
}

double boundary_strip_integral(const Grid& grid, std::span<const double> v, double eps) {
  if (v.size() != grid.size()) throw std::invalid_argument("strip integral: size mismatch");
  const auto strip = boundary_strip(grid, eps);
  auto w = grid.weights();
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (strip.mask[i]) s += w[i] * v[i];
  return s / eps;
}

}  // namespace singlab
