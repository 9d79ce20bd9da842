#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace singlab {

enum class DomainKind { Interval, RadialBall };

std::string to_string(DomainKind kind);
DomainKind parse_domain_kind(std::string_view text);

/// Measure of the unit ball in R^N.
double unit_ball_measure(int dimension);

/// Uniform grid on (0,1) or on the radial coordinate of the unit ball B_1 in R^N.
///
/// Interval grids are vertex centred: `num_cells` interior nodes x_i = i h with
/// h = 1/(num_cells + 1). The Dirichlet nodes 0 and 1 are implicit.
///
/// Radial grids are cell centred: `num_cells` shells of width h = 1/num_cells,
/// nodes at the shell midpoints. The shell volumes are exact, so the node sum
/// of the constant 1 is |B_1| = pi^{N/2} / Gamma(N/2 + 1). The origin is a face
/// of zero area, which is how u'(0) = 0 enters the operator.
///
/// Link k joins node k-1 to node k. Link 0 and link size() join the first and
/// last node to the boundary (or to the origin face on radial grids).
class Grid {
 public:
  static Grid build(DomainKind kind, int dimension, int num_cells);

  DomainKind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  int num_cells() const { return num_cells_; }
  std::size_t size() const { return nodes_.size(); }
  double mesh_width() const { return h_; }

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> distance() const { return distance_; }

  std::span<const double> link_positions() const { return link_pos_; }
  std::span<const double> link_lengths() const { return link_len_; }
  std::span<const double> link_areas() const { return link_area_; }

  /// Control volume of node i as an interval of the coordinate.
  std::pair<double, double> cell(std::size_t i) const;

  double domain_measure() const;
  double boundary_measure() const;

 private:
  Grid() = default;

  DomainKind kind_ = DomainKind::Interval;
  int dimension_ = 1;
  int num_cells_ = 0;
  double h_ = 0.0;
  std::vector<double> nodes_, weights_, distance_;
  std::vector<double> link_pos_, link_len_, link_area_;
};

/// Node-sum quadrature of v.
double integrate(const Grid& grid, std::span<const double> v);

/// Samples fn(x) at every node, x being the node coordinate.
template <class Fn>
std::vector<double> sample_nodes(const Grid& grid, Fn&& fn) {
  std::vector<double> out(grid.size());
  auto x = grid.nodes();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(x[i]);
  return out;
}

/// Samples fn(delta) at every node.
template <class Fn>
std::vector<double> sample_distance(const Grid& grid, Fn&& fn) {
  std::vector<double> out(grid.size());
  auto d = grid.distance();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(d[i]);
  return out;
}

struct BoundaryStrip {
  double width = 0.0;
  std::vector<bool> mask;
};

/// Nodes with delta < eps. Requires 4h <= eps < 1/2.
BoundaryStrip boundary_strip(const Grid& grid, double eps);

/// (1/eps) * integral of v over the strip {delta < eps}.
double boundary_strip_integral(const Grid& grid, std::span<const double> v, double eps);

}  // namespace singlab
