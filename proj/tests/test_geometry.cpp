#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "singlab/diagnostics.hpp"
#include "singlab/geometry.hpp"

using namespace singlab;

TEST_SUITE("geometry") {

TEST_CASE("interval grid with four cells") {
  const auto g = Grid::build(DomainKind::Interval, 1, 4);
  REQUIRE(g.size() == 4);
  CHECK(g.mesh_width() == doctest::Approx(0.2));
  const double expect[] = {0.2, 0.4, 0.6, 0.8};
  for (int i = 0; i < 4; ++i) CHECK(g.nodes()[i] == doctest::Approx(expect[i]));
  CHECK(g.distance()[0] == doctest::Approx(0.2));
  CHECK(g.distance()[3] == doctest::Approx(0.2));
}

TEST_CASE("grid preconditions") {
  CHECK_THROWS_AS(Grid::build(DomainKind::Interval, 1, 3), std::invalid_argument);
  CHECK_THROWS_AS(Grid::build(DomainKind::Interval, 2, 10), std::invalid_argument);
  CHECK_THROWS_AS(Grid::build(DomainKind::RadialBall, 1, 10), std::invalid_argument);
}

TEST_CASE("node invariants") {
  for (auto [kind, N] : {std::pair{DomainKind::Interval, 1}, std::pair{DomainKind::RadialBall, 2},
                         std::pair{DomainKind::RadialBall, 3}}) {
    const auto g = Grid::build(kind, N, 37);
    auto x = g.nodes();
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(x[i] > 0.0);
      CHECK(x[i] < 1.0);
      CHECK(g.weights()[i] > 0.0);
      CHECK(g.distance()[i] > 0.0);
      if (i > 0) CHECK(x[i] > x[i - 1]);
    }
  }
}

TEST_CASE("ball volume from the node sum") {
  const auto g = Grid::build(DomainKind::RadialBall, 3, 10);
  const std::vector<double> one(g.size(), 1.0);
  const double vol = 4.0 * std::numbers::pi / 3.0;
  CHECK(std::abs(integrate(g, one) - vol) <= 0.05 * vol);
  CHECK(unit_ball_measure(2) == doctest::Approx(std::numbers::pi));
}

TEST_CASE("integrate constants and polynomials") {
  for (int n : {15, 31, 63}) {
    const auto g = Grid::build(DomainKind::Interval, 1, n);
    const double h = g.mesh_width();
    const std::vector<double> one(g.size(), 1.0);
    CHECK(std::abs(integrate(g, one) - 1.0) <= 2.0 * h);
    const auto v = sample_nodes(g, [](double x) { return x * (1 - x); });
    CHECK(std::abs(integrate(g, v) - 1.0 / 6.0) <= h * h);
  }
}

TEST_CASE("integrate a boundary singularity against adaptive quadrature") {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double exact = 2.0 * ts.integrate([](double x) { return std::pow(x, -0.5); }, 0.0, 0.5);
  CHECK(exact == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-10));
  std::vector<double> hs, errs;
  for (int k = 10; k <= 14; ++k) {
    const auto g = Grid::build(DomainKind::Interval, 1, (1 << k) - 1);
    const auto v = sample_distance(g, [](double d) { return std::pow(d, -0.5); });
    hs.push_back(g.mesh_width());
    errs.push_back(std::abs(integrate(g, v) - exact));
  }
  for (std::size_t j = 1; j < errs.size(); ++j) CHECK(errs[j] < errs[j - 1]);
  CHECK(loglog_slope(hs, errs) == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("integrate is linear") {
  const auto g = Grid::build(DomainKind::RadialBall, 3, 50);
  const auto u = sample_nodes(g, [](double r) { return std::cos(r); });
  const auto v = sample_nodes(g, [](double r) { return r * r * r; });
  std::vector<double> w(g.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 2.5 * u[i] - 0.75 * v[i];
  CHECK(integrate(g, w) == doctest::Approx(2.5 * integrate(g, u) - 0.75 * integrate(g, v)).epsilon(1e-14));
}

TEST_CASE("strip integral of constants") {
  const auto g = Grid::build(DomainKind::Interval, 1, 999);
  const std::vector<double> one(g.size(), 1.0);
  for (double eps : {0.01, 0.05, 0.2, 0.45}) {
    const double v = boundary_strip_integral(g, one, eps);
    CHECK(std::abs(v - 2.0) <= 4.0 * g.mesh_width() / eps);
    CHECK(v <= 2.0 * 1.0 + 4.0 * g.mesh_width() / eps);
  }
}

TEST_CASE("strip integral of the distance") {
  const auto g = Grid::build(DomainKind::Interval, 1, 999);
  const auto d = sample_distance(g, [](double t) { return t; });
  CHECK(boundary_strip_integral(g, d, 0.1) == doctest::Approx(0.1).epsilon(0.1));
}

TEST_CASE("strip indicator of a square root profile") {
  const auto g = Grid::build(DomainKind::Interval, 1, (1 << 14) - 1);
  const auto v = sample_distance(g, [](double t) { return std::sqrt(t); });
  std::vector<double> eps = {0.0025, 0.005, 0.01, 0.02, 0.04};
  std::vector<double> vals;
  for (double e : eps) {
    vals.push_back(boundary_strip_integral(g, v, e));
    CHECK(vals.back() == doctest::Approx(4.0 / 3.0 * std::sqrt(e)).epsilon(0.05));
  }
  CHECK(loglog_slope(eps, vals) == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("under-resolved strips are rejected") {
  const auto g = Grid::build(DomainKind::Interval, 1, 99);
  const std::vector<double> one(g.size(), 1.0);
  CHECK_THROWS_AS(boundary_strip_integral(g, one, 2.0 * g.mesh_width()), std::invalid_argument);
  CHECK_THROWS_AS(boundary_strip(g, 0.6), std::invalid_argument);
  const auto s = boundary_strip(g, 0.1);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(s.mask[i] == (g.distance()[i] < 0.1));
}

TEST_CASE("distance weights are integrable exactly when p > -1") {
  std::vector<double> hs;
  std::vector<Grid> grids;
  for (int k = 8; k <= 11; ++k) {
    grids.push_back(Grid::build(DomainKind::Interval, 1, (1 << k) - 1));
    hs.push_back(grids.back().mesh_width());
  }
  for (double p : {-0.3, -0.5, -0.8, -1.0, -1.3, -2.0}) {
    std::vector<double> vals;
    for (const auto& g : grids) vals.push_back(integrate(g, sample_distance(g, [&](double t) { return std::pow(t, p); })));
    const auto v = classify_refinement(hs, vals);
    CAPTURE(p);
    CHECK(v.verdict == (p > -1.0 ? Verdict::Bounded : Verdict::Divergent));
  }
}

}
