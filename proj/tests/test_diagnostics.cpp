#include <cmath>
#include <numbers>

#include "doctest.h"
#include "singlab/datum.hpp"
#include "singlab/diagnostics.hpp"
#include "singlab/solver.hpp"

using namespace singlab;
using std::numbers::pi;

namespace {

DiscreteOperator laplacian(DomainKind kind, int N, int cells) {
  return DiscreteOperator::assemble(Grid::build(kind, N, cells), CoefficientField::constant(1.0));
}

const std::vector<int> kRadialLevels = {128, 256, 512, 1024};

struct Study {
  std::vector<double> h, values;
};

template <class Fn>
Study radial_study(int N, Fn&& quantity) {
  Study s;
  for (int n : kRadialLevels) {
    const auto op = laplacian(DomainKind::RadialBall, N, n);
    s.h.push_back(op.grid().mesh_width());
    s.values.push_back(quantity(op));
  }
  return s;
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("energy of a parabola") {
  for (int n : {31, 127}) {
    const auto op = laplacian(DomainKind::Interval, 1, n);
    const double h = op.grid().mesh_width();
    const auto u = sample_nodes(op.grid(), [](double x) { return x * (1 - x); });
    CHECK(std::abs(energy(op, u) - 1.0 / 3.0) <= h * h);
    auto Ku = op.apply_stiffness(u);
    double uKu = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) uKu += u[i] * Ku[i];
    CHECK(energy(op, u) == doctest::Approx(uKu).epsilon(1e-12));
  }
}

TEST_CASE("energy of radial profiles under refinement") {
  auto profile = [](double eta) {
    return [eta](const DiscreteOperator& op) {
      return energy(op, sample_nodes(op.grid(), [&](double r) { return example_ex_solution(eta, r); }));
    };
  };
  const auto finite = radial_study(2, profile(0.8));
  CHECK(classify_refinement(finite.h, finite.values).verdict == Verdict::Bounded);
  const auto infinite = radial_study(2, profile(0.4));
  const auto v = classify_refinement(infinite.h, infinite.values);
  CHECK(v.verdict == Verdict::Divergent);
  CHECK(std::abs(v.exponent + 0.2) <= 0.05);
}

TEST_CASE("truncation energies") {
  const auto op = laplacian(DomainKind::RadialBall, 3, 256);
  const auto u = sample_nodes(op.grid(), [](double r) { return 1 - r * r; });
  const auto te = truncation_energy(op, u, 2.0, 1.0);
  CHECK(te.plain == doctest::Approx(energy(op, u)).epsilon(1e-14));
  CHECK(te.power == doctest::Approx(energy(op, u)).epsilon(1e-14));
  const auto low = truncation_energy(op, u, 0.5, 1.0);
  CHECK(low.plain < te.plain);

  const std::vector<double> c(op.size(), 0.3);
  const auto tc = truncation_energy(op, c, 1.0, 1.0);
  const double boundary = op.conductances().back() * 0.09;
  CHECK(tc.plain == doctest::Approx(boundary));
}

TEST_CASE("a power of the truncation restores finite energy") {
  const double gamma = 3.0, eta = 0.3;
  std::vector<double> h, plain, power;
  for (int n : kRadialLevels) {
    const auto op = laplacian(DomainKind::RadialBall, 2, n);
    const auto u = sample_nodes(op.grid(), [&](double r) { return example_ex_solution(eta, r); });
    const auto te = truncation_energy(op, u, 1.0, gamma);
    h.push_back(op.grid().mesh_width());
    plain.push_back(te.plain);
    power.push_back(te.power);
  }
  CHECK(classify_refinement(h, plain).verdict == Verdict::Divergent);
  CHECK(classify_refinement(h, power).verdict == Verdict::Bounded);
}

TEST_CASE("energy is quadratic") {
  const auto op = laplacian(DomainKind::RadialBall, 2, 100);
  const auto u = sample_nodes(op.grid(), [](double r) { return std::cos(r); });
  std::vector<double> v(u);
  for (auto& x : v) x *= -2.5;
  CHECK(energy(op, v) == doctest::Approx(6.25 * energy(op, u)).epsilon(1e-14));
}

TEST_CASE("G_k seminorms") {
  const auto g = Grid::build(DomainKind::Interval, 1, 255);
  const auto u = sample_nodes(g, [](double x) { return 4 * x * (1 - x); });
  CHECK(gk_seminorm(g, u, 2.0, 1.0) == 0.0);
  CHECK(gk_seminorm(g, u, 0.5, 1.0) == doctest::Approx(1.0).epsilon(1e-2));
  CHECK(intermediate_exponent(1) == 1.5);
  CHECK(intermediate_exponent(3) == doctest::Approx(1.25));
  CHECK_THROWS_AS(gk_seminorm(g, u, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("boundary indicator of distance powers") {
  const auto g = Grid::build(DomainKind::Interval, 1, (1 << 14) - 1);
  const auto eps = aligned_strip_widths(g, 6);
  for (double eta : {0.3, 0.6, 0.8}) {
    const auto u = sample_distance(g, [&](double d) { return std::pow(d, eta); });
    const auto c = boundary_indicator_curve(g, u, eps);
    CAPTURE(eta);
    CHECK(std::abs(c.exponent - eta) <= 0.05);
    CHECK(c.satisfied);
  }
  const std::vector<double> one(g.size(), 1.0);
  const auto c = boundary_indicator_curve(g, one, eps);
  for (double v : c.values) CHECK(std::abs(v - 2.0) <= g.mesh_width() / eps.front());
  CHECK_FALSE(c.satisfied);
}

TEST_CASE("boundary indicator of a solved model problem") {
  const auto op = laplacian(DomainKind::RadialBall, 2, 512);
  const std::vector<double> f(op.size(), 1.0);
  const auto r = continue_in_n(op, make_model_h(2.0), f, dyadic_schedule(30), Scheme::Truncation);
  REQUIRE(r.converged);
  const auto c = boundary_indicator_curve(op.grid(), r.u, aligned_strip_widths(op.grid(), 4));
  CHECK(c.satisfied);
  CHECK(c.exponent > 0.0);
}

TEST_CASE("weighted summability of the manufactured operator") {
  const double eta = 0.6;
  std::vector<double> h, plain, weighted;
  for (int n : kRadialLevels) {
    const auto op = laplacian(DomainKind::RadialBall, 2, n);
    const auto u = sample_nodes(op.grid(), [&](double r) { return example_ex_solution(eta, r); });
    const auto w = operator_norms(op, u);
    h.push_back(op.grid().mesh_width());
    plain.push_back(w.plain);
    weighted.push_back(w.weighted);
    double maxd = 0.0;
    for (double d : op.grid().distance()) maxd = std::max(maxd, d);
    CHECK(w.weighted <= maxd * w.plain);
  }
  const auto vp = classify_refinement(h, plain);
  CHECK(vp.verdict == Verdict::Divergent);
  CHECK(std::abs(vp.exponent - (eta - 1.0)) <= 0.1);
  const auto vw = classify_refinement(h, weighted);
  CHECK(vw.verdict == Verdict::Bounded);
  CHECK(vw.ratios.back() <= 1.1);
}

TEST_CASE("lower-order norms need a positive solution") {
  const auto g = Grid::build(DomainKind::Interval, 1, 15);
  std::vector<double> u(g.size(), 1.0), f(g.size(), 1.0);
  const auto w = lower_order_norms(g, make_model_h(1.0), f, u);
  CHECK(w.plain == doctest::Approx(integrate(g, f)));
  u[0] = 0.0;
  CHECK_THROWS_AS(lower_order_norms(g, make_model_h(1.0), f, u), std::invalid_argument);
}

TEST_CASE("refinement fits recover distance-power exponents") {
  std::vector<Grid> grids;
  std::vector<double> h;
  for (int k = 9; k <= 12; ++k) {
    grids.push_back(Grid::build(DomainKind::Interval, 1, (1 << k) - 1));
    h.push_back(grids.back().mesh_width());
  }
  for (double p : {-1.2, -1.5, -2.0}) {
    std::vector<double> vals;
    for (const auto& g : grids) vals.push_back(integrate(g, sample_distance(g, [&](double d) { return std::pow(d, p); })));
    const auto v = classify_refinement(h, vals);
    CAPTURE(p);
    CHECK(v.verdict == Verdict::Divergent);
    CHECK(std::abs(v.exponent - (p + 1.0)) <= 0.05);
  }
}

TEST_CASE("refinement verdict rule") {
  const std::vector<double> h = {0.1, 0.05, 0.025, 0.0125};
  CHECK(classify_refinement(h, std::vector<double>{1, 2, 4, 8}).verdict == Verdict::Divergent);
  CHECK(classify_refinement(h, std::vector<double>{1, 1.5, 1.75, 1.875}).verdict == Verdict::Bounded);
  CHECK(classify_refinement(h, std::vector<double>{1, 2, 3, 4}).verdict == Verdict::Divergent);
  CHECK(classify_refinement(h, std::vector<double>{1, 1.3, 1.5, 1.8}).verdict == Verdict::Divergent);
  CHECK(classify_refinement(h, std::vector<double>{1, 1.3, 1.4, 1.6}).verdict == Verdict::Inconclusive);
  CHECK(classify_refinement(h, std::vector<double>{2, 2, 2, 2}).verdict == Verdict::Bounded);
  CHECK_THROWS_AS(classify_refinement(std::vector<double>{0.1, 0.05}, std::vector<double>{1, 2}),
                  std::invalid_argument);
  CHECK_THROWS_AS(classify_refinement(std::vector<double>{0.1, 0.2, 0.05}, std::vector<double>{1, 2, 3}),
                  std::invalid_argument);
  for (auto v : {Verdict::Bounded, Verdict::Divergent, Verdict::Inconclusive, Verdict::Borderline})
    CHECK(parse_verdict(to_string(v)) == v);
}

TEST_CASE("L^m membership of data") {
  std::vector<Grid> grids;
  for (int k = 9; k <= 12; ++k) grids.push_back(Grid::build(DomainKind::Interval, 1, (1 << k) - 1));
  for (double m : {1.0, 2.0, 3.0}) {
    const std::vector<double> ms = {m};
    CHECK(lm_membership(grids, Datum::power_of_distance(-1.0 / (2 * m)), ms)[0].verdict.verdict == Verdict::Bounded);
  }
  const std::vector<double> one = {1.0};
  CHECK(lm_membership(grids, Datum::power_of_distance(-1.0), one)[0].verdict.verdict == Verdict::Divergent);

  std::vector<Grid> balls;
  for (int n : kRadialLevels) balls.push_back(Grid::build(DomainKind::RadialBall, 2, n));
  const std::vector<double> ms = {1.2, 2.5};
  const auto v = lm_membership(balls, Datum::example_ex(0.7, 1.0), ms);
  CHECK(v[0].verdict.verdict == Verdict::Bounded);
  CHECK(v[1].verdict.verdict == Verdict::Divergent);
  CHECK_THROWS_AS(lm_membership(grids, Datum::constant(1), std::vector<double>{0.5}), std::invalid_argument);
}

TEST_CASE("singularity coefficient of the Newtonian potential") {
  const auto op = laplacian(DomainKind::RadialBall, 3, 800);
  const auto f = Datum::mollified_atom(0.0, 1.0, 0.025).sample(op.grid());
  CHECK(integrate(op.grid(), f) == doctest::Approx(1.0).epsilon(1e-6));
  const auto u = op.solve(f);
  const double c = singularity_coefficient(op.grid(), u, 0.025);
  CHECK(std::abs(c - 1.0 / (4 * pi)) <= 0.05 / (4 * pi));

  const auto ring = sample_nodes(op.grid(), [](double r) { return 1.0 / r - 1.0 + 0.5 * r * r; });
  CHECK(singularity_coefficient(op.grid(), ring, 0.01) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(singularity_coefficient(op.grid(), u, 0.2), std::invalid_argument);
  const auto line = Grid::build(DomainKind::Interval, 1, 100);
  CHECK_THROWS_AS(singularity_coefficient(line, std::vector<double>(line.size(), 1.0), 0.01), std::invalid_argument);
}

TEST_CASE("G_k of continuation snapshots stays bounded in n") {
  const auto op = laplacian(DomainKind::Interval, 1, 255);
  const auto f = Datum::power_of_distance(-0.5).sample(op.grid());
  const auto c = continue_in_n(op, make_model_h(2.0), f, dyadic_schedule(20), Scheme::Truncation);
  REQUIRE(c.converged);
  double top = 0.0;
  for (const auto& s : c.snapshots) top = std::max(top, gk_seminorm(op.grid(), s.u, 0.05, 1.0));
  CHECK(top <= 2.0 * gk_seminorm(op.grid(), c.u, 0.05, 1.0));
}

}
