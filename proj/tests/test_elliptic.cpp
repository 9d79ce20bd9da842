#include <cmath>
#include <numbers>

#include "doctest.h"
#include "singlab/datum.hpp"
#include "singlab/diagnostics.hpp"
#include "singlab/elliptic.hpp"
#include "singlab/nonlinearity.hpp"

using namespace singlab;
using std::numbers::pi;

namespace {

DiscreteOperator laplacian(DomainKind kind, int N, int cells) {
  return DiscreteOperator::assemble(Grid::build(kind, N, cells), CoefficientField::constant(1.0));
}

double sup_error(std::span<const double> a, std::span<const double> b, std::size_t skip_last = 0) {
  double e = 0.0;
  for (std::size_t i = 0; i + skip_last < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

}  // namespace

TEST_SUITE("elliptic_core") {

TEST_CASE("three-point stencil on the interval") {
  const auto op = laplacian(DomainKind::Interval, 1, 9);
  const double h = op.grid().mesh_width();
  std::vector<double> e(op.size(), 0.0);
  e[4] = 1.0;
  const auto Le = op.apply(e);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double expect = i == 4 ? 2.0 / (h * h) : (i == 3 || i == 5 ? -1.0 / (h * h) : 0.0);
    CHECK(Le[i] == doctest::Approx(expect));
  }
  CHECK(op.is_m_matrix());
}

TEST_CASE("m-matrix structure for variable coefficients") {
  const auto a = CoefficientField::from_function([](double x) { return 1.0 + 0.5 * std::sin(3 * x); }, 0.5, 1.5, 1.5);
  for (auto [kind, N] : {std::pair{DomainKind::Interval, 1}, std::pair{DomainKind::RadialBall, 2},
                         std::pair{DomainKind::RadialBall, 5}}) {
    const auto op = DiscreteOperator::assemble(Grid::build(kind, N, 40), a);
    CHECK(op.is_m_matrix());
  }
}

TEST_CASE("coefficient preconditions") {
  const auto g = Grid::build(DomainKind::Interval, 1, 20);
  CHECK_THROWS_AS(CoefficientField::constant(0.0), std::invalid_argument);
  CHECK_THROWS_AS(CoefficientField::from_function([](double) { return 1.0; }, 2.0, 1.0, 0.0), std::invalid_argument);
  const auto bad_bounds = CoefficientField::from_function([](double x) { return 1.0 + x; }, 1.0, 1.5, 1.0);
  CHECK_THROWS_AS(DiscreteOperator::assemble(g, bad_bounds), std::invalid_argument);
  const auto bad_lip = CoefficientField::from_function([](double x) { return 1.0 + x; }, 1.0, 2.0, 0.5);
  CHECK_THROWS_AS(DiscreteOperator::assemble(g, bad_lip), std::invalid_argument);
}

TEST_CASE("second-order consistency on the interval") {
  std::vector<double> hs, errs;
  for (int n : {15, 31, 63, 127}) {
    const auto op = laplacian(DomainKind::Interval, 1, n);
    const auto u = sample_nodes(op.grid(), [](double x) { return std::sin(pi * x); });
    const auto exact = sample_nodes(op.grid(), [](double x) { return pi * pi * std::sin(pi * x); });
    hs.push_back(op.grid().mesh_width());
    errs.push_back(sup_error(op.apply(u), exact));
  }
  CHECK(loglog_slope(hs, errs) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("variable coefficient manufactured solution") {
  const auto a = CoefficientField::from_function([](double x) { return 1.0 + x; }, 1.0, 2.0, 1.0);
  for (int n : {15, 63}) {
    const auto op = DiscreteOperator::assemble(Grid::build(DomainKind::Interval, 1, n), a);
    const double h = op.grid().mesh_width();
    const auto u = sample_nodes(op.grid(), [](double x) { return x * (1 - x); });
    const auto rhs = sample_nodes(op.grid(), [](double x) { return 1.0 + 4.0 * x; });
    CHECK(sup_error(op.apply(u), rhs) <= h * h);
    CHECK(sup_error(op.solve(rhs), u) <= h * h);
  }
}

TEST_CASE("radial consistency away from the Dirichlet cell") {
  for (int N : {2, 3}) {
    std::vector<double> hs, errs;
    for (int n : {32, 64, 128, 256}) {
      const auto op = laplacian(DomainKind::RadialBall, N, n);
      const auto u = sample_nodes(op.grid(), [](double r) { return std::cos(0.5 * pi * r); });
      const auto exact = sample_nodes(op.grid(), [&](double r) {
        const double k = 0.5 * pi;
        return k * k * std::cos(k * r) + (N - 1) * k * std::sin(k * r) / r;
      });
      hs.push_back(op.grid().mesh_width());
      errs.push_back(sup_error(op.apply(u), exact, 1));
    }
    CAPTURE(N);
    CHECK(loglog_slope(hs, errs) == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("solves with a constant right-hand side") {
  const auto op1 = laplacian(DomainKind::Interval, 1, 63);
  const auto u1 = op1.solve(std::vector<double>(op1.size(), 1.0));
  const auto x1 = sample_nodes(op1.grid(), [](double x) { return 0.5 * x * (1 - x); });
  CHECK(sup_error(u1, x1) <= 1e-12);

  std::vector<double> hs, errs;
  for (int n : {32, 64, 128}) {
    const auto op = laplacian(DomainKind::RadialBall, 3, n);
    const auto u = op.solve(std::vector<double>(op.size(), 1.0));
    const auto exact = sample_nodes(op.grid(), [](double r) { return (1 - r * r) / 6.0; });
    hs.push_back(op.grid().mesh_width());
    errs.push_back(sup_error(u, exact));
  }
  CHECK(errs.back() <= hs.back() * hs.back());
  CHECK(loglog_slope(hs, errs) >= 1.9);
}

TEST_CASE("an approximate point source reproduces the Green function") {
  double prev = 1.0;
  for (double w : {0.05, 0.02, 0.01}) {
    const auto op = laplacian(DomainKind::Interval, 1, 2047);
    const auto f = Datum::mollified_atom(0.5, 1.0, w).sample(op.grid());
    CHECK(integrate(op.grid(), f) == doctest::Approx(1.0).epsilon(1e-9));
    const auto u = op.solve(f);
    const double err = std::abs(u[1023] - 0.25);
    CHECK(op.grid().nodes()[1023] == doctest::Approx(0.5));
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev <= 5e-3);
}

TEST_CASE("first eigenpair of the interval") {
  std::vector<double> hs, errs;
  for (int n : {31, 63, 127}) {
    const auto op = laplacian(DomainKind::Interval, 1, n);
    const auto eig = first_eigenpair(op);
    CHECK(eig.residual <= 1e-8 * eig.lambda);
    const auto s = sample_nodes(op.grid(), [](double x) { return std::sin(pi * x); });
    CHECK(sup_error(eig.phi, s) <= 10.0 * op.grid().mesh_width() * op.grid().mesh_width());
    const double h = op.grid().mesh_width();
    const double discrete = 4.0 / (h * h) * std::pow(std::sin(0.5 * pi * h), 2);
    CHECK(eig.lambda == doctest::Approx(discrete).epsilon(1e-9));
    hs.push_back(h);
    errs.push_back(std::abs(eig.lambda - pi * pi));
  }
  CHECK(errs.back() <= std::pow(pi, 4) / 12.0 * hs.back() * hs.back());
  CHECK(loglog_slope(hs, errs) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("first eigenpair of the ball in three dimensions") {
  std::vector<double> hs, errs;
  for (int n : {32, 64, 128}) {
    const auto op = laplacian(DomainKind::RadialBall, 3, n);
    const auto eig = first_eigenpair(op);
    CHECK(eig.residual <= 1e-8 * eig.lambda);
    for (double v : eig.phi) CHECK(v > 0.0);
    hs.push_back(op.grid().mesh_width());
    errs.push_back(std::abs(eig.lambda - pi * pi));
  }
  CHECK(errs.back() <= 0.01 * pi * pi);
  CHECK(errs.back() < errs.front());
}

TEST_CASE("eigenfunction is comparable to the distance") {
  for (auto [kind, N] : {std::pair{DomainKind::Interval, 1}, std::pair{DomainKind::RadialBall, 2},
                         std::pair{DomainKind::RadialBall, 3}}) {
    const auto eig = first_eigenpair(laplacian(kind, N, 128));
    CHECK(eig.c1 > 0.0);
    CHECK(eig.c2 / eig.c1 < 10.0);
  }
}

TEST_CASE("torsion function and its scaling") {
  const auto op = laplacian(DomainKind::Interval, 1, 127);
  const auto xi = torsion_function(op);
  const auto exact = sample_nodes(op.grid(), [](double x) { return 0.5 * x * (1 - x); });
  CHECK(sup_error(xi, exact) <= 1e-12);
  CHECK(min_distance_ratio(op.grid(), xi) >= 0.24);
  const auto xi2 = torsion_function(op.scaled(2.0));
  for (std::size_t i = 0; i < xi.size(); ++i) CHECK(xi2[i] == doctest::Approx(0.5 * xi[i]));
  CHECK_THROWS_AS(op.scaled(0.0), std::invalid_argument);
}

TEST_CASE("barrier profiles") {
  const auto op = laplacian(DomainKind::Interval, 1, 63);
  const auto eig = first_eigenpair(op);
  const auto b1 = barrier(eig, 3.0, 1.0);
  const auto bh = barrier(eig, 3.0, 0.5);
  for (std::size_t i = 0; i < b1.size(); ++i) {
    CHECK(b1[i] == doctest::Approx(3.0 * eig.phi[i]));
    CHECK(bh[i] * bh[i] == doctest::Approx(9.0 * eig.phi[i]));
  }
  CHECK(mild_barrier_exponent(1.0) == doctest::Approx(0.5));
  CHECK(sharp_barrier_exponent(3.0, 2.0) == doctest::Approx(0.375));
  CHECK_THROWS_AS(barrier(eig, 1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(barrier(eig, -1.0, 0.5), std::invalid_argument);
}

TEST_CASE("barrier supersolution for the model law") {
  const auto op = laplacian(DomainKind::Interval, 1, 255);
  const auto eig = first_eigenpair(op);
  const auto spec = make_model_h(1.0);
  const std::function<double(double)> h = [&](double s) { return spec(s); };
  const std::vector<double> f(op.size(), 1.0);
  const double t = mild_barrier_exponent(1.0);
  const auto M = find_barrier_scale(op, eig, t, h, f);
  REQUIRE(M.has_value());
  CHECK(barrier_supersolution_check(op, barrier(eig, *M, t), h, f).passed);
  const auto small = barrier_supersolution_check(op, barrier(eig, 1e-6, t), h, f);
  CHECK_FALSE(small.passed);
  CHECK(small.margin < 0.0);
}

TEST_CASE("sharp barrier near the boundary for the log-threshold datum") {
  const double gamma = 3.0, m = 2.0;
  const auto op = laplacian(DomainKind::Interval, 1, 1023);
  const auto eig = first_eigenpair(op);
  const UpperEnvelope up(make_model_h(gamma));
  const std::function<double(double)> h = [&](double s) { return up(s); };
  const auto f = Datum::log_profile(m).sample(op.grid());
  const auto strip = boundary_strip(op.grid(), 0.1);
  const double t = sharp_barrier_exponent(gamma, m);
  const auto M = find_barrier_scale(op, eig, t, h, f, strip.mask);
  REQUIRE(M.has_value());
  CHECK(barrier_supersolution_check(op, barrier(eig, *M, t), h, f, strip.mask).passed);
}

TEST_CASE("tridiagonal solver rejects singular systems") {
  const std::vector<double> d = {1.0, 1.0}, off = {1.0}, rhs = {1.0, 2.0};
  CHECK_THROWS_AS(solve_symmetric_tridiagonal(d, off, rhs), std::runtime_error);
  CHECK_THROWS_AS(solve_symmetric_tridiagonal(d, std::vector<double>{}, rhs), std::invalid_argument);
}

}
