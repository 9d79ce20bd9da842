#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "singlab/geometry.hpp"

namespace singlab {

/// Scalar diffusion coefficient a(x) with declared bounds alpha <= a <= beta
/// and a declared Lipschitz constant.
class CoefficientField {
 public:
  static CoefficientField constant(double a);
  static CoefficientField from_function(std::function<double(double)> a, double alpha, double beta,
                                        double lipschitz);

  double operator()(double x) const { return fn_(x); }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double lipschitz() const { return lipschitz_; }

 private:
  std::function<double(double)> fn_;
  double alpha_ = 1.0, beta_ = 1.0, lipschitz_ = 0.0;
};

/// Solves the tridiagonal system with sub/super diagonal `off` (size n-1,
/// symmetric) and diagonal `diag`.
std::vector<double> solve_symmetric_tridiagonal(std::span<const double> diag, std::span<const double> off,
                                                std::span<const double> rhs);

/// Conservative finite-volume discretization of -div(a grad u) with zero
/// Dirichlet data: K u = V (L_h u), where K is the symmetric stiffness matrix
/// built from link conductances and V the control volumes.
class DiscreteOperator {
 public:
  static DiscreteOperator assemble(const Grid& grid, const CoefficientField& a);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return grid_.size(); }

  /// a * area / length on every link.
  std::span<const double> conductances() const { return cond_; }
  std::span<const double> diagonal() const { return diag_; }
  std::span<const double> off_diagonal() const { return off_; }

  std::vector<double> apply_stiffness(std::span<const double> u) const;
  /// L_h u.
  std::vector<double> apply(std::span<const double> u) const;
  /// Solves L_h u = rhs.
  std::vector<double> solve(std::span<const double> rhs) const;
  /// Solves (K + diag(shift)) u = b. An empty shift means zero.
  std::vector<double> solve_stiffness(std::span<const double> b, std::span<const double> shift = {}) const;

  /// Operator with every conductance multiplied by factor.
  DiscreteOperator scaled(double factor) const;

  bool is_m_matrix() const;

 private:
  DiscreteOperator(Grid grid) : grid_(std::move(grid)) {}

  Grid grid_;
  std::vector<double> cond_, diag_, off_;
};

struct EigenPair {
  double lambda = 0.0;
  std::vector<double> phi;
  double c1 = 0.0, c2 = 0.0;
  int iterations = 0;
  /// sup |L_h phi - lambda phi| with sup phi = 1.
  double residual = 0.0;
};

/// Inverse power iteration for K phi = lambda V phi.
EigenPair first_eigenpair(const DiscreteOperator& op, double tol = 1e-10, int max_iterations = 2000);

/// xi with L_h xi = 1.
std::vector<double> torsion_function(const DiscreteOperator& op);

/// min over nodes of v / delta.
double min_distance_ratio(const Grid& grid, std::span<const double> v);

/// M phi^t.
std::vector<double> barrier(const EigenPair& eig, double M, double t);

/// t = 1/(gamma + 1), the exponent used when gamma < 1.
double mild_barrier_exponent(double gamma);
/// t = 2/(gamma + 1) - 1/(m (gamma + 1)).
double sharp_barrier_exponent(double gamma, double m);

struct BarrierCheck {
  bool passed = false;
  double margin = 0.0;
  std::size_t worst_node = 0;
};

/// Residual L_h b - h(b) f on the nodes selected by mask (all nodes when the
/// mask is empty). Passes iff the residual is nonnegative there.
BarrierCheck barrier_supersolution_check(const DiscreteOperator& op, std::span<const double> b,
                                         const std::function<double(double)>& h, std::span<const double> f,
                                         const std::vector<bool>& mask = {});

/// Doubling search for the first M = M0 2^j (M <= cap) for which M phi^t passes
/// the supersolution check.
std::optional<double> find_barrier_scale(const DiscreteOperator& op, const EigenPair& eig, double t,
                                         const std::function<double(double)>& h, std::span<const double> f,
                                         const std::vector<bool>& mask = {}, double M0 = 1.0,
                                         double cap = 1152921504606846976.0);

}  // namespace singlab
