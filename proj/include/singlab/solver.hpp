#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "singlab/elliptic.hpp"
#include "singlab/nonlinearity.hpp"

namespace singlab {

/// Raised when a nonlinear solve cannot reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Method { Automatic, Picard, Newton, Monotone };

std::string to_string(Method method);
Method parse_method(std::string_view text);

struct SolverOptions {
  Method method = Method::Automatic;
  /// sup |K u - V h_n(u) f_n| relative to sup (|K| |u| + V h_n(u) f_n).
  double residual_tolerance = 1e-10;
  /// sup-norm bracket width for the monotone method.
  double gap_tolerance = 1e-8;
  int max_iterations = 500;
  /// Picard relaxation factor in (0, 1].
  double relaxation = 1.0;
};

struct SolveReport {
  std::vector<double> u;
  bool converged = false;
  Method method = Method::Automatic;
  int iterations = 0;
  double residual = 0.0;
  /// Monotone method only.
  double gap = 0.0;
  std::vector<double> lower, upper;
  /// Largest violation of a_k <= a_{k+1} <= b_{k+1} <= b_k seen before clamping.
  double order_violation = 0.0;
};

/// Solves K u = V h_n(u) T_n(f) for one regularization index n.
/// `initial` is a starting guess (Newton, Picard) or a candidate subsolution
/// (monotone; discarded if it is not one).
SolveReport solve_desingularized(const DiscreteOperator& op, const NonlinearitySpec& spec,
                                 std::span<const double> f, double n, Scheme scheme,
                                 const SolverOptions& options = {}, std::span<const double> initial = {});

/// Relative residual of u for the regularized problem at level n.
double regularized_residual(const DiscreteOperator& op, const RegularizedNonlinearity& hn,
                            std::span<const double> f, std::span<const double> u);

/// 2^0, ..., 2^last.
std::vector<double> dyadic_schedule(int last);

struct Snapshot {
  double n = 0.0;
  std::vector<double> u;
  int iterations = 0;
  double residual = 0.0;
  double gap = 0.0;
  bool converged = false;
};

struct ContinuationResult {
  std::vector<double> u;
  bool converged = false;
  double final_n = 0.0;
  std::vector<Snapshot> snapshots;
  /// L1 distances between consecutive snapshots.
  std::vector<double> increments;
  /// False when some increment exceeds its predecessor.
  bool cauchy = true;
  /// (d, min over {delta >= d} of u)
  std::vector<std::pair<double, double>> lower_bounds;
};

ContinuationResult continue_in_n(const DiscreteOperator& op, const NonlinearitySpec& spec,
                                 std::span<const double> f, const std::vector<double>& schedule, Scheme scheme,
                                 const SolverOptions& options = {},
                                 const std::vector<double>& lower_bound_depths = {0.05, 0.1, 0.25});

/// (d, min over {delta >= d} of u) for each d.
std::vector<std::pair<double, double>> interior_lower_bound(std::span<const double> u, const Grid& grid,
                                                           std::span<const double> depths);

struct UniquenessReport {
  std::vector<double> truncation, shift, monotone;
  double truncation_shift_sup = 0.0, truncation_monotone_sup = 0.0, shift_monotone_sup = 0.0;
  double truncation_shift_l1 = 0.0, truncation_monotone_l1 = 0.0, shift_monotone_l1 = 0.0;
  double gap = 0.0;
  bool monotone_applicable = true;
  bool consistent = false;
  std::string verdict;
  double max_sup_distance() const;
};

/// Continues the truncation and shift schemes with Newton along `schedule`
/// and brackets the truncation problem at the last level from a cold start.
UniquenessReport uniqueness_probe(const DiscreteOperator& op, const NonlinearitySpec& spec,
                                  std::span<const double> f, const std::vector<double>& schedule,
                                  const SolverOptions& options = {}, double agreement = 0.0);

}  // namespace singlab
