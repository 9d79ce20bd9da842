#pragma once

#include <span>
#include <string>
#include <vector>

#include "singlab/datum.hpp"
#include "singlab/elliptic.hpp"
#include "singlab/nonlinearity.hpp"

namespace singlab {

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Sum over links of a |grad u|^2 times the link measure (equals u^T K u).
double energy(const DiscreteOperator& op, std::span<const double> u);

struct TruncationEnergies {
  double plain = 0.0;  // energy of T_k(u)
  double power = 0.0;  // energy of T_k(u)^{(gamma+1)/2}
};

TruncationEnergies truncation_energy(const DiscreteOperator& op, std::span<const double> u, double k, double gamma);

/// (sum over links |grad G_k(u)|^q times the link measure)^{1/q}.
double gk_seminorm(const Grid& grid, std::span<const double> u, double k, double q);

/// The exponent in (1, N/(N-1)) used for the second seminorm (1.5 when N = 1).
double intermediate_exponent(int dimension);

/// Strip widths c h, 2c h, 4c h, ... with c = first_cells (count of them,
/// ascending) whose strips are unions of whole control volumes. On the
/// interval the half cell at the wall belongs to no control volume, which
/// biases the indicator by about h / (2 eps); a large c keeps that small.
std::vector<double> aligned_strip_widths(const Grid& grid, int count, int first_cells = 16);

struct IndicatorCurve {
  std::vector<double> eps;
  std::vector<double> values;
  double exponent = 0.0;
  bool decreasing = false;
  bool satisfied = false;
};

/// (1/eps) * integral of u over {delta < eps} for each eps, the log-log slope
/// and the verdict: values decrease with eps, the slope is positive and the
/// value at the smallest eps is below threshold_fraction times the value at the
/// largest.
IndicatorCurve boundary_indicator_curve(const Grid& grid, std::span<const double> u, std::span<const double> eps,
                                        double threshold_fraction = 0.9);

/// The same verdict from precomputed indicator values.
IndicatorCurve summarize_indicator(std::span<const double> eps, std::span<const double> values,
                                   double threshold_fraction = 0.9);

struct WeightedNorms {
  double plain = 0.0;
  double weighted = 0.0;  // with the factor delta
};

/// Integrals of h(u) f and h(u) f delta.
WeightedNorms lower_order_norms(const Grid& grid, const NonlinearitySpec& spec, std::span<const double> f,
                                std::span<const double> u);

/// Integrals of |L_h u| and |L_h u| delta.
WeightedNorms operator_norms(const DiscreteOperator& op, std::span<const double> u);

/// Integral of h(u) f u.
double source_work(const Grid& grid, const NonlinearitySpec& spec, std::span<const double> f,
                   std::span<const double> u);

/// Integral of f^m.
double power_integral(const Grid& grid, std::span<const double> f, double m);

enum class Verdict { Bounded, Divergent, Inconclusive, Borderline };

std::string to_string(Verdict v);
Verdict parse_verdict(const std::string& text);

struct RefinementOptions {
  /// Last ratio at or below this value is compatible with a finite limit.
  double bounded_ratio = 1.1;
  /// Growth by at least this factor at every step is divergence.
  double divergent_ratio = 1.5;
  /// Increments of a bounded sequence must decay at least like h^min_decay.
  double min_decay = 0.02;
  /// Increments below this fraction of the last value count as zero.
  double negligible = 1e-9;
};

/// Bounded/divergent decision for values V_j on successively halved meshes.
///
/// D_j = V_{j+1} - V_j and sigma = slope of log |D_j| against log h_{j+1}, so
/// V ~ h^sigma for a divergent sequence and V - V_inf ~ h^sigma for a
/// convergent one.
///   divergent: every ratio >= divergent_ratio, or every D_j > 0 with sigma < min_decay;
///   bounded: otherwise, when the last ratio <= bounded_ratio;
///   inconclusive otherwise.
struct RefinementVerdict {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<double> ratios;
  std::vector<double> increments;
  /// sigma above, NaN when some increment vanishes.
  double exponent = 0.0;
  bool increasing = false;
  bool persistent_growth = false;
};

RefinementVerdict classify_refinement(std::span<const double> h, std::span<const double> values,
                                      const RefinementOptions& opts = {});

struct LmVerdict {
  double m = 1.0;
  std::vector<double> values;
  RefinementVerdict verdict;
};

/// Refinement study of the integral of f^m over the given grids (coarse to fine).
std::vector<LmVerdict> lm_membership(const std::vector<Grid>& grids, const Datum& datum, std::span<const double> m_list,
                                     const RefinementOptions& opts = {});

/// c in the least-squares fit u ~ c E_N(r) + a + b r^2 + d r^4 over nodes with
/// 2 width <= r <= outer, E_N = r^{2-N} (N >= 3) or -log r (N = 2).
double singularity_coefficient(const Grid& grid, std::span<const double> u, double width, double outer = 0.2);

/// Per-level quantities written as one CSV row each.
struct LevelDiagnostics {
  int cells = 0;
  double h = 0.0;
  double energy = 0.0;
  double truncation_energy = 0.0;
  double truncation_energy_power = 0.0;
  double gk_q1 = 0.0;
  double gk_q = 0.0;
  double q = 0.0;
  double lower_plain = 0.0;
  double lower_weighted = 0.0;
  double operator_plain = 0.0;
  double operator_weighted = 0.0;
  double source_work = 0.0;
  double sup_u = 0.0;
};

LevelDiagnostics diagnose_level(const DiscreteOperator& op, const NonlinearitySpec& spec, std::span<const double> f,
                                std::span<const double> u, double k = 1.0);

}  // namespace singlab
