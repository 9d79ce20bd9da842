#include "singlab/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace singlab {

CoefficientField CoefficientField::constant(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("coefficient must be positive");
  CoefficientField c;
  c.fn_ = [a](double) { return a; };
  c.alpha_ = c.beta_ = a;
  return c;
}

CoefficientField CoefficientField::from_function(std::function<double(double)> a, double alpha, double beta,
                                                 double lipschitz) {
  if (!(alpha > 0.0) || !(beta >= alpha)) throw std::invalid_argument("need 0 < alpha <= beta");
  if (!(lipschitz >= 0.0)) throw std::invalid_argument("Lipschitz constant must be nonnegative");
  CoefficientField c;
  c.fn_ = std::move(a);
  c.alpha_ = alpha;
  c.beta_ = beta;
  c.lipschitz_ = lipschitz;
  return c;
}

std::vector<double> solve_symmetric_tridiagonal(std::span<const double> diag, std::span<const double> off,
                                                std::span<const double> rhs) {
  const std::size_t n = diag.size();
  if (rhs.size() != n || off.size() + 1 != n) throw std::invalid_argument("tridiagonal: size mismatch");
  std::vector<double> c(n), d(n);
  double piv = diag[0];
  if (piv == 0.0) throw std::runtime_error("tridiagonal: zero pivot");
  c[0] = n > 1 ? off[0] / piv : 0.0;
  d[0] = rhs[0] / piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = diag[i] - off[i - 1] * c[i - 1];
    if (piv == 0.0 || !std::isfinite(piv)) throw std::runtime_error("tridiagonal: zero pivot");
    c[i] = i + 1 < n ? off[i] / piv : 0.0;
    d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / piv;
  }
  for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
  return d;
}

DiscreteOperator DiscreteOperator::assemble(const Grid& grid, const CoefficientField& a) {
  DiscreteOperator op(grid);
  const std::size_t n = grid.size();
  auto pos = grid.link_positions();
  auto len = grid.link_lengths();
  auto area = grid.link_areas();
  op.cond_.resize(n + 1);
  const double slack = 1e-12 * a.beta();
  for (std::size_t k = 0; k <= n; ++k) {
    const double ak = a(pos[k]);
    if (!(ak >= a.alpha() - slack) || !(ak <= a.beta() + slack))
      throw std::invalid_argument("coefficient violates its ellipticity bounds");
    if (k > 0) {
      const double q = std::abs(ak - a(pos[k - 1])) / (pos[k] - pos[k - 1]);
      if (q > a.lipschitz() * (1.0 + 1e-9) + 1e-12)
        throw std::invalid_argument("coefficient exceeds its declared Lipschitz constant");
    }
    op.cond_[k] = ak * area[k] / len[k];
  }
  op.diag_.resize(n);
  op.off_.resize(n - 1);
  for (std::size_t i = 0; i < n; ++i) op.diag_[i] = op.cond_[i] + op.cond_[i + 1];
  for (std::size_t i = 0; i + 1 < n; ++i) op.off_[i] = -op.cond_[i + 1];
  return op;
}

std::vector<double> DiscreteOperator::apply_stiffness(std::span<const double> u) const {
  const std::size_t n = size();
  if (u.size() != n) throw std::invalid_argument("apply: size mismatch");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = diag_[i] * u[i];
    if (i > 0) v += off_[i - 1] * u[i - 1];
    if (i + 1 < n) v += off_[i] * u[i + 1];
    out[i] = v;
  }
  return out;
}

std::vector<double> DiscreteOperator::apply(std::span<const double> u) const {
  auto out = apply_stiffness(u);
  auto w = grid_.weights();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= w[i];
  return out;
}

std::vector<double> DiscreteOperator::solve(std::span<const double> rhs) const {
  if (rhs.size() != size()) throw std::invalid_argument("solve: size mismatch");
  std::vector<double> b(rhs.begin(), rhs.end());
  auto w = grid_.weights();
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!std::isfinite(b[i])) throw std::invalid_argument("solve: right-hand side is not finite");
    b[i] *= w[i];
  }
  return solve_symmetric_tridiagonal(diag_, off_, b);
}

std::vector<double> DiscreteOperator::solve_stiffness(std::span<const double> b,
                                                      std::span<const double> shift) const {
  if (shift.empty()) return solve_symmetric_tridiagonal(diag_, off_, b);
  if (shift.size() != size()) throw std::invalid_argument("solve: shift size mismatch");
  std::vector<double> d(diag_);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += shift[i];
  return solve_symmetric_tridiagonal(d, off_, b);
}

DiscreteOperator DiscreteOperator::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("scale factor must be positive");
  DiscreteOperator op(*this);
  for (auto& c : op.cond_) c *= factor;
  for (auto& d : op.diag_) d *= factor;
  for (auto& o : op.off_) o *= factor;
  return op;
}

bool DiscreteOperator::is_m_matrix() const {
  const std::size_t n = size();
  bool strict = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(diag_[i] > 0.0)) return false;
    double offsum = 0.0;
    if (i > 0) offsum += std::abs(off_[i - 1]);
    if (i + 1 < n) offsum += std::abs(off_[i]);
    if (diag_[i] < offsum * (1.0 - 1e-14)) return false;
    if (diag_[i] > offsum * (1.0 + 1e-14)) strict = true;
  }
  for (double o : off_)
    if (o > 0.0) return false;
  return strict;
}

EigenPair first_eigenpair(const DiscreteOperator& op, double tol, int max_iterations) {
  const std::size_t n = op.size();
  auto w = op.grid().weights();
  std::vector<double> phi(n, 1.0), rhs(n);
  EigenPair out;
  double lambda_prev = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) rhs[i] = w[i] * phi[i];
    phi = op.solve_stiffness(rhs);
    const double top = *std::max_element(phi.begin(), phi.end());
    for (auto& v : phi) v /= top;

    auto K = op.apply_stiffness(phi);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += phi[i] * K[i];
      den += w[i] * phi[i] * phi[i];
    }
    const double lambda = num / den;
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(K[i] / w[i] - lambda * phi[i]));
    out.lambda = lambda;
    out.iterations = it;
    out.residual = res;
    if (it > 1 && std::abs(lambda - lambda_prev) <= tol * lambda && res <= 1e-9 * lambda) break;
    if (it == max_iterations) throw std::invalid_argument("eigenpair iteration did not converge");
    lambda_prev = lambda;
  }
  out.phi = std::move(phi);
  auto d = op.grid().distance();
  out.c1 = std::numeric_limits<double>::infinity();
  out.c2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = out.phi[i] / d[i];
    out.c1 = std::min(out.c1, q);
    out.c2 = std::max(out.c2, q);
  }
  return out;
}

std::vector<double> torsion_function(const DiscreteOperator& op) {
  return op.solve(std::vector<double>(op.size(), 1.0));
}

double min_distance_ratio(const Grid& grid, std::span<const double> v) {
  auto d = grid.distance();
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) m = std::min(m, v[i] / d[i]);
  return m;
}

std::vector<double> barrier(const EigenPair& eig, double M, double t) {
  if (!(M > 0.0)) throw std::invalid_argument("barrier scale must be positive");
  if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("barrier exponent must lie in (0, 1]");
  std::vector<double> b(eig.phi.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = M * std::pow(eig.phi[i], t);
  return b;
}

double mild_barrier_exponent(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  return 1.0 / (gamma + 1.0);
}

double sharp_barrier_exponent(double gamma, double m) {
  if (!(gamma > 0.0) || !(m >= 1.0)) throw std::invalid_argument("need gamma > 0 and m >= 1");
  return 2.0 / (gamma + 1.0) - 1.0 / (m * (gamma + 1.0));
}

BarrierCheck barrier_supersolution_check(const DiscreteOperator& op, std::span<const double> b,
                                         const std::function<double(double)>& h, std::span<const double> f,
                                         const std::vector<bool>& mask) {
  if (b.size() != op.size() || f.size() != op.size()) throw std::invalid_argument("barrier check: size mismatch");
  const auto Lb = op.apply(b);
  BarrierCheck out;
  out.margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!mask.empty() && !mask[i]) continue;
    const double r = Lb[i] - h(b[i]) * f[i];
    if (r < out.margin) {
      out.margin = r;
      out.worst_node = i;
    }
  }
  out.passed = out.margin >= 0.0;
  return out;
}

std::optional<double> find_barrier_scale(const DiscreteOperator& op, const EigenPair& eig, double t,
                                         const std::function<double(double)>& h, std::span<const double> f,
                                         const std::vector<bool>& mask, double M0, double cap) {
  for (double M = M0; M <= cap; M *= 2.0) {
    const auto b = barrier(eig, M, t);
    if (barrier_supersolution_check(op, b, h, f, mask).passed) return M;
  }
  return std::nullopt;
}

}  // namespace singlab
