#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "degenfd/degeneracy.hpp"
#include "degenfd/grid.hpp"
#include "degenfd/operators.hpp"

namespace degenfd {

struct SchemeParams {
  IsaacsOperator op;
  DegeneracyLaw law;
  double eps;       // regularisation
  GridFunction f;   // source, sampled at every node
  GridFunction g;   // boundary data, only boundary entries are read
  bool homogeneous_fallback = false;
};

/// Discrete operator for the regularised equation
///
///   G_h(u, x) = eps u(x) + F(D_h^2 u(x)) - f(x) / (eps + |D_h u(x)|^2)^(theta*/2)   x interior
///   G_h(u, x) = u(x) - g(x)                                                        x on the boundary
///
/// with theta* = law.exponent(u(x)). When homogeneous_fallback is set and f
/// vanishes identically, the numerator is replaced by eps.
class Scheme {
 public:
  explicit Scheme(SchemeParams params) : p_(std::move(params)) {
    if (!(p_.eps > 0.0) || !std::isfinite(p_.eps)) throw InputError("regularisation eps must be positive");
    const Grid& grid = p_.f.grid();
    if (!grid.same_as(p_.g.grid())) throw InputError("f and g live on different grids");
    if (p_.op.dim() != grid.dim()) throw InputError("operator dimension does not match the grid");
    if (!p_.f.all_finite()) throw InputError("source f has non-finite values");
    for (std::size_t n : grid.boundary_nodes())
      if (!std::isfinite(p_.g[n])) throw InputError("boundary data g has non-finite values");

    const bool zero = std::all_of(p_.f.values().begin(), p_.f.values().end(), [](double v) { return v == 0.0; });
    numerator_ = p_.f;
    if (p_.homogeneous_fallback && zero) std::fill(numerator_.values().begin(), numerator_.values().end(), p_.eps);
    for (std::size_t n : grid.interior_nodes()) source_norm_ = std::max(source_norm_, std::abs(numerator_[n]));
    for (std::size_t n : grid.boundary_nodes()) boundary_norm_ = std::max(boundary_norm_, std::abs(p_.g[n]));
  }

  const SchemeParams& params() const noexcept { return p_; }
  const Grid& grid() const noexcept { return p_.f.grid(); }
  double eps() const noexcept { return p_.eps; }
  const DegeneracyLaw& law() const noexcept { return p_.law; }
  const IsaacsOperator& op() const noexcept { return p_.op; }

  /// Numerator actually used at a node (f, or eps under the homogeneous fallback).
  double source(std::size_t node) const noexcept { return numerator_[node]; }
  /// max over interior nodes of |numerator|
  double source_sup_norm() const noexcept { return source_norm_; }
  /// max over boundary nodes of |g|
  double boundary_sup_norm() const noexcept { return boundary_norm_; }

  double eval(const GridFunction& u, std::size_t node) const {
    if (node >= u.size()) throw StencilError("node index out of range", node);
    if (!grid().is_interior(node)) return u[node] - p_.g[node];
    const double c = u[node];
    const double theta = p_.law.exponent(c);
    const double grad = upwind_grad_sq(u, node);
    return p_.eps * c + apply_F_hessian(p_.op, u, node) -
           numerator_[node] / std::pow(p_.eps + grad, 0.5 * theta);
  }

  /// G_h(u, x) at every node, written to out.
  void evaluate(const GridFunction& u, std::span<double> out) const {
    for (std::size_t n = 0; n < u.size(); ++n) out[n] = eval(u, n);
  }

  /// max_x |G_h(u, x)|
  double residual(const GridFunction& u) const {
    double r = 0.0;
    for (std::size_t n = 0; n < u.size(); ++n) r = std::max(r, std::abs(eval(u, n)));
    return r;
  }

 private:
  SchemeParams p_;
  GridFunction numerator_;
  double source_norm_ = 0.0;
  double boundary_norm_ = 0.0;
};

inline double scheme_eval(const Scheme& s, const GridFunction& u, std::size_t node) { return s.eval(u, node); }
inline double scheme_residual(const Scheme& s, const GridFunction& u) { return s.residual(u); }

/// Constants of the Lipschitz estimate ||G_h u - G_h v|| <= C ||u - v||,
///   C = eps + c_F / h^2 + c_f / h + c_theta.
struct LipschitzConstants {
  double eps, c_F, c_f, c_theta, h;
  double total() const noexcept { return eps + c_F / (h * h) + c_f / h + c_theta; }
};

/// c_F = 4 d Lambda S, with S = 1 for diagonal families and 2 once cross
/// stencils are in use (their absolute weights add another 4 |a_ij| / h^2
/// per pair, bounded by diagonal dominance).
///
/// c_f = 2 sqrt(d) theta_max ||f|| eps^(-(theta_max + 2)/2) bounds the
/// sensitivity of the source term to the upwind gradient.
///
/// c_theta covers the dependence of theta*(u(x)) on the centre value:
/// ||f|| * 0.5 * max(|ln eps| eps^(-theta_max/2), 1) * Lip(theta).
inline LipschitzConstants lipschitz_constants(const Scheme& s) {
  const Grid& grid = s.grid();
  const double d = static_cast<double>(grid.dim());
  const double theta_max = s.law().max_exponent();
  const double eps = s.eps();
  const double fn = s.source_sup_norm();
  LipschitzConstants c{};
  c.eps = eps;
  c.h = grid.h();
  c.c_F = 4.0 * d * s.op().Lambda() * (s.op().has_cross_terms() ? 2.0 : 1.0);
  // eps^(-(theta_max+2)/2) for eps <= 1; the second branch keeps the bound valid for eps > 1.
  const double eps_pow =
      std::max(std::pow(eps, -0.5 * (theta_max + 2.0)), std::pow(eps, -0.5 * (s.law().min_exponent() + 1.0)));
  c.c_f = 2.0 * std::sqrt(d) * theta_max * fn * eps_pow;
  const double log_term = std::max(std::abs(std::log(eps)) *
                                       std::max(std::pow(eps, -0.5 * theta_max), std::pow(eps, -0.5 * s.law().min_exponent())),
                                   1.0);
  c.c_theta = fn * 0.5 * log_term * s.law().lipschitz_in_t();
  return c;
}

inline double lipschitz_bound(const Scheme& s) { return lipschitz_constants(s).total(); }

struct BarrierPair {
  GridFunction lower;
  GridFunction upper;
  bool quadratic = false;  // false: constant barriers
};

namespace detail {

/// Largest eps^(-theta/2) over the exponents the law can produce.
inline double worst_eps_power(const Scheme& s) {
  return std::max(std::pow(s.eps(), -0.5 * s.law().max_exponent()), std::pow(s.eps(), -0.5 * s.law().min_exponent()));
}

inline bool barrier_signs_hold(const Scheme& s, const BarrierPair& b) {
  for (std::size_t n = 0; n < s.grid().size(); ++n)
    if (s.eval(b.lower, n) > 0.0 || s.eval(b.upper, n) < 0.0) return false;
  return true;
}

}  // namespace detail

/// Constant barriers +-(1/eps) (||g|| + 1 + ||f|| eps^(-theta_max/2)).
/// A constant has zero discrete Hessian and zero upwind gradient, which is
/// what makes it a super-solution for any law.
inline BarrierPair constant_barriers(const Scheme& s) {
  const double value =
      (s.boundary_sup_norm() + 1.0 + s.source_sup_norm() * detail::worst_eps_power(s)) / s.eps();
  return {GridFunction(s.grid(), -value), GridFunction(s.grid(), value), false};
}

/// Discrete sub- and super-solutions with lower <= g <= upper on the boundary
/// and G_h(lower) <= 0 <= G_h(upper) everywhere.
///
/// Constant law: upper(x) = C2 - C1/(2 lambda d) |x - x0|^2, lower = -upper,
/// with x0 placed a distance 1 + sqrt(lambda) below the box on every axis.
/// The upwind gradient of either barrier is then at least
/// C1 delta sqrt(d) / (lambda d) at interior nodes, and C1 is the smaller of
/// the two choices that dominate the source term. Transmission law: constant
/// barriers. If the quadratic pair fails its sign check in floating point the
/// constant pair is returned.
inline BarrierPair build_barriers(const Scheme& s) {
  if (!s.law().is_constant()) return constant_barriers(s);

  const Grid& grid = s.grid();
  const std::size_t d = grid.dim();
  const double lambda = s.op().lambda();
  const double theta = s.law().max_exponent();
  const double fn = s.source_sup_norm();
  const double delta = 1.0 + std::sqrt(lambda);
  const double dd = static_cast<double>(d);

  double c1 = 0.0;
  if (fn > 0.0) {
    const double via_eps = fn * std::pow(s.eps(), -0.5 * theta);
    const double via_grad = std::pow(fn * std::pow(lambda * std::sqrt(dd) / delta, theta), 1.0 / (1.0 + theta));
    c1 = std::min(via_eps, via_grad);
  }
  const double a = c1 / (2.0 * lambda * dd);
  std::vector<double> x0(d);
  double far = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    x0[k] = grid.lower()[k] - delta;
    far += (grid.upper()[k] - x0[k]) * (grid.upper()[k] - x0[k]);
  }
  const double c2 = s.boundary_sup_norm() + a * far;

  BarrierPair pair{GridFunction(grid), GridFunction(grid), true};
  for (std::size_t n = 0; n < grid.size(); ++n) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double r = grid.coordinate(n, k) - x0[k];
      r2 += r * r;
    }
    pair.upper[n] = c2 - a * r2;
    pair.lower[n] = -pair.upper[n];
  }
  if (!detail::barrier_signs_hold(s, pair)) return constant_barriers(s);
  return pair;
}

}  // namespace degenfd
