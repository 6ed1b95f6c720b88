#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "degenfd/scheme.hpp"

namespace degenfd {

struct SolverConfig {
  double rho = 0.0;
  std::size_t max_iters = 100'000'000;
  /// Residual stopping threshold. Drives termination unless a pseudo-time
  /// target is set, in which case a positive value only allows early exit.
  double residual_tol = 0.0;
  /// Run exactly round(T / rho) Euler steps (capped by max_iters).
  std::optional<double> target_pseudo_time;
  std::size_t record_history_every = 1000;
  /// Overwrite boundary values with g before iterating.
  bool pin_boundary = true;
  /// Abort once the residual exceeds this multiple of its running minimum.
  double divergence_factor = 1e3;
};

struct HistoryEntry {
  std::size_t iteration;
  double residual;
};

struct SolveReport {
  std::size_t iterations = 0;
  double final_residual = 0.0;
  std::vector<HistoryEntry> residual_history;
  double rho_used = 0.0;
  double cfl_bound = 0.0;
  bool converged = false;
  double wall_time = 0.0;  // seconds
  double pseudo_time() const noexcept { return static_cast<double>(iterations) * rho_used; }
};

struct SolveResult {
  GridFunction solution;
  SolveReport report;
};

/// Largest rho for which the Euler map is non-expansive, scaled by safety:
/// safety / lipschitz_bound.
inline double cfl_rho(const Scheme& s, double safety = 1.0) {
  if (!(safety > 0.0) || safety > 1.0) throw InputError("CFL safety factor must lie in (0, 1]");
  return safety / lipschitz_bound(s);
}

/// rho = 0.01 h^2, the fixed choice used for the one-dimensional benchmarks.
inline double preset_rho(double h) noexcept { return 0.01 * h * h; }

namespace detail {

/// One Jacobi-style Euler step from u into next. Returns max |G_h(u)|.
inline double euler_step_into(const Scheme& s, const GridFunction& u, double rho, GridFunction& next) {
  double residual = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    const double gval = s.eval(u, n);
    const double v = u[n] - rho * gval;
    if (!std::isfinite(v))
      throw NumericalError("Euler step produced a non-finite value at node " + std::to_string(n) +
                               "; rho likely violates the CFL condition",
                           n);
    next[n] = v;
    residual = std::max(residual, std::abs(gval));
  }
  return residual;
}

}  // namespace detail

/// S_rho[u](x) = u(x) - rho G_h(u, x), every node computed from the previous iterate.
inline GridFunction euler_step(const Scheme& s, const GridFunction& u, double rho) {
  if (!(rho >= 0.0)) throw InputError("Euler parameter rho must be non-negative");
  GridFunction next(u.grid());
  detail::euler_step_into(s, u, rho, next);
  return next;
}

/// Iterates u <- S_rho[u] from the initial guess.
///
/// Throws NumericalError on non-finite iterates or when the residual grows
/// past divergence_factor times its running minimum.
inline SolveResult solve(const Scheme& s, const SolverConfig& cfg, GridFunction initial) {
  if (!(cfg.rho > 0.0) || !std::isfinite(cfg.rho)) throw InputError("Euler parameter rho must be positive");
  if (cfg.residual_tol < 0.0) throw InputError("residual tolerance must be non-negative");
  if (cfg.target_pseudo_time && !(*cfg.target_pseudo_time > 0.0)) throw InputError("pseudo-time must be positive");
  if (!cfg.target_pseudo_time && cfg.residual_tol <= 0.0)
    throw InputError("either a positive residual tolerance or a pseudo-time target is required");
  if (!initial.grid().same_as(s.grid())) throw InputError("initial guess lives on a different grid");
  if (!initial.all_finite()) throw InputError("initial guess has non-finite values");

  const auto start = std::chrono::steady_clock::now();
  if (cfg.pin_boundary)
    for (std::size_t n : s.grid().boundary_nodes()) initial[n] = s.params().g[n];

  std::size_t target_steps = 0;
  std::size_t steps = cfg.max_iters;
  if (cfg.target_pseudo_time) {
    target_steps = static_cast<std::size_t>(std::round(*cfg.target_pseudo_time / cfg.rho));
    steps = std::min(cfg.max_iters, target_steps);
  }
  const std::size_t every = std::max<std::size_t>(cfg.record_history_every, 1);

  SolveResult out{std::move(initial), {}};
  SolveReport& rep = out.report;
  rep.rho_used = cfg.rho;
  rep.cfl_bound = cfl_rho(s, 1.0);
  GridFunction next(s.grid());
  double min_residual = std::numeric_limits<double>::infinity();
  bool hit_tol = false;

  std::size_t it = 0;
  for (; it < steps; ++it) {
    const double r = detail::euler_step_into(s, out.solution, cfg.rho, next);
    if (it % every == 0) rep.residual_history.push_back({it, r});
    if (cfg.residual_tol > 0.0 && r <= cfg.residual_tol) {
      hit_tol = true;
      break;  // the current iterate already meets the tolerance
    }
    min_residual = std::min(min_residual, r);
    if (r > cfg.divergence_factor * std::max(min_residual, 1e-8))
      throw NumericalError("Euler iteration diverged at iteration " + std::to_string(it) + " (residual " +
                           std::to_string(r) + ", minimum " + std::to_string(min_residual) +
                           "); reduce rho");
    std::swap(out.solution, next);
  }
  rep.iterations = it;
  rep.final_residual = s.residual(out.solution);
  if (rep.residual_history.empty() || rep.residual_history.back().iteration != it)
    rep.residual_history.push_back({it, rep.final_residual});
  rep.converged = cfg.target_pseudo_time ? (hit_tol || it == target_steps) : hit_tol;
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace degenfd
