// SPDX-License-Identifier: Apache-2.0
//
// Exact-controllability layer: the periodicity cost 1/2 ||u(T) - u(0)||^2 in
// the weighted norm, its gradient via one forward and one adjoint period
// solve, and the unpreconditioned conjugate gradient loop on the resulting
// normal equations. Costs along the iteration are tracked through the exact
// quadratic update F_{n} = F_{n-1} + alpha rho / 2.

#pragma once

#include <chrono>
#include <complex>
#include <vector>

#include "periwave/evolution.hpp"

namespace periwave {

struct ControlConfig {
  double omega = 2.0 * 3.14159265358979323846;
  int steps_per_period = 64;
  double rel_tolerance = 1e-10;  // on rho = ||r||^2 relative to rho_0
  int max_iterations = 500;
  AdjointVariant adjoint_variant = AdjointVariant::Forward;
  int warm_start_periods = 0;
  bool ramp_warm_start = true;

  double period() const { return 2.0 * 3.14159265358979323846 / omega; }

  void validate() const {
    if (!(omega > 0.0)) throw std::invalid_argument("control: omega must be positive");
    if (!(rel_tolerance > 0.0 && rel_tolerance < 1.0))
      throw std::invalid_argument("control: tolerance must lie in (0,1)");
    if (max_iterations < 1) throw std::invalid_argument("control: max_iterations >= 1");
    if (steps_per_period < 2) throw std::invalid_argument("control: steps_per_period >= 2");
  }
};

struct IterationRecord {
  int iter = 0;
  double rho = 0.0;
  double sqrt_rho_rel = 0.0;
  double functional = 0.0;
  long period_solves = 0;
  double wall_seconds = 0.0;
};

enum class CGStatus { Converged, IterationCap, Stagnated };

struct CGResult {
  FieldState u0;
  std::vector<IterationRecord> history;
  CGStatus status = CGStatus::Converged;
  double rho0 = 0.0;
};

class StagnationError : public std::runtime_error {
 public:
  StagnationError() : std::runtime_error("search direction lies in the kernel of the control operator") {}
};

/// 1/2 ||u(T) - u0||^2 in the weighted norm.
inline double periodicity_cost(const Evolver& ev, const FieldState& u0) {
  FieldState uT = ev.solve_driven(u0);
  FieldState defect = subtract(uT, u0);
  ev.mask_state(defect);
  const double n = norm(defect, ev.discretization().ctx.weights);
  return 0.5 * n * n;
}

/// Period map minus identity of the homogeneous system.
inline FieldState apply_period_defect(const Evolver& ev, const FieldState& v) {
  FieldState w = ev.period_map(v);
  axpy_inplace(-1.0, v, w);
  ev.mask_state(w);
  return w;
}

inline FieldState apply_period_defect_adjoint(const Evolver& ev, const FieldState& v) {
  FieldState w = ev.period_map_adjoint(v);
  axpy_inplace(-1.0, v, w);
  ev.mask_state(w);
  return w;
}

/// Gradient of the cost at u0: one driven solve to u(T), one adjoint solve of
/// the periodicity defect. Also returns u(T) so callers can reuse it.
struct GradientResult {
  FieldState gradient;
  FieldState u_T;
};

inline GradientResult cost_gradient(const Evolver& ev, const FieldState& u0,
                                    AdjointVariant variant = AdjointVariant::Forward) {
  GradientResult g{FieldState(ev.discretization().layout), FieldState()};
  g.u_T = ev.solve_driven(u0);
  FieldState defect = subtract(g.u_T, u0);
  ev.mask_state(defect);
  g.gradient = ev.solve_adjoint(defect, variant);
  axpy_inplace(-1.0, defect, g.gradient);
  ev.mask_state(g.gradient);
  return g;
}

/// The normal operator applied to a direction: adjoint-defect of defect.
inline FieldState normal_op_apply(const Evolver& ev, const FieldState& dir,
                                  AdjointVariant variant = AdjointVariant::Forward) {
  FieldState w = ev.period_map(dir);
  axpy_inplace(-1.0, dir, w);
  ev.mask_state(w);
  FieldState g = ev.solve_adjoint(w, variant);
  axpy_inplace(-1.0, w, g);
  ev.mask_state(g);
  return g;
}

/// Called after each CG iteration with the iteration index and the current
/// control iterate (snapshot cadence, progress reporting).
using CGObserver = std::function<void(int, const FieldState&)>;

/// Conjugate gradient minimization of the periodicity cost. Follows the
/// classical CGNR recurrences: alpha = -rho_{n-1} / <g, d>, residual and
/// control updated by axpy, beta = rho_n / rho_{n-1}.
inline CGResult cg_solve(const Evolver& ev, const ControlConfig& cfg,
                         FieldState u0 = FieldState(), const CGObserver& obs = {}) {
  cfg.validate();
  const auto& d = ev.discretization();
  const auto& w = d.ctx.weights;
  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
        .count();
  };

  CGResult res;
  if (u0.e.empty() && u0.h.empty()) u0 = FieldState(d.layout);
  if (cfg.warm_start_periods > 0)
    u0 = ev.solve_driven(u0, {}, cfg.warm_start_periods,
                         cfg.ramp_warm_start ? 1 : 0);
  ev.mask_state(u0);

  long solves = 2;
  GradientResult g0 = cost_gradient(ev, u0, cfg.adjoint_variant);
  FieldState r = std::move(g0.gradient);
  FieldState defect0 = subtract(g0.u_T, u0);
  ev.mask_state(defect0);
  double F = 0.5 * inner(defect0, defect0, w);

  double rho = inner(r, r, w);
  res.rho0 = rho;
  res.history.push_back({0, rho, 1.0, F, solves, elapsed()});
  if (rho <= 0.0) {
    res.u0 = std::move(u0);
    return res;
  }

  FieldState dir = r;
  const double rho_stop = cfg.rel_tolerance * rho;
  for (int n = 1; n <= cfg.max_iterations; ++n) {
    FieldState g = normal_op_apply(ev, dir, cfg.adjoint_variant);
    solves += 2;
    const double gd = inner(g, dir, w);
    if (!(gd > 1e-14 * rho)) throw StagnationError();
    const double alpha = -rho / gd;
    axpy_inplace(alpha, dir, u0);
    axpy_inplace(alpha, g, r);
    const double rho_new = inner(r, r, w);
    F += 0.5 * alpha * rho;  // exact quadratic decrease along the CG step
    res.history.push_back({n, rho_new, std::sqrt(rho_new / res.rho0), F, solves,
                           elapsed()});
    if (obs) obs(n, u0);
    const double beta = rho_new / rho;
    rho = rho_new;
    if (rho <= rho_stop) {
      res.status = CGStatus::Converged;
      res.u0 = std::move(u0);
      return res;
    }
    scale_inplace(beta, dir);
    axpy_inplace(1.0, r, dir);
  }
  res.status = CGStatus::IterationCap;
  res.u0 = std::move(u0);
  return res;
}

/// Complex per-dof amplitudes of the periodic solution under the
/// Re(u_hat e^{-i omega t}) convention: u_hat = u(t0) + i u(t0 + T/4).
struct HarmonicField {
  std::vector<std::complex<double>> e;
  std::vector<std::complex<double>> h;
};

inline HarmonicField extract_harmonic(const Evolver& ev, const FieldState& u0,
                                      int t0_step = 0) {
  const int n = ev.time_grid().steps;
  if (n % 4 != 0)
    throw std::invalid_argument("extract_harmonic: steps per period must be divisible by 4");
  const int quarter = n / 4;
  // Steps are observed at 1..n; step n of the converged periodic run stands
  // in for step 0.
  int s0 = ((t0_step % n) + n) % n;
  int s1 = (s0 + quarter) % n;
  if (s0 == 0) s0 = n;
  if (s1 == 0) s1 = n;

  const auto& L = ev.discretization().layout;
  FieldState at0(L), at1(L);
  bool have0 = false, have1 = false;
  ev.solve_driven(u0, [&](int step, const FieldState& u, const std::vector<double>&) {
    if (step == s0) {
      at0 = u;
      have0 = true;
    }
    if (step == s1) {
      at1 = u;
      have1 = true;
    }
  });
  if (!have0 || !have1)
    throw std::logic_error("extract_harmonic: snapshot steps not visited");

  HarmonicField out;
  out.e.resize(L.e_count);
  out.h.resize(L.h_count);
  for (std::size_t i = 0; i < L.e_count; ++i) out.e[i] = {at0.e[i], at1.e[i]};
  for (std::size_t j = 0; j < L.h_count; ++j) out.h[j] = {at0.h[j], at1.h[j]};
  return out;
}

}  // namespace periwave
