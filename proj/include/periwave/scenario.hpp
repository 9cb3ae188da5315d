// SPDX-License-Identifier: Apache-2.0
//
// Scenario assembly: boundary-condition assignment, obstacle masking, ABC
// damping coefficients and time-harmonic drive/source data. A Discretization
// bundles everything geometric and material; a Scenario adds the drive.

#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "periwave/operators.hpp"

namespace periwave {

enum class FaceCondition { Dirichlet, Pec, Abc };

inline const char* to_string(FaceCondition c) {
  switch (c) {
    case FaceCondition::Dirichlet: return "dirichlet";
    case FaceCondition::Pec: return "pec";
    case FaceCondition::Abc: return "abc";
  }
  return "?";
}

/// Axis-aligned box or staircase ball carved out of the grid. Its surface is
/// a Dirichlet-traced scatterer boundary; its interior dofs are pinned.
struct Obstacle {
  enum class Shape { None, Box, Ball };
  Shape shape = Shape::None;
  std::array<double, 3> lo{0, 0, 0}, hi{0, 0, 0};  // box
  std::array<double, 3> center{0, 0, 0};           // ball
  double radius = 0.0;
};

/// Spatially varying material model used while building per-dof arrays.
struct MaterialModel {
  std::function<double(const std::array<double, 3>&)> eps = [](const auto&) { return 1.0; };
  std::function<double(const std::array<double, 3>&)> mu = [](const auto&) { return 1.0; };

  static MaterialModel constant(double eps_v, double mu_v) {
    MaterialModel m;
    m.eps = [eps_v](const auto&) { return eps_v; };
    m.mu = [mu_v](const auto&) { return mu_v; };
    return m;
  }
};

/// Grid + materials + masks + ABC damping: the immutable spatial setup every
/// solver run shares.
struct Discretization {
  DofLayout layout;
  GeneratorContext ctx;
  std::array<FaceCondition, 6> face_bc{};
  Obstacle obstacle;
  std::vector<double> sigma;       // ABC damping per E-dof, zero elsewhere
  std::vector<double> mu_at_e;     // material mu sampled at E-dof positions
  std::vector<std::size_t> drive_dofs;  // masked E-dofs feeding active stencils

  Discretization() = default;
  Discretization(const Discretization&) = delete;
  Discretization& operator=(const Discretization&) = delete;
  Discretization(Discretization&& o) noexcept { *this = std::move(o); }
  Discretization& operator=(Discretization&& o) noexcept {
    layout = std::move(o.layout);
    ctx = std::move(o.ctx);
    ctx.layout = &layout;  // ctx references our own layout
    face_bc = o.face_bc;
    obstacle = o.obstacle;
    sigma = std::move(o.sigma);
    mu_at_e = std::move(o.mu_at_e);
    drive_dofs = std::move(o.drive_dofs);
    return *this;
  }

  static Discretization build(GridSpec spec,
                              const std::array<FaceCondition, 6>& face_bc,
                              const MaterialModel& model,
                              const Obstacle& obstacle = {}) {
    for (int f = 0; f < 2 * spec.dimension; ++f)
      spec.boundary_tags[f] = face_bc[f] == FaceCondition::Abc
                                  ? FaceTag::Artificial
                                  : FaceTag::Scatterer;
    DofLayout layout = DofLayout::build(spec);

    MaterialField mat;
    mat.eps.resize(layout.e_count);
    mat.mu.resize(layout.h_count);
    for (std::size_t i = 0; i < layout.e_count; ++i)
      mat.eps[i] = model.eps(layout.e_position[i]);
    for (std::size_t j = 0; j < layout.h_count; ++j)
      mat.mu[j] = model.mu(layout.h_position[j]);

    std::vector<std::uint8_t> e_masked(layout.e_count, 0);
    std::vector<std::uint8_t> h_active(layout.h_count, 1);

    for (int f = 0; f < 2 * spec.dimension; ++f) {
      if (face_bc[f] == FaceCondition::Abc) continue;
      for (std::size_t i = 0; i < layout.e_count; ++i)
        if (layout.e_on_face(i, static_cast<Face>(f))) e_masked[i] = 1;
    }
    if (obstacle.shape != Obstacle::Shape::None) {
      for (std::size_t i = 0; i < layout.e_count; ++i)
        if (inside_obstacle(layout, obstacle,
                            layout.e_families[layout.e_family_of[i]],
                            layout.e_position[i], /*shrink=*/false))
          e_masked[i] = 1;
      for (std::size_t j = 0; j < layout.h_count; ++j)
        if (inside_obstacle(layout, obstacle,
                            layout.h_families[layout.h_family_of[j]],
                            layout.h_position[j], /*shrink=*/true))
          h_active[j] = 0;
    }

    Discretization d;
    d.face_bc = face_bc;
    d.obstacle = obstacle;
    d.layout = std::move(layout);
    d.ctx = GeneratorContext::build(d.layout, std::move(mat), std::move(e_masked),
                                    std::move(h_active));
    d.ctx.layout = &d.layout;

    d.mu_at_e.resize(d.layout.e_count);
    for (std::size_t i = 0; i < d.layout.e_count; ++i)
      d.mu_at_e[i] = model.mu(d.layout.e_position[i]);

    // First-order ABC: the boundary flux/circulation of H is replaced by the
    // characteristic value proportional to -E, giving a local damping term.
    // Acoustics: sigma = sqrt(mu/eps) * 2/dn; Maxwell: sigma = c * 2/dn.
    d.sigma.assign(d.layout.e_count, 0.0);
    for (int f = 0; f < 2 * spec.dimension; ++f) {
      if (face_bc[f] != FaceCondition::Abc) continue;
      const int a = face_axis(static_cast<Face>(f));
      const double two_over_dn = 2.0 / spec.spacing[a];
      for (std::size_t i = 0; i < d.layout.e_count; ++i) {
        if (d.ctx.e_masked[i]) continue;
        if (!d.layout.e_on_face(i, static_cast<Face>(f))) continue;
        const double eps_i = d.ctx.material.eps[i];
        const double mu_i = d.mu_at_e[i];
        const double coef = spec.q() == 0 ? std::sqrt(mu_i / eps_i)
                                          : 1.0 / std::sqrt(eps_i * mu_i);
        d.sigma[i] += coef * two_over_dn;
      }
    }

    // Masked E-dofs that actually enter an active H stencil carry boundary
    // data; everything else masked is inert obstacle interior.
    std::vector<std::uint8_t> drives(d.layout.e_count, 0);
    const auto& D = d.ctx.deriv;
    for (std::size_t j = 0; j < d.layout.h_count; ++j) {
      if (!d.ctx.h_active[j]) continue;
      for (std::size_t p = D.row_ptr[j]; p < D.row_ptr[j + 1]; ++p)
        if (d.ctx.e_masked[D.col[p]]) drives[D.col[p]] = 1;
    }
    for (std::size_t i = 0; i < d.layout.e_count; ++i)
      if (drives[i]) d.drive_dofs.push_back(i);
    return d;
  }

 private:
  static bool inside_obstacle(const DofLayout& L, const Obstacle& ob,
                              const FormFamily& fam,
                              const std::array<double, 3>& pos, bool shrink) {
    const double tol = 1e-9;
    if (ob.shape == Obstacle::Shape::Box) {
      for (int a = 0; a < L.grid.dimension; ++a) {
        double lo = pos[a], hi = pos[a];
        if (shrink && fam.staggered(a)) {
          lo -= 0.5 * L.grid.spacing[a];
          hi += 0.5 * L.grid.spacing[a];
        }
        if (lo < ob.lo[a] - tol || hi > ob.hi[a] + tol) return false;
      }
      return true;
    }
    if (ob.shape == Obstacle::Shape::Ball) {
      double r2 = 0.0;
      for (int a = 0; a < L.grid.dimension; ++a) {
        const double dx = pos[a] - ob.center[a];
        r2 += dx * dx;
      }
      return r2 <= ob.radius * ob.radius + tol;
    }
    return false;
  }
};

/// Time-harmonic drive and volume source: every time signal is
/// Re(amplitude * exp(-i omega t)).
struct Scenario {
  double omega = 2.0 * 3.14159265358979323846;
  std::vector<std::complex<double>> drive_amp;  // aligned with drive_dofs
  std::vector<std::complex<double>> source_e;   // empty or e_count entries
  std::vector<std::complex<double>> source_h;   // empty or h_count entries

  double period() const { return 2.0 * 3.14159265358979323846 / omega; }

  bool homogeneous() const {
    for (const auto& a : drive_amp)
      if (a != std::complex<double>(0.0)) return false;
    return source_e.empty() && source_h.empty();
  }

  static Scenario homogeneous_for(const Discretization& d, double omega) {
    Scenario s;
    s.omega = omega;
    s.drive_amp.assign(d.drive_dofs.size(), {0.0, 0.0});
    return s;
  }
};

/// Harmonic signal value at time t under the Re(a e^{-i omega t}) convention.
inline double harmonic_value(const std::complex<double>& a, double omega, double t) {
  return a.real() * std::cos(omega * t) + a.imag() * std::sin(omega * t);
}

}  // namespace periwave
