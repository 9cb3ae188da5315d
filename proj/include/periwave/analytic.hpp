// SPDX-License-Identifier: Apache-2.0
//
// Closed-form reference solutions: the exterior-domain Maxwell radiation
// field built from the first spherical Hankel function and the l=1, m=0
// spherical harmonic, a 1D traveling acoustic wave, and weighted error
// norms. All fields are evaluated through singularity-free Cartesian
// expressions.

#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "periwave/field.hpp"

namespace periwave {
namespace analytic {

using Complex = std::complex<double>;
using CVec3 = std::array<Complex, 3>;

inline constexpr double pi = 3.14159265358979323846;

/// sqrt(3 / 4 pi): L^2(S^2)-normalization of the l=1, m=0 harmonic.
inline double y10_scale() { return std::sqrt(3.0 / (4.0 * pi)); }

/// Spherical Bessel j1 and Neumann y1 in closed form.
inline double sph_j1(double x) { return std::sin(x) / (x * x) - std::cos(x) / x; }
inline double sph_y1(double x) { return -std::cos(x) / (x * x) - std::sin(x) / x; }

/// First-kind spherical Hankel function of order one, h1(x) = j1 + i y1.
inline Complex spherical_hankel_h11(double x) {
  if (!(x > 0.0)) throw std::domain_error("spherical_hankel_h11: requires x > 0");
  return {sph_j1(x), sph_y1(x)};
}

/// d/dx h1(x) via the recurrence h1' = h0 - (2/x) h1.
inline Complex spherical_hankel_h11_prime(double x) {
  if (!(x > 0.0)) throw std::domain_error("spherical_hankel_h11_prime: requires x > 0");
  const Complex h0{std::sin(x) / x, -std::cos(x) / x};
  return h0 - (2.0 / x) * spherical_hankel_h11(x);
}

/// Azimuthal radiating field E = h1(w r) Y(xi) x xi with Y the spherical
/// gradient of y_1^0. In Cartesian form E = h1(w r) k (-y, x, 0) / r, which
/// is regular on the polar axis and tangential to every sphere.
inline CVec3 exact_radiation_E(const std::array<double, 3>& x, double omega,
                               double r_min = 1e-12) {
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  if (!(r >= r_min)) throw std::domain_error("exact_radiation_E: point too close to origin");
  const Complex h = spherical_hankel_h11(omega * r);
  const double k = y10_scale();
  return {-h * (k * x[1] / r), h * (k * x[0] / r), Complex{0.0, 0.0}};
}

/// Companion magnetic field H = (i / omega) curl E, analytically
/// differentiated. With f(r) = k h1(w r) / r and E = f (-y, x, 0):
/// curl E = (-f' z x / r, -f' z y / r, f' (x^2 + y^2)/r + 2 f).
inline CVec3 exact_radiation_H(const std::array<double, 3>& x, double omega,
                               double r_min = 1e-12) {
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  if (!(r >= r_min)) throw std::domain_error("exact_radiation_H: point too close to origin");
  const double k = y10_scale();
  const Complex h = spherical_hankel_h11(omega * r);
  const Complex hp = spherical_hankel_h11_prime(omega * r);
  const Complex f = k * h / r;
  const Complex fp = k * (omega * hp * r - h) / (r * r);
  const Complex iw{0.0, 1.0 / omega};
  const double rho2 = x[0] * x[0] + x[1] * x[1];
  return {iw * (-fp * x[2] * x[0] / r), iw * (-fp * x[2] * x[1] / r),
          iw * (fp * rho2 / r + 2.0 * f)};
}

/// Dirichlet drive on the unit scatterer sphere: lambda = h1(omega) Y(xi),
/// the tangential trace of the radiating field (nu = -xi there). Cartesian:
/// Y = -k (z x, z y, -(x^2 + y^2)) / r^2 on |x| = 1.
inline CVec3 boundary_lambda_radiation(const std::array<double, 3>& x, double omega,
                                       double surface_tol = 1e-6) {
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  if (std::abs(r - 1.0) > surface_tol)
    throw std::domain_error("boundary_lambda_radiation: point not on the unit sphere");
  const double k = y10_scale();
  const Complex h = spherical_hankel_h11(omega);
  const double r2 = r * r;
  return {-h * (k * x[2] * x[0] / r2), -h * (k * x[2] * x[1] / r2),
          h * (k * (x[0] * x[0] + x[1] * x[1]) / r2)};
}

/// Right-going 1D acoustic wave: E = sin(omega (t - x/c)) with companion
/// H = -(1/c) sin(omega (t - x/c)), an exact solution of the first-order
/// system with eps = 1/c^2, mu = 1. It satisfies the outgoing-characteristic
/// identity (c^-1 d/dt + d/dx) E = 0, so a first-order ABC at the right end
/// is transparent to it.
struct TravelingWave1D {
  double omega = 2.0 * pi;
  double c = 1.0;

  double E(double x, double t) const { return std::sin(omega * (t - x / c)); }
  double H(double x, double t) const { return -std::sin(omega * (t - x / c)) / c; }
  double eps() const { return 1.0 / (c * c); }
  double mu() const { return 1.0; }
};

struct ErrorNorms {
  double l2_rel = 0.0;
  double max_rel = 0.0;
  bool absolute = false;  // set when the reference norm vanished
};

/// Weighted relative L2 and max-norm errors of a sampled field against a
/// reference; falls back to absolute norms (flagged) for a zero reference.
inline ErrorNorms error_norms(const std::vector<double>& numerical,
                              const std::vector<double>& reference,
                              const std::vector<double>& weights) {
  if (numerical.size() != reference.size() || numerical.size() != weights.size())
    throw std::invalid_argument("error_norms: size mismatch");
  double num2 = 0.0, ref2 = 0.0, dmax = 0.0, rmax = 0.0;
  for (std::size_t i = 0; i < numerical.size(); ++i) {
    const double d = numerical[i] - reference[i];
    num2 += weights[i] * d * d;
    ref2 += weights[i] * reference[i] * reference[i];
    dmax = std::max(dmax, std::abs(d));
    rmax = std::max(rmax, std::abs(reference[i]));
  }
  ErrorNorms e;
  if (ref2 > 0.0 && rmax > 0.0) {
    e.l2_rel = std::sqrt(num2 / ref2);
    e.max_rel = dmax / rmax;
  } else {
    e.l2_rel = std::sqrt(num2);
    e.max_rel = dmax;
    e.absolute = true;
  }
  return e;
}

}  // namespace analytic
}  // namespace periwave
