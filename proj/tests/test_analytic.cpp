// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "periwave/analytic.hpp"

using namespace periwave;
using analytic::Complex;
using analytic::CVec3;

namespace {

// central difference curl with step h
CVec3 fd_curl(const std::function<CVec3(const std::array<double, 3>&)>& f,
              const std::array<double, 3>& x, double h) {
  auto d = [&](int comp, int axis) {
    std::array<double, 3> xp = x, xm = x;
    xp[axis] += h;
    xm[axis] -= h;
    return (f(xp)[comp] - f(xm)[comp]) / (2.0 * h);
  };
  return {d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1)};
}

double cnorm(const CVec3& v) {
  return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
}

}  // namespace

TEST_CASE("spherical Bessel Wronskian j1 y1' - j1' y1 = 1/x^2") {
  // independent of the closed forms: the pair solves the same ODE, so the
  // Wronskian identity pins both expressions at once
  for (double x : {0.3, 1.0, 2.2, 5.7, 11.0}) {
    const double h = 1e-6 * std::max(1.0, x);
    auto j1p = (analytic::sph_j1(x + h) - analytic::sph_j1(x - h)) / (2.0 * h);
    auto y1p = (analytic::sph_y1(x + h) - analytic::sph_y1(x - h)) / (2.0 * h);
    const double w = analytic::sph_j1(x) * y1p - j1p * analytic::sph_y1(x);
    REQUIRE_THAT(w, Catch::Matchers::WithinRel(1.0 / (x * x), 1e-7));
  }
}

TEST_CASE("h1 satisfies the order-1 spherical Bessel equation") {
  for (double x : {0.5, 1.3, 2.0943951023931953, 4.4, 9.1}) {
    const double h = 1e-4;
    auto f = [](double t) { return analytic::spherical_hankel_h11(t); };
    const Complex fpp = (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
    const Complex fp = (f(x + h) - f(x - h)) / (2.0 * h);
    const Complex residual = x * x * fpp + 2.0 * x * fp + (x * x - 2.0) * f(x);
    REQUIRE(std::abs(residual) <= 1e-5 * std::abs(x * x * f(x)));
  }
}

TEST_CASE("h1 derivative matches finite differences") {
  for (double x : {0.7, 1.9, 3.3, 6.0}) {
    const double h = 1e-6;
    const Complex fd = (analytic::spherical_hankel_h11(x + h) -
                        analytic::spherical_hankel_h11(x - h)) /
                       (2.0 * h);
    const Complex an = analytic::spherical_hankel_h11_prime(x);
    REQUIRE(std::abs(fd - an) <= 1e-8 * std::max(1.0, std::abs(an)));
  }
}

TEST_CASE("h1 rejects nonpositive argument") {
  REQUIRE_THROWS_AS(analytic::spherical_hankel_h11(0.0), std::domain_error);
  REQUIRE_THROWS_AS(analytic::spherical_hankel_h11(-1.0), std::domain_error);
}

TEST_CASE("radiation field satisfies the time-harmonic system") {
  // curl H - i w E = 0 and curl E + i w H = 0 at random exterior points
  const double omega = 2.0 * analytic::pi / 3.0;
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> ur(1.2, 3.0), ua(-1.0, 1.0);
  const double h = 1e-4;
  auto Ef = [&](const std::array<double, 3>& x) { return analytic::exact_radiation_E(x, omega); };
  auto Hf = [&](const std::array<double, 3>& x) { return analytic::exact_radiation_H(x, omega); };
  const Complex iw{0.0, omega};

  for (int trial = 0; trial < 100; ++trial) {
    std::array<double, 3> dir{ua(rng), ua(rng), ua(rng)};
    double n = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
    if (n < 0.1) continue;
    const double r = ur(rng);
    std::array<double, 3> x{dir[0] / n * r, dir[1] / n * r, dir[2] / n * r};

    const CVec3 E = Ef(x), H = Hf(x);
    const CVec3 cH = fd_curl(Hf, x, h), cE = fd_curl(Ef, x, h);
    CVec3 r1, r2;
    for (int c = 0; c < 3; ++c) {
      r1[c] = cH[c] - iw * E[c];
      r2[c] = cE[c] + iw * H[c];
    }
    const double scale = omega * (cnorm(E) + cnorm(H));
    REQUIRE(cnorm(r1) <= 1e-5 * scale);
    REQUIRE(cnorm(r2) <= 1e-5 * scale);
  }
}

TEST_CASE("E is tangential to spheres and matches its boundary trace") {
  const double omega = 2.0 * analytic::pi / 3.0;
  std::mt19937 rng(67);
  std::uniform_real_distribution<double> ua(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::array<double, 3> x{ua(rng), ua(rng), ua(rng)};
    double n = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (n < 0.1) continue;
    for (auto& c : x) c /= n;  // on the unit sphere
    const CVec3 E = analytic::exact_radiation_E(x, omega);
    const Complex radial = E[0] * x[0] + E[1] * x[1] + E[2] * x[2];
    REQUIRE(std::abs(radial) <= 1e-13);

    // the trace field has the same tangential magnitude profile: |lambda| =
    // |h1(omega)| |Y|, and E on the sphere is h1(omega) Y x xi with |Y x xi| = |Y|
    const CVec3 lam = analytic::boundary_lambda_radiation(x, omega);
    REQUIRE_THAT(cnorm(E), Catch::Matchers::WithinAbs(cnorm(lam), 1e-12));
  }
}

TEST_CASE("boundary trace rejects off-sphere points") {
  REQUIRE_THROWS_AS(analytic::boundary_lambda_radiation({2.0, 0.0, 0.0}, 1.0),
                    std::domain_error);
}

TEST_CASE("traveling wave solves the first-order 1D system") {
  analytic::TravelingWave1D w;
  w.c = 2.0;
  const double h = 1e-5;
  for (double x : {0.1, 0.7, 1.3}) {
    for (double t : {0.0, 0.4, 1.1}) {
      // eps dE/dt = dH/dx and mu dH/dt = dE/dx
      const double Et = (w.E(x, t + h) - w.E(x, t - h)) / (2.0 * h);
      const double Hx = (w.H(x + h, t) - w.H(x - h, t)) / (2.0 * h);
      const double Ht = (w.H(x, t + h) - w.H(x, t - h)) / (2.0 * h);
      const double Ex = (w.E(x + h, t) - w.E(x - h, t)) / (2.0 * h);
      REQUIRE_THAT(w.eps() * Et, Catch::Matchers::WithinAbs(Hx, 1e-6));
      REQUIRE_THAT(w.mu() * Ht, Catch::Matchers::WithinAbs(Ex, 1e-6));
    }
  }
}

TEST_CASE("error norms: relative and absolute fallback") {
  std::vector<double> num{1.0, 2.0}, ref{1.0, 2.1}, w{1.0, 1.0};
  auto e = analytic::error_norms(num, ref, w);
  REQUIRE_FALSE(e.absolute);
  REQUIRE(e.l2_rel > 0.0);
  auto z = analytic::error_norms(num, {0.0, 0.0}, w);
  REQUIRE(z.absolute);
  REQUIRE_THROWS_AS(analytic::error_norms(num, {1.0}, w), std::invalid_argument);
}
