// SPDX-License-Identifier: Apache-2.0
//
// Field states u = (E, H) and the weighted inner product of the control
// space: <u, v> = sum_i eps_i m_i E_i E'_i + sum_j mu_j m_j H_j H'_j with
// m the entity measures of the staggered layout. Summation order is fixed,
// so reductions are deterministic for a given layout.

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "periwave/grid.hpp"

namespace periwave {

/// The pair u = (E, H) as flat degree-of-freedom arrays.
struct FieldState {
  std::vector<double> e;
  std::vector<double> h;

  FieldState() = default;
  FieldState(std::size_t ne, std::size_t nh) : e(ne, 0.0), h(nh, 0.0) {}
  explicit FieldState(const DofLayout& L) : e(L.e_count, 0.0), h(L.h_count, 0.0) {}

  void set_zero() {
    std::fill(e.begin(), e.end(), 0.0);
    std::fill(h.begin(), h.end(), 0.0);
  }

  bool finite() const {
    for (double v : e)
      if (!std::isfinite(v)) return false;
    for (double v : h)
      if (!std::isfinite(v)) return false;
    return true;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : e) m = std::max(m, std::abs(v));
    for (double v : h) m = std::max(m, std::abs(v));
    return m;
  }
};

inline void require_conforming(const FieldState& u, const FieldState& v) {
  if (u.e.size() != v.e.size() || u.h.size() != v.h.size())
    throw std::invalid_argument("field states do not share a dof layout");
}

/// Per-dof material coefficients, Lambda = diag(eps, mu).
struct MaterialField {
  std::vector<double> eps;  // per E-dof
  std::vector<double> mu;   // per H-dof

  void validate(double eps_min = 1e-14) const {
    for (double v : eps)
      if (!(v >= eps_min)) throw std::invalid_argument("material: eps must be uniformly positive");
    for (double v : mu)
      if (!(v >= eps_min)) throw std::invalid_argument("material: mu must be uniformly positive");
  }
};

/// Diagonal weights of the control-space inner product.
struct InnerProductWeights {
  std::vector<double> w_e;
  std::vector<double> w_h;

  static InnerProductWeights build(const DofLayout& L, const MaterialField& m) {
    if (m.eps.size() != L.e_count || m.mu.size() != L.h_count)
      throw std::invalid_argument("material arrays do not match layout");
    InnerProductWeights w;
    w.w_e.resize(L.e_count);
    w.w_h.resize(L.h_count);
    for (std::size_t i = 0; i < L.e_count; ++i) w.w_e[i] = m.eps[i] * L.e_measure[i];
    for (std::size_t j = 0; j < L.h_count; ++j) w.w_h[j] = m.mu[j] * L.h_measure[j];
    return w;
  }
};

inline double inner(const FieldState& u, const FieldState& v,
                    const InnerProductWeights& w) {
  require_conforming(u, v);
  if (u.e.size() != w.w_e.size() || u.h.size() != w.w_h.size())
    throw std::invalid_argument("weights do not match field layout");
  double s = 0.0;
  for (std::size_t i = 0; i < u.e.size(); ++i) s += w.w_e[i] * u.e[i] * v.e[i];
  for (std::size_t j = 0; j < u.h.size(); ++j) s += w.w_h[j] * u.h[j] * v.h[j];
  return s;
}

inline double norm(const FieldState& u, const InnerProductWeights& w) {
  return std::sqrt(inner(u, u, w));
}

/// y += alpha * x, componentwise.
inline void axpy_inplace(double alpha, const FieldState& x, FieldState& y) {
  require_conforming(x, y);
  for (std::size_t i = 0; i < y.e.size(); ++i) y.e[i] += alpha * x.e[i];
  for (std::size_t j = 0; j < y.h.size(); ++j) y.h[j] += alpha * x.h[j];
}

inline FieldState axpy(double alpha, const FieldState& x, const FieldState& y) {
  FieldState r = y;
  axpy_inplace(alpha, x, r);
  return r;
}

inline void scale_inplace(double alpha, FieldState& u) {
  for (double& v : u.e) v *= alpha;
  for (double& v : u.h) v *= alpha;
}

inline FieldState subtract(const FieldState& a, const FieldState& b) {
  return axpy(-1.0, b, a);
}

}  // namespace periwave
