// SPDX-License-Identifier: Apache-2.0
//
// Discrete exterior derivative d (grad / curl depending on the system), its
// measure-weighted negative transpose delta, and the first-order wave
// generator A(E, H) = (eps^-1 delta H, mu^-1 d E). Defining delta as the
// negative transpose makes the discrete integration-by-parts identity
// <dE, H> + <E, delta H> = 0 exact, which in turn makes the generator
// skew-adjoint in the weighted inner product on trace-masked states.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "periwave/field.hpp"
#include "periwave/grid.hpp"

namespace periwave {

/// Signed incidence structure of the exterior derivative, stored as CSR over
/// H-dofs (rows) with E-dof columns, plus its explicit transpose.
struct DiscreteDerivative {
  std::vector<std::size_t> row_ptr, col;
  std::vector<double> val;
  std::vector<std::size_t> t_row_ptr, t_col;
  std::vector<double> t_val;

  static DiscreteDerivative build(const DofLayout& L) {
    DiscreteDerivative D;
    D.row_ptr.assign(L.h_count + 1, 0);

    struct Entry {
      std::size_t row, col;
      double val;
    };
    std::vector<Entry> entries;
    entries.reserve(L.h_count * 4);

    for (const FormFamily& hf : L.h_families) {
      for (int a = 0; a < L.grid.dimension; ++a) {
        if (!hf.staggered(a)) continue;
        const unsigned src_mask = hf.axes_mask & ~(1u << a);
        const FormFamily* ef = find_family(L.e_families, src_mask);
        if (!ef) throw std::logic_error("derivative: missing source family");
        // sign (-1)^{#(axes in hf below a)}
        int below = 0;
        for (int b = 0; b < a; ++b)
          if (hf.staggered(b)) ++below;
        const double s = (below % 2 == 0) ? 1.0 : -1.0;
        const double inv_h = s / L.grid.spacing[a];
        for (int i = 0; i < hf.size[0]; ++i)
          for (int j = 0; j < hf.size[1]; ++j)
            for (int k = 0; k < hf.size[2]; ++k) {
              std::array<int, 3> lo{i, j, k}, hi{i, j, k};
              hi[a] += 1;
              const std::size_t row = hf.offset + DofLayout::linear(hf, i, j, k);
              entries.push_back({row,
                                 ef->offset + DofLayout::linear(*ef, hi[0], hi[1], hi[2]),
                                 inv_h});
              entries.push_back({row,
                                 ef->offset + DofLayout::linear(*ef, lo[0], lo[1], lo[2]),
                                 -inv_h});
            }
      }
    }

    for (const Entry& e : entries) D.row_ptr[e.row + 1]++;
    for (std::size_t r = 0; r < L.h_count; ++r) D.row_ptr[r + 1] += D.row_ptr[r];
    D.col.resize(entries.size());
    D.val.resize(entries.size());
    std::vector<std::size_t> cursor(D.row_ptr.begin(), D.row_ptr.end() - 1);
    for (const Entry& e : entries) {
      const std::size_t p = cursor[e.row]++;
      D.col[p] = e.col;
      D.val[p] = e.val;
    }

    // transpose (rows = E-dofs)
    D.t_row_ptr.assign(L.e_count + 1, 0);
    for (const Entry& e : entries) D.t_row_ptr[e.col + 1]++;
    for (std::size_t r = 0; r < L.e_count; ++r) D.t_row_ptr[r + 1] += D.t_row_ptr[r];
    D.t_col.resize(entries.size());
    D.t_val.resize(entries.size());
    cursor.assign(D.t_row_ptr.begin(), D.t_row_ptr.end() - 1);
    for (std::size_t r = 0; r < L.h_count; ++r)
      for (std::size_t p = D.row_ptr[r]; p < D.row_ptr[r + 1]; ++p) {
        const std::size_t q = cursor[D.col[p]]++;
        D.t_col[q] = r;
        D.t_val[q] = D.val[p];
      }
    return D;
  }

 private:
  static const FormFamily* find_family(const std::vector<FormFamily>& fams,
                                       unsigned mask) {
    for (const auto& f : fams)
      if (f.axes_mask == mask) return &f;
    return nullptr;
  }
};

/// Everything an operator application needs: the incidence structure, the
/// materials and the boundary masks. Masked E-dofs carry the (possibly
/// inhomogeneous) tangential trace and are excluded from the generator
/// domain; inactive H-dofs lie inside an obstacle and are pinned to zero.
struct GeneratorContext {
  const DofLayout* layout = nullptr;
  DiscreteDerivative deriv;
  MaterialField material;
  InnerProductWeights weights;
  std::vector<std::uint8_t> e_masked;  // 1: trace-constrained (or obstacle interior)
  std::vector<std::uint8_t> h_active;  // 0: obstacle interior, pinned

  static GeneratorContext build(const DofLayout& L, MaterialField m,
                                std::vector<std::uint8_t> e_masked,
                                std::vector<std::uint8_t> h_active) {
    m.validate();
    GeneratorContext ctx;
    ctx.layout = &L;
    ctx.deriv = DiscreteDerivative::build(L);
    ctx.weights = InnerProductWeights::build(L, m);
    ctx.material = std::move(m);
    ctx.e_masked = std::move(e_masked);
    ctx.h_active = std::move(h_active);
    if (ctx.e_masked.size() != L.e_count || ctx.h_active.size() != L.h_count)
      throw std::invalid_argument("generator: mask sizes do not match layout");
    return ctx;
  }

  std::size_t free_e_count() const {
    std::size_t n = 0;
    for (auto m : e_masked)
      if (!m) ++n;
    return n;
  }
  std::size_t active_h_count() const {
    std::size_t n = 0;
    for (auto a : h_active)
      if (a) ++n;
    return n;
  }
};

/// dE on H-entities. Uses all E values (masked dofs contribute their stored
/// trace data); inactive H rows are zero.
inline void apply_d(const std::vector<double>& E, const GeneratorContext& ctx,
                    std::vector<double>& out) {
  const auto& D = ctx.deriv;
  const std::size_t nh = ctx.layout->h_count;
  if (E.size() != ctx.layout->e_count) throw std::invalid_argument("apply_d: layout mismatch");
  out.assign(nh, 0.0);
  for (std::size_t r = 0; r < nh; ++r) {
    if (!ctx.h_active[r]) continue;
    double s = 0.0;
    for (std::size_t p = D.row_ptr[r]; p < D.row_ptr[r + 1]; ++p)
      s += D.val[p] * E[D.col[p]];
    out[r] = s;
  }
}

inline std::vector<double> apply_d(const std::vector<double>& E,
                                   const GeneratorContext& ctx) {
  std::vector<double> out;
  apply_d(E, ctx, out);
  return out;
}

/// delta H = -Me^-1 D^T Mh H on E-entities (measure-only weighting; the
/// material factors enter in the generator). Values at masked E-dofs are
/// computed too, callers decide whether to use them.
inline void apply_delta(const std::vector<double>& H, const GeneratorContext& ctx,
                        std::vector<double>& out) {
  const auto& D = ctx.deriv;
  const auto& L = *ctx.layout;
  if (H.size() != L.h_count) throw std::invalid_argument("apply_delta: layout mismatch");
  out.assign(L.e_count, 0.0);
  for (std::size_t r = 0; r < L.e_count; ++r) {
    double s = 0.0;
    for (std::size_t p = D.t_row_ptr[r]; p < D.t_row_ptr[r + 1]; ++p) {
      const std::size_t hj = D.t_col[p];
      if (!ctx.h_active[hj]) continue;
      s += D.t_val[p] * L.h_measure[hj] * H[hj];
    }
    out[r] = -s / L.e_measure[r];
  }
}

inline std::vector<double> apply_delta(const std::vector<double>& H,
                                       const GeneratorContext& ctx) {
  std::vector<double> out;
  apply_delta(H, ctx, out);
  return out;
}

/// A u = (eps^-1 delta H, mu^-1 d E); masked E rows are zeroed so the result
/// stays in the generator domain.
inline FieldState apply_generator(const FieldState& u, const GeneratorContext& ctx) {
  const auto& L = *ctx.layout;
  FieldState r(L);
  std::vector<double> tmp;
  apply_delta(u.h, ctx, tmp);
  for (std::size_t i = 0; i < L.e_count; ++i)
    r.e[i] = ctx.e_masked[i] ? 0.0 : tmp[i] / ctx.material.eps[i];
  apply_d(u.e, ctx, tmp);
  for (std::size_t j = 0; j < L.h_count; ++j)
    r.h[j] = ctx.h_active[j] ? tmp[j] / ctx.material.mu[j] : 0.0;
  return r;
}

/// Index maps between the full layout and the free (unmasked E + active H)
/// subspace the dense oracle operates on. Free E-dofs come first.
struct FreeDofMap {
  std::vector<std::ptrdiff_t> e_to_free, h_to_free;
  std::vector<std::size_t> free_to_e, free_to_h;
  std::size_t n_free_e = 0, n_active_h = 0;

  static FreeDofMap build(const GeneratorContext& ctx) {
    FreeDofMap m;
    const auto& L = *ctx.layout;
    m.e_to_free.assign(L.e_count, -1);
    m.h_to_free.assign(L.h_count, -1);
    for (std::size_t i = 0; i < L.e_count; ++i)
      if (!ctx.e_masked[i]) {
        m.e_to_free[i] = static_cast<std::ptrdiff_t>(m.free_to_e.size());
        m.free_to_e.push_back(i);
      }
    m.n_free_e = m.free_to_e.size();
    for (std::size_t j = 0; j < L.h_count; ++j)
      if (ctx.h_active[j]) {
        m.h_to_free[j] = static_cast<std::ptrdiff_t>(m.n_free_e + m.free_to_h.size());
        m.free_to_h.push_back(j);
      }
    m.n_active_h = m.free_to_h.size();
    return m;
  }

  std::size_t size() const { return n_free_e + n_active_h; }

  std::vector<double> restrict_state(const FieldState& u) const {
    std::vector<double> x(size());
    for (std::size_t i = 0; i < n_free_e; ++i) x[i] = u.e[free_to_e[i]];
    for (std::size_t j = 0; j < n_active_h; ++j) x[n_free_e + j] = u.h[free_to_h[j]];
    return x;
  }

  FieldState prolong_state(const std::vector<double>& x, const DofLayout& L) const {
    FieldState u(L);
    for (std::size_t i = 0; i < n_free_e; ++i) u.e[free_to_e[i]] = x[i];
    for (std::size_t j = 0; j < n_active_h; ++j) u.h[free_to_h[j]] = x[n_free_e + j];
    return u;
  }
};

/// Dense generator matrix on the free subspace, row-major. Refuses above the
/// dof cap; the oracle only runs at desk scale.
inline std::vector<double> assemble_dense(const GeneratorContext& ctx,
                                          const FreeDofMap& map,
                                          std::size_t dof_cap = 4096) {
  const auto& L = *ctx.layout;
  const std::size_t n = map.size();
  if (n > dof_cap)
    throw std::invalid_argument("assemble_dense: free dof count exceeds cap");
  std::vector<double> S(n * n, 0.0);
  const auto& D = ctx.deriv;
  // H rows: mu^-1 d E
  for (std::size_t j = 0; j < L.h_count; ++j) {
    if (!ctx.h_active[j]) continue;
    const std::size_t row = static_cast<std::size_t>(map.h_to_free[j]);
    for (std::size_t p = D.row_ptr[j]; p < D.row_ptr[j + 1]; ++p) {
      const std::ptrdiff_t c = map.e_to_free[D.col[p]];
      if (c < 0) continue;
      S[row * n + static_cast<std::size_t>(c)] += D.val[p] / ctx.material.mu[j];
    }
  }
  // E rows: eps^-1 delta H = -(eps me)^-1 D^T Mh H
  for (std::size_t i = 0; i < L.e_count; ++i) {
    if (ctx.e_masked[i]) continue;
    const std::size_t row = static_cast<std::size_t>(map.e_to_free[i]);
    const double scale = -1.0 / (ctx.material.eps[i] * L.e_measure[i]);
    for (std::size_t p = D.t_row_ptr[i]; p < D.t_row_ptr[i + 1]; ++p) {
      const std::size_t hj = D.t_col[p];
      const std::ptrdiff_t c = map.h_to_free[hj];
      if (c < 0) continue;
      S[row * n + static_cast<std::size_t>(c)] += scale * D.t_val[p] * L.h_measure[hj];
    }
  }
  return S;
}

}  // namespace periwave
