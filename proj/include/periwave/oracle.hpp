// SPDX-License-Identifier: Apache-2.0
//
// Dense spectral oracle for desk-scale grids. The free-dof generator S is
// skew-adjoint in the weighted inner product, so B S B^-1 (B = sqrt of the
// diagonal weights) is skew-symmetric and i B S B^-1 is Hermitian with real
// spectrum. The exact semigroup, the Duhamel integral, the one-period
// control-operator identities and the direct normal-equation solve are all
// evaluated in that eigenbasis. Conservative (PEC/Dirichlet) configurations
// only; with ABC damping the period map is no longer a group element.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "periwave/control.hpp"
#include "periwave/evolution.hpp"
#include "periwave/operators.hpp"
#include "periwave/scenario.hpp"

namespace periwave {
namespace oracle {

using Complex = std::complex<double>;

struct DenseOracle {
  const Discretization* disc = nullptr;
  FreeDofMap map;
  Eigen::MatrixXd S;       // generator on free dofs
  Eigen::VectorXd sqrt_w;  // sqrt(material * measure) per free dof
  Eigen::VectorXd theta;   // i B S B^-1 = V diag(theta) V^H
  Eigen::MatrixXcd V;

  static DenseOracle build(const Discretization& d, std::size_t dof_cap = 4096) {
    DenseOracle o;
    o.disc = &d;
    o.map = FreeDofMap::build(d.ctx);
    const std::size_t n = o.map.size();
    if (n > dof_cap) throw std::invalid_argument("oracle: free dof count exceeds cap");

    std::vector<double> Sd = assemble_dense(d.ctx, o.map, dof_cap);
    o.S = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>(Sd.data(), n, n);

    o.sqrt_w.resize(n);
    for (std::size_t i = 0; i < o.map.n_free_e; ++i)
      o.sqrt_w[i] = std::sqrt(d.ctx.weights.w_e[o.map.free_to_e[i]]);
    for (std::size_t j = 0; j < o.map.n_active_h; ++j)
      o.sqrt_w[o.map.n_free_e + j] = std::sqrt(d.ctx.weights.w_h[o.map.free_to_h[j]]);

    Eigen::MatrixXd Shat = o.symmetrized();
    Eigen::MatrixXcd herm = Complex(0.0, 1.0) * Shat.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("oracle: eigendecomposition failed");
    o.theta = es.eigenvalues();
    o.V = es.eigenvectors();
    return o;
  }

  std::size_t size() const { return map.size(); }

  Eigen::MatrixXd symmetrized() const {
    return sqrt_w.asDiagonal() * S * sqrt_w.cwiseInverse().asDiagonal();
  }

  Eigen::VectorXd to_hat(const FieldState& u) const {
    std::vector<double> x = map.restrict_state(u);
    Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(x.data(), x.size());
    return sqrt_w.cwiseProduct(v);
  }

  FieldState from_hat(const Eigen::VectorXd& xhat) const {
    Eigen::VectorXd x = xhat.cwiseQuotient(sqrt_w);
    std::vector<double> xs(x.data(), x.data() + x.size());
    return map.prolong_state(xs, disc->layout);
  }

  /// exp(t S) u via the eigenbasis; exact up to dense round-off.
  FieldState expm_apply(double t, const FieldState& u) const {
    Eigen::VectorXcd z = V.adjoint() * to_hat(u).cast<Complex>();
    for (Eigen::Index k = 0; k < z.size(); ++k)
      z[k] *= std::exp(Complex(0.0, -theta[k] * t));
    return from_hat((V * z).real());
  }

  /// Forcing vector of the free-dof ODE at time t: sources on the free rows
  /// plus the coupling of the Dirichlet trace data into active H stencils.
  Eigen::VectorXd forcing(const Scenario& scen, double t) const {
    const auto& d = *disc;
    const auto& L = d.layout;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(size());
    if (!scen.source_e.empty())
      for (std::size_t i = 0; i < map.n_free_e; ++i)
        b[i] = harmonic_value(scen.source_e[map.free_to_e[i]], scen.omega, t);
    if (!scen.source_h.empty())
      for (std::size_t j = 0; j < map.n_active_h; ++j)
        b[map.n_free_e + j] =
            harmonic_value(scen.source_h[map.free_to_h[j]], scen.omega, t);
    if (!d.drive_dofs.empty()) {
      std::vector<double> lam(L.e_count, 0.0);
      for (std::size_t k = 0; k < d.drive_dofs.size(); ++k)
        lam[d.drive_dofs[k]] = harmonic_value(scen.drive_amp[k], scen.omega, t);
      const auto& D = d.ctx.deriv;
      for (std::size_t j = 0; j < map.n_active_h; ++j) {
        const std::size_t hj = map.free_to_h[j];
        double s = 0.0;
        for (std::size_t p = D.row_ptr[hj]; p < D.row_ptr[hj + 1]; ++p)
          if (d.ctx.e_masked[D.col[p]]) s += D.val[p] * lam[D.col[p]];
        b[map.n_free_e + j] += s / d.ctx.material.mu[hj];
      }
    }
    return b;
  }

  /// Variation-of-constants solution exp(T S) u0 + int_0^T exp((T-s)S) b(s) ds,
  /// evaluated modewise with composite Gauss-Legendre quadrature.
  FieldState duhamel_solve(const FieldState& u0, const Scenario& scen, double T,
                           int panels = 8) const {
    static const double gl_x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                   0.5384693101056831, 0.9061798459386640};
    static const double gl_w[5] = {0.2369268850561891, 0.4786286704993665,
                                   0.5688888888888889, 0.4786286704993665,
                                   0.2369268850561891};
    Eigen::VectorXcd z = V.adjoint() * to_hat(u0).cast<Complex>();
    for (Eigen::Index k = 0; k < z.size(); ++k)
      z[k] *= std::exp(Complex(0.0, -theta[k] * T));
    const double hp = T / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = (p + 0.5) * hp;
      for (int q = 0; q < 5; ++q) {
        const double s = mid + 0.5 * hp * gl_x[q];
        Eigen::VectorXcd beta = V.adjoint() * forcing(scen, s).cast<Complex>().cwiseProduct(
                                                  sqrt_w.cast<Complex>());
        const double wq = 0.5 * hp * gl_w[q];
        for (Eigen::Index k = 0; k < z.size(); ++k)
          z[k] += wq * std::exp(Complex(0.0, -theta[k] * (T - s))) * beta[k];
      }
    }
    return from_hat((V * z).real());
  }

  /// exp(T S) - I in symmetrized coordinates (the control operator of the
  /// exact semigroup; imaginary residue of the reconstruction is discarded).
  Eigen::MatrixXd control_op_hat(double T) const {
    Eigen::VectorXcd ph(theta.size());
    for (Eigen::Index k = 0; k < theta.size(); ++k)
      ph[k] = std::exp(Complex(0.0, -theta[k] * T)) - 1.0;
    return (V * ph.asDiagonal() * V.adjoint()).real();
  }
};

/// Dense one-period map of the *discrete* leapfrog evolution, assembled
/// columnwise, in symmetrized coordinates.
inline Eigen::MatrixXd assemble_period_map_hat(const DenseOracle& o, const Evolver& ev) {
  const std::size_t n = o.size();
  Eigen::MatrixXd P(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[c] = 1.0;
    FieldState col = ev.period_map(o.from_hat(e));
    P.col(c) = o.to_hat(col);
  }
  return P;
}

struct OperatorIdentityReport {
  std::size_t dofs = 0;
  double dt_formula_rel_err = 0.0;   // composed D_T vs 2(1 - cos(T theta))
  double ct_norm = 0.0;              // ||C_T|| in the weighted norm
  double dt_norm = 0.0;              // ||D_T||
  double dt_asymmetry_rel = 0.0;
  double dt_min_eig = 0.0;           // most negative eigenvalue (PSD check)
  double dt_smallest_nonzero_eig = 0.0;
  bool formula_ok = false, ct_norm_ok = false, dt_norm_ok = false;
  bool selfadjoint_ok = false, psd_ok = false;
  bool all_ok() const {
    return formula_ok && ct_norm_ok && dt_norm_ok && selfadjoint_ok && psd_ok;
  }
};

/// Checks D_T = C_T^* C_T = 2(1 - cos(T theta)) in the eigenbasis together
/// with the norm bounds ||C_T|| <= 2 and ||D_T|| <= 4 and selfadjoint
/// positive semidefiniteness. Conservative configurations only.
inline OperatorIdentityReport verify_operator_identities(const DenseOracle& o, double T,
                                                         double formula_tol = 1e-10,
                                                         double norm_slack = 1e-10) {
  OperatorIdentityReport r;
  r.dofs = o.size();
  Eigen::MatrixXd C = o.control_op_hat(T);
  Eigen::MatrixXd D = C.transpose() * C;

  Eigen::VectorXcd ph(o.theta.size());
  for (Eigen::Index k = 0; k < o.theta.size(); ++k)
    ph[k] = 2.0 * (1.0 - std::cos(o.theta[k] * T));
  Eigen::MatrixXd Df = (o.V * ph.asDiagonal() * o.V.adjoint()).real();

  const double scale = std::max(Df.cwiseAbs().maxCoeff(), 1e-300);
  r.dt_formula_rel_err = (D - Df).cwiseAbs().maxCoeff() / scale;
  r.formula_ok = r.dt_formula_rel_err <= formula_tol;

  Eigen::JacobiSVD<Eigen::MatrixXd> svdC(C);
  r.ct_norm = svdC.singularValues().size() ? svdC.singularValues()[0] : 0.0;
  r.ct_norm_ok = r.ct_norm <= 2.0 + norm_slack;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esD(D);
  const auto& ev = esD.eigenvalues();
  r.dt_norm = std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
  r.dt_norm_ok = r.dt_norm <= 4.0 + norm_slack;
  r.dt_min_eig = ev[0];
  r.psd_ok = r.dt_min_eig >= -1e-10 * std::max(r.dt_norm, 1.0);
  r.dt_smallest_nonzero_eig = 0.0;
  for (Eigen::Index k = 0; k < ev.size(); ++k)
    if (ev[k] > 1e-10 * std::max(r.dt_norm, 1.0)) {
      r.dt_smallest_nonzero_eig = ev[k];
      break;
    }

  const double asym = (D - D.transpose()).cwiseAbs().maxCoeff();
  r.dt_asymmetry_rel = asym / std::max(r.dt_norm, 1e-300);
  r.selfadjoint_ok = r.dt_asymmetry_rel <= 1e-12;
  return r;
}

struct NormalSolveResult {
  FieldState u0;
  int kernel_dim = 0;
  double sigma_max = 0.0;
  double smallest_kept_sigma = 0.0;
  double residual_rel = 0.0;          // normal-equation residual
  Eigen::MatrixXd complement_basis;   // right singular vectors, kept part (hat coords)
};

/// Minimum-norm least-squares solution of the discrete normal equation
/// C^T C u0 = -C^T u_T^c with C = P - I assembled from the leapfrog period
/// map and u_T^c the driven one-period response from zero initial data.
inline NormalSolveResult direct_normal_solve(const DenseOracle& o, const Evolver& ev,
                                             double kernel_rel_tol = 1e-10) {
  const std::size_t n = o.size();
  Eigen::MatrixXd C = assemble_period_map_hat(o, ev);
  C -= Eigen::MatrixXd::Identity(n, n);

  FieldState zero(ev.discretization().layout);
  FieldState uTc = ev.solve_driven(zero);
  Eigen::VectorXd y = o.to_hat(uTc);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  NormalSolveResult res;
  res.sigma_max = sv.size() ? sv[0] : 0.0;
  const double thr = kernel_rel_tol * res.sigma_max;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  int kept = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv[k] <= thr) continue;
    ++kept;
    res.smallest_kept_sigma = sv[k];
    x -= svd.matrixV().col(k) * (svd.matrixU().col(k).dot(y) / sv[k]);
  }
  res.kernel_dim = static_cast<int>(n) - kept;
  res.complement_basis = svd.matrixV().leftCols(kept);
  res.u0 = o.from_hat(x);

  Eigen::VectorXd lhs = C.transpose() * (C * x);
  Eigen::VectorXd rhs = -(C.transpose() * y);
  const double rhs_n = rhs.norm();
  res.residual_rel = rhs_n > 0.0 ? (lhs - rhs).norm() / rhs_n : (lhs - rhs).norm();
  return res;
}

/// Projection of a state onto the kernel complement of the control operator
/// (hat-coordinate basis from a previous direct solve).
inline FieldState project_complement(const DenseOracle& o, const NormalSolveResult& ns,
                                     const FieldState& u) {
  Eigen::VectorXd xhat = o.to_hat(u);
  Eigen::VectorXd proj = ns.complement_basis * (ns.complement_basis.transpose() * xhat);
  return o.from_hat(proj);
}

}  // namespace oracle
}  // namespace periwave
