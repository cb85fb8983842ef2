#include "pflab/fermi.hpp"

#include "pflab/conjugate.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pflab {

ContinuumFactor zero_continuum_factor(int dim_k, int n_ch, int d) {
  ContinuumFactor cf;
  cf.dim_k = dim_k;
  cf.n_ch = n_ch;
  cf.d = d;
  cf.channel_weights.assign(n_ch, 1.0);
  cf.profiles.resize(std::size_t(dim_k) * dim_k * n_ch);
  return cf;
}

FgrMatrix fgr_matrix(const Model& m, int i0, double eps) {
  std::vector<int> pidx = threshold_indices(m.atom, m.basis, i0);
  int r = int(pidx.size());
  SparseOp phi = field(m.atom, m.basis, m.alpha);
  VecR f = f_eps_diag(m, i0, eps);

  MatC phicols(m.dim(), r);
  for (int c = 0; c < r; ++c) {
    VecC col = VecC::Zero(m.dim());
    for (SpMat::InnerIterator it(phi.m, pidx[c]); it; ++it)
      col[it.row()] = it.value();
    phicols.col(c) = col;
  }

  FgrMatrix out;
  out.lambda_matrix.resize(r, r);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b) {
      cd acc(0, 0);
      for (Eigen::Index g = 0; g < m.dim(); ++g)
        acc += std::conj(phicols(g, a)) * f[g] * phicols(g, b);
      out.lambda_matrix(a, b) = eps * acc;
    }
  Eigen::SelfAdjointEigenSolver<MatC> es(out.lambda_matrix, Eigen::EigenvaluesOnly);
  if (r > 0) {
    out.c2 = es.eigenvalues()[0];
    out.c1 = es.eigenvalues()[r - 1];
  }
  return out;
}

FgrAnalytic fgr_analytic(const AtomSpec& atom, int i0, const ContinuumFactor& cf) {
  if (cf.dim_k != atom.dim())
    throw std::invalid_argument("fgr_analytic: continuum factor shape mismatch");
  if (int(cf.channel_weights.size()) != cf.n_ch)
    throw std::invalid_argument("fgr_analytic: channel weight list size mismatch");
  if (cf.d < 1) throw std::invalid_argument("fgr_analytic: d >= 1 required");

  std::vector<int> pidx = atom.level_indices(i0);
  int r = int(pidx.size());
  double k0 = atom.levels.at(i0);

  FgrAnalytic out;
  out.lambda_matrix = MatC::Zero(r, r);
  out.sum_empty = true;

  for (int i = 0; i < atom.dim(); ++i) {
    double gap = k0 - atom.k[i];
    if (gap <= 1e-12) continue;  // only strictly lower levels contribute
    out.sum_empty = false;
    double jac = std::pow(gap, cf.d - 1);
    for (int ch = 0; ch < cf.n_ch; ++ch) {
      double w = cf.channel_weights[ch];
      for (int a = 0; a < r; ++a) {
        const auto& fa = cf.at(i, pidx[a], ch);
        if (!fa) continue;
        cd va = fa(gap);
        for (int b = 0; b < r; ++b) {
          const auto& fb = cf.at(i, pidx[b], ch);
          if (!fb) continue;
          out.lambda_matrix(a, b) +=
              (pi / 2.0) * jac * w * std::conj(va) * fb(gap);
        }
      }
    }
  }
  if (r > 0) {
    Eigen::SelfAdjointEigenSolver<MatC> es(out.lambda_matrix, Eigen::EigenvaluesOnly);
    out.c2 = es.eigenvalues()[0];
    out.c1 = es.eigenvalues()[r - 1];
  }
  return out;
}

FgrReport fgr_convergence(const Model& m, int i0, const ContinuumFactor& cf,
                          const std::vector<double>& eps_list) {
  FgrReport rep;
  rep.i0 = i0;
  rep.analytic = fgr_analytic(m.atom, i0, cf);
  rep.sum_empty = rep.analytic.sum_empty;
  double ref = rep.analytic.lambda_matrix.norm();  // Frobenius
  for (double eps : eps_list) {
    FgrMatrix fm = fgr_matrix(m, i0, eps);
    FgrRow row;
    row.eps = eps;
    row.c1 = fm.c1;
    row.c2 = fm.c2;
    row.rel_err = ref > 0
                      ? (fm.lambda_matrix - rep.analytic.lambda_matrix).norm() / ref
                      : std::numeric_limits<double>::quiet_NaN();
    rep.rows.push_back(row);
  }
  return rep;
}

FgrGridReport fgr_joint_convergence(
    const std::function<Model(int)>& make_model, const std::vector<int>& n_rs,
    int i0, const ContinuumFactor& cf, const std::vector<double>& eps_list) {
  FgrGridReport rep;
  for (int n_r : n_rs) {
    Model m = make_model(n_r);
    FgrAnalytic an = fgr_analytic(m.atom, i0, cf);
    double ref = an.lambda_matrix.norm();
    double h = m.grid.spacing();
    double best = std::numeric_limits<double>::infinity();
    double best_e = eps_list.empty() ? 0 : eps_list.front();
    for (double eps : eps_list) {
      FgrMatrix fm = fgr_matrix(m, i0, eps);
      FgrGridRow row;
      row.n_r = n_r;
      row.h = h;
      row.eps = eps;
      row.rel_err = ref > 0 ? (fm.lambda_matrix - an.lambda_matrix).norm() / ref
                            : std::numeric_limits<double>::quiet_NaN();
      row.eps_below_spacing = eps < 3 * h;
      if (row.rel_err < best) {
        best = row.rel_err;
        best_e = eps;
      }
      rep.rows.push_back(row);
    }
    rep.best_eps.emplace_back(n_r, best_e);
  }
  return rep;
}

}  // namespace pflab
