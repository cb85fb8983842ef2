#include "pflab/conjugate.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pflab {

VecR f_eps_diag(const Model& m, int i0, double eps) {
  if (eps <= 0) throw std::invalid_argument("f_eps_diag: eps > 0 required");
  double k0 = m.atom.levels.at(i0);
  VecR h0 = h0_diag(m.atom, m.basis);
  std::vector<int> pidx = threshold_indices(m.atom, m.basis, i0);
  VecR f(h0.size());
  for (Eigen::Index g = 0; g < h0.size(); ++g) {
    double d = h0[g] - k0;
    f[g] = 1.0 / (d * d + eps * eps);
  }
  for (int g : pidx) f[g] = 0.0;  // Pbar on both sides
  return f;
}

SparseOp build_b_eps(const Model& m, int i0, double eps) {
  SparseOp phi = field(m.atom, m.basis, m.alpha);
  VecR f = f_eps_diag(m, i0, eps);
  std::vector<int> pidx = threshold_indices(m.atom, m.basis, i0);

  // T = F phi P has one nonzero column per threshold index
  std::vector<Triplet> trips;
  for (int p : pidx) {
    for (SpMat::InnerIterator it(phi.m, p); it; ++it) {
      cd v = f[it.row()] * it.value();
      if (v != cd(0, 0)) trips.emplace_back(it.row(), p, v);
    }
  }
  SpMat T(m.dim(), m.dim());
  T.setFromTriplets(trips.begin(), trips.end());
  SpMat B = (T - SpMat(T.adjoint())) / cd(0, 2);
  B.makeCompressed();
  return {std::move(B), true};
}

ConjugateSet build_conjugate(const Model& m, CutoffIndex n, double theta,
                             double eps, int i0, MSource msource) {
  ConjugateSet c;
  c.n = n;
  c.lambda = m.lambda;
  c.theta = theta;
  c.eps = eps;
  c.i0 = i0;
  c.msource = msource;

  SparseOp a_ob = generator_a(m.grid, n);
  c.A = lift_fock(m.atom, dgamma_full(m.basis, a_ob));

  SparseOp pvac = vacuum_proj_full(m.atom, m.basis);
  if (msource == MSource::function) {
    VecR mvals = m.grid.sample([&](double r) { return m_field(n, r); });
    VecR mdiag = dgamma_diag(m.basis, mvals);
    c.M = add(lift_fock_diag(m.atom, mdiag), pvac);
  } else {
    SparseOp m_alg = commutator_i(omega_op(m.grid), a_ob);
    c.M = add(lift_fock(m.atom, dgamma_full(m.basis, m_alg)), pvac);
  }

  FormFactor ia_alpha = m.alpha.apply_onebody(cd(0, 1) * a_ob.m);
  SparseOp phi_ia = field(m.atom, m.basis, ia_alpha);
  c.S = add(scale(cd(-m.lambda, 0), phi_ia), scale(cd(-1, 0), pvac));

  if (i0 >= 0) {
    if (theta <= 0 || eps <= 0)
      throw std::invalid_argument("build_conjugate: theta, eps > 0 with dressing");
    c.B = build_b_eps(m, i0, eps);
    double lt = m.lambda * theta;
    c.A_hat = add(c.A, scale(cd(lt, 0), c.B));
    SparseOp H = hamiltonian(m);
    c.S_hat = add(c.S, commutator_i(H, scale(cd(lt, 0), c.B)));
  } else {
    SpMat zero(m.dim(), m.dim());
    c.B = {zero, true};
    c.A_hat = c.A;
    c.S_hat = c.S;
  }
  return c;
}

MatC smooth_test_subspace(const Model& m, int bumps_per_sector) {
  const RadialGrid& g = m.grid;
  int q = bumps_per_sector;

  // one-body plateau bumps spread over the interior, weighted coordinates
  std::vector<VecC> bumps;
  for (int p = 0; p < q; ++p) {
    double lo = g.r_max * (0.08 + 0.8 * p / double(q + 1));
    double hi = lo + g.r_max * 0.8 / double(q + 1) * 1.6;
    hi = std::min(hi, 0.95 * g.r_max);
    double w = 0.35 * (hi - lo);
    VecC v = VecC::Zero(g.modes());
    for (int c = 0; c < g.n_ch; ++c)
      for (int j = 0; j < g.n_r; ++j)
        v[j + g.n_r * c] =
            plateau_bump(g.nodes[j], lo, hi, w) * std::sqrt(g.weights[j]);
    if (v.norm() > 1e-12) bumps.push_back(v.normalized());
  }

  // One-boson bumps stay admissible even at depth 1: the field-term
  // mismatch between [H, iA] and S cancels exactly in the truncated
  // algebra, so only the sector-preserving free defect is probed there.
  // Deeper product states keep one sector of margin.
  int margin_ok_n = std::max(1, m.basis.n_max - 1);
  if (m.basis.n_max < 1) margin_ok_n = 0;
  double e_margin = m.basis.has_energy_cut()
                        ? m.basis.e_max - 2.0 * m.basis.mode_energy.maxCoeff()
                        : std::numeric_limits<double>::infinity();

  std::vector<VecC> fock_vecs;
  // vacuum
  {
    VecC v = VecC::Zero(m.basis.size());
    v[0] = 1.0;
    fock_vecs.push_back(v);
  }
  // one-boson bumps
  if (margin_ok_n >= 1) {
    for (auto& bp : bumps) {
      VecC v = VecC::Zero(m.basis.size());
      for (int s = m.basis.sector_begin[1]; s < m.basis.sector_begin[2]; ++s) {
        int mode = m.basis.states[s][0].first;
        if (m.basis.energies[s] > e_margin) continue;
        v[s] = bp[mode];
      }
      if (v.norm() > 1e-12) fock_vecs.push_back(v);
    }
  }
  // two-boson symmetrized products of distinct bumps
  if (margin_ok_n >= 2 && m.basis.n_max >= 2) {
    for (std::size_t p = 0; p < bumps.size(); ++p)
      for (std::size_t r = p; r < bumps.size(); ++r) {
        VecC v = VecC::Zero(m.basis.size());
        for (int s = m.basis.sector_begin[2]; s < m.basis.sector_begin[3]; ++s) {
          if (m.basis.energies[s] > e_margin) continue;
          const OccState& st = m.basis.states[s];
          if (st.size() == 1) {
            int mo = st[0].first;
            v[s] = std::sqrt(2.0) * bumps[p][mo] * bumps[r][mo];
          } else {
            int m1 = st[0].first, m2 = st[1].first;
            v[s] = bumps[p][m1] * bumps[r][m2] + bumps[p][m2] * bumps[r][m1];
          }
        }
        if (v.norm() > 1e-12) fock_vecs.push_back(v);
      }
  }

  // tensor with the atomic levels and orthonormalize
  int dk = m.atom.dim();
  MatC raw(m.dim(), Eigen::Index(dk) * fock_vecs.size());
  Eigen::Index col = 0;
  for (auto& fv : fock_vecs)
    for (int i = 0; i < dk; ++i) {
      VecC v = VecC::Zero(m.dim());
      for (int s = 0; s < m.basis.size(); ++s)
        if (fv[s] != cd(0, 0)) v[m.gidx(i, s)] = fv[s];
      raw.col(col++) = v;
    }

  Eigen::HouseholderQR<MatC> qr(raw);
  MatC Q = qr.householderQ() * MatC::Identity(m.dim(), raw.cols());
  // drop columns that lost rank
  MatC R = qr.matrixQR().topRows(raw.cols()).triangularView<Eigen::Upper>();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index c2 = 0; c2 < raw.cols(); ++c2)
    if (std::abs(R(c2, c2)) > 1e-9) keep.push_back(c2);
  MatC out(m.dim(), Eigen::Index(keep.size()));
  for (std::size_t t = 0; t < keep.size(); ++t) out.col(t) = Q.col(keep[t]);
  return out;
}

ResidualReport decomposition_residual(const Model& m, const ConjugateSet& c,
                                      int bumps_per_sector) {
  SparseOp H = hamiltonian(m);
  SparseOp lhs = commutator_i(H, c.A_hat);
  SpMat delta = lhs.m - c.M.m - c.S_hat.m;
  delta.makeCompressed();

  ResidualReport rep;
  MatC Q = smooth_test_subspace(m, bumps_per_sector);
  rep.subspace_dim = int(Q.cols());
  MatC dq = delta * Q;
  Eigen::SelfAdjointEigenSolver<MatC> es(dq.adjoint() * dq, Eigen::EigenvaluesOnly);
  rep.restricted = std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  rep.full_est = opnorm_est(delta);
  return rep;
}

SizeReport commutator_size_report(const Model& m, int i0,
                                  const std::vector<double>& eps_list) {
  SizeReport rep;
  SparseOp h0 = make_diag(h0_diag(m.atom, m.basis));
  SparseOp phi = field(m.atom, m.basis, m.alpha);
  VecR nd = number_diag(m.basis);
  VecR wdiag(nd.size());
  for (Eigen::Index s = 0; s < nd.size(); ++s)
    wdiag[s] = 1.0 / std::sqrt(nd[s] + 1.0);
  SparseOp W = lift_fock_diag(m.atom, wdiag);

  std::vector<double> le, lf, lg;
  for (double eps : eps_list) {
    SparseOp B = build_b_eps(m, i0, eps);
    SpMat t1 = W.m * commutator_i(h0, B).m * W.m;
    SpMat t2 = W.m * commutator_i(phi, B).m * W.m;
    SizeRow row{eps, opnorm_est(t1), opnorm_est(t2)};
    rep.rows.push_back(row);
    le.push_back(std::log(eps));
    lf.push_back(std::log(row.free_term));
    lg.push_back(std::log(row.field_term));
  }
  rep.slope_free = linfit(le, lf).second;
  rep.slope_field = linfit(le, lg).second;
  return rep;
}

}  // namespace pflab
