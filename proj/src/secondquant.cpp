#include "pflab/secondquant.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace pflab {

std::vector<int> AtomSpec::level_indices(int i0) const {
  std::vector<int> idx;
  for (int i = 0; i < dim(); ++i)
    if (level_of[i] == i0) idx.push_back(i);
  return idx;
}

AtomSpec make_atom(const MatC& K, double degeneracy_tol) {
  if (K.rows() != K.cols() || K.rows() == 0)
    throw std::invalid_argument("make_atom: square nonempty K required");
  if ((K - K.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + K.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("make_atom: K must be Hermitian");

  AtomSpec a;
  a.K_input = K;
  Eigen::SelfAdjointEigenSolver<MatC> es(K);
  a.k = es.eigenvalues();
  a.evecs = es.eigenvectors();
  a.level_of.resize(a.dim());
  for (int i = 0; i < a.dim(); ++i) {
    if (a.levels.empty() || a.k[i] - a.levels.back() > degeneracy_tol)
      a.levels.push_back(a.k[i]);
    a.level_of[i] = int(a.levels.size()) - 1;
  }
  return a;
}

MatC FormFactor::stacked() const {
  MatC b = MatC::Zero(Eigen::Index(dim_k) * modes, dim_k);
  for (int j = 0; j < dim_k; ++j)
    for (int i = 0; i < dim_k; ++i) {
      if (zero(i, j)) continue;
      const VecC& v = at(i, j);
      for (int m = 0; m < modes; ++m) b(i + Eigen::Index(dim_k) * m, j) = v[m];
    }
  return b;
}

double FormFactor::norm() const {
  Eigen::JacobiSVD<MatC> svd(stacked());
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

double FormFactor::weighted_norm(const VecR& wm) const {
  if (wm.size() != modes)
    throw std::invalid_argument("weighted_norm: per-mode weight size mismatch");
  MatC b = stacked();
  for (int m = 0; m < modes; ++m)
    b.middleRows(Eigen::Index(dim_k) * m, dim_k) *= wm[m];
  Eigen::JacobiSVD<MatC> svd(b);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

FormFactor FormFactor::apply_onebody(const SpMat& op) const {
  FormFactor out = zero_form_factor(dim_k, modes);
  for (int j = 0; j < dim_k; ++j)
    for (int i = 0; i < dim_k; ++i)
      if (!zero(i, j)) out.at(i, j) = op * at(i, j);
  return out;
}

FormFactor FormFactor::scaled(cd s) const {
  FormFactor out = zero_form_factor(dim_k, modes);
  for (std::size_t t = 0; t < f.size(); ++t)
    if (f[t].size()) out.f[t] = s * f[t];
  return out;
}

FormFactor zero_form_factor(int dim_k, int modes) {
  FormFactor ff;
  ff.dim_k = dim_k;
  ff.modes = modes;
  ff.f.resize(std::size_t(dim_k) * dim_k);
  return ff;
}

FormFactor scalar_form_factor(int dim_k, const VecC& v) {
  FormFactor ff = zero_form_factor(dim_k, int(v.size()));
  for (int i = 0; i < dim_k; ++i) ff.at(i, i) = v;
  return ff;
}

SparseOp annihilation(const AtomSpec& atom, const FockBasis& b, const FormFactor& ff) {
  if (ff.dim_k != atom.dim() || ff.modes != b.n_modes)
    throw std::invalid_argument("annihilation: form factor shape mismatch");
  int dk = atom.dim();
  std::vector<Triplet> trips;
  for (int s = 0; s < b.size(); ++s) {
    for (auto& [m, c] : b.states[s]) {
      OccState low = occ_lower(b.states[s], m);
      int t = b.index_of(low);
      if (t < 0) continue;  // cannot happen: lowering keeps the state inside
      double amp = std::sqrt(double(c));
      for (int j = 0; j < dk; ++j)
        for (int i = 0; i < dk; ++i) {
          if (ff.zero(i, j)) continue;
          cd v = std::conj(ff.at(i, j)[m]) * amp;
          if (v != cd(0, 0))
            trips.emplace_back(j + dk * t, i + dk * s, v);
        }
    }
  }
  SpMat m(Eigen::Index(dk) * b.size(), Eigen::Index(dk) * b.size());
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return {std::move(m), false};
}

SparseOp creation(const AtomSpec& atom, const FockBasis& b, const FormFactor& ff) {
  return adjoint(annihilation(atom, b, ff));
}

SparseOp field(const AtomSpec& atom, const FockBasis& b, const FormFactor& ff) {
  SparseOp a = annihilation(atom, b, ff);
  SpMat phi = (a.m + SpMat(a.m.adjoint())) / std::sqrt(2.0);
  phi.makeCompressed();
  return {std::move(phi), true};
}

VecR h0_diag(const AtomSpec& atom, const FockBasis& b) {
  int dk = atom.dim();
  VecR d(Eigen::Index(dk) * b.size());
  for (int s = 0; s < b.size(); ++s)
    for (int i = 0; i < dk; ++i) d[i + dk * s] = atom.k[i] + b.energies[s];
  return d;
}

SparseOp hamiltonian(const Model& m) {
  SparseOp h0 = make_diag(h0_diag(m.atom, m.basis));
  if (m.lambda == 0.0) return h0;
  SparseOp phi = field(m.atom, m.basis, m.alpha);
  SpMat h = h0.m + cd(m.lambda, 0) * phi.m;
  h.makeCompressed();
  return {std::move(h), true};
}

SparseOp lift_fock_diag(const AtomSpec& atom, const VecR& diag) {
  int dk = atom.dim();
  VecR d(Eigen::Index(dk) * diag.size());
  for (Eigen::Index s = 0; s < diag.size(); ++s)
    for (int i = 0; i < dk; ++i) d[i + dk * s] = diag[s];
  return make_diag(d);
}

SparseOp lift_fock(const AtomSpec& atom, const SparseOp& fock_op) {
  int dk = atom.dim();
  std::vector<Triplet> trips;
  for (int k = 0; k < fock_op.m.outerSize(); ++k)
    for (SpMat::InnerIterator it(fock_op.m, k); it; ++it)
      for (int i = 0; i < dk; ++i)
        trips.emplace_back(i + dk * it.row(), i + dk * it.col(), it.value());
  SpMat m(Eigen::Index(dk) * fock_op.dim(), Eigen::Index(dk) * fock_op.dim());
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return {std::move(m), fock_op.hermitian};
}

SparseOp number_full(const AtomSpec& atom, const FockBasis& b) {
  return lift_fock_diag(atom, number_diag(b));
}

SparseOp vacuum_proj_full(const AtomSpec& atom, const FockBasis& b) {
  return lift_fock_diag(atom, vacuum_diag(b));
}

std::vector<int> threshold_indices(const AtomSpec& atom, const FockBasis& b, int i0) {
  if (i0 < 0 || i0 >= atom.n_levels())
    throw std::invalid_argument("threshold_indices: level out of range");
  (void)b;
  std::vector<int> out;
  for (int i : atom.level_indices(i0)) out.push_back(i);  // vacuum is state 0
  return out;
}

SparseOp threshold_proj(const AtomSpec& atom, const FockBasis& b, int i0) {
  int dk = atom.dim();
  VecR d = VecR::Zero(Eigen::Index(dk) * b.size());
  for (int g : threshold_indices(atom, b, i0)) d[g] = 1.0;
  return make_diag(d);
}

SparseOp dgamma_full(const FockBasis& b, const SparseOp& onebody) {
  if (onebody.dim() != b.n_modes)
    throw std::invalid_argument("dgamma_full: one-body dimension mismatch");
  std::vector<Triplet> trips;
  for (int s = 0; s < b.size(); ++s) {
    for (auto& [m, c] : b.states[s]) {
      OccState low = occ_lower(b.states[s], m);
      double am = std::sqrt(double(c));
      for (SpMat::InnerIterator it(onebody.m, m); it; ++it) {
        int mp = int(it.row());
        OccState tgt = occ_raise(low, mp);
        int t = b.index_of(tgt);
        if (t < 0) continue;  // energy cut can drop it
        double ap = std::sqrt(double(occ_count(low, mp) + 1));
        trips.emplace_back(t, s, it.value() * am * ap);
      }
    }
  }
  SpMat m(b.size(), b.size());
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return {std::move(m), onebody.hermitian};
}

namespace {

// permanent by Ryser's formula, fine for n <= ~10
cd permanent(const MatC& q) {
  int n = int(q.rows());
  if (n == 0) return cd(1, 0);
  cd total(0, 0);
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    cd prod(1, 0);
    int bits = __builtin_popcount(mask);
    for (int i = 0; i < n; ++i) {
      cd row(0, 0);
      for (int j = 0; j < n; ++j)
        if (mask & (1u << j)) row += q(i, j);
      prod *= row;
    }
    double sign = ((n - bits) % 2 == 0) ? 1.0 : -1.0;
    total += sign * prod;
  }
  return total;
}

double log_fact_prod(const OccState& s) {
  double lg = 0;
  for (auto& [m, c] : s) lg += std::lgamma(double(c) + 1.0);
  return lg;
}

}  // namespace

SparseOp gamma_contraction(const FockBasis& b, const MatC& q, int state_cap) {
  if (q.rows() != b.n_modes || q.cols() != b.n_modes)
    throw std::invalid_argument("gamma_contraction: one-body shape mismatch");
  if (b.size() > state_cap)
    throw std::runtime_error("gamma_contraction: basis too large for the permanent path");

  std::vector<Triplet> trips;
  bool herm = (q - q.adjoint()).cwiseAbs().maxCoeff() < 1e-14;
  for (int n = 0; n <= b.n_max; ++n) {
    for (int si = b.sector_begin[n]; si < b.sector_begin[n + 1]; ++si) {
      std::vector<int> cols;
      for (auto& [m, c] : b.states[si])
        for (int rep = 0; rep < c; ++rep) cols.push_back(m);
      for (int ti = b.sector_begin[n]; ti < b.sector_begin[n + 1]; ++ti) {
        std::vector<int> rows;
        for (auto& [m, c] : b.states[ti])
          for (int rep = 0; rep < c; ++rep) rows.push_back(m);
        MatC sub(n, n);
        for (int a = 0; a < n; ++a)
          for (int bb = 0; bb < n; ++bb) sub(a, bb) = q(rows[a], cols[bb]);
        cd val = permanent(sub) *
                 std::exp(-0.5 * (log_fact_prod(b.states[si]) +
                                  log_fact_prod(b.states[ti])));
        if (val != cd(0, 0)) trips.emplace_back(ti, si, val);
      }
    }
  }
  SpMat m(b.size(), b.size());
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return {std::move(m), herm};
}

NtCheck nt_estimate_check(const Model& m, const FormFactor& beta, int samples,
                          std::uint64_t seed) {
  NtCheck out;
  out.samples = samples;
  out.seed = seed;
  out.beta_norm = beta.norm();
  VecR winv = m.grid.sample([](double r) { return 1.0 / std::sqrt(r); });
  out.beta_wnorm = beta.weighted_norm(winv);

  SparseOp phi = field(m.atom, m.basis, beta);
  VecR ndga = dgamma_diag(m.basis, m.grid.sample([](double r) { return r; }));
  SparseOp dgw = lift_fock_diag(m.atom, ndga);

  Rng rng(seed);
  for (int t = 0; t < samples; ++t) {
    VecC v = rng.cgauss_vec(phi.dim());
    v.normalize();
    double lhs = (phi.m * v).squaredNorm();
    double quad = (v.dot(dgw.m * v)).real();
    double den1 = out.beta_norm + 2.0 * out.beta_wnorm * out.beta_wnorm * quad;
    double den2 = out.beta_norm * out.beta_norm +
                  2.0 * out.beta_wnorm * out.beta_wnorm * quad;
    out.max_ratio_c1_norm = std::max(out.max_ratio_c1_norm, lhs / den1);
    out.max_ratio_c1_normsq = std::max(out.max_ratio_c1_normsq, lhs / den2);
  }
  return out;
}

}  // namespace pflab
