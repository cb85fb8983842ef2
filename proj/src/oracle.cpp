#include "pflab/oracle.hpp"

#include "pflab/onebody.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace pflab {

namespace {

Eigen::Index ipow(Eigen::Index base, int e) {
  Eigen::Index r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

// average over all slot permutations (the full symmetrizer)
VecC symmetrize(const VecC& v, int d, int n) {
  if (n <= 1) return v;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  VecC out = VecC::Zero(v.size());
  std::vector<int> tup(n);
  int count = 0;
  do {
    for (Eigen::Index idx = 0; idx < v.size(); ++idx) {
      Eigen::Index rest = idx;
      for (int k = 0; k < n; ++k) {
        tup[k] = int(rest % d);
        rest /= d;
      }
      Eigen::Index pidx = 0;
      for (int k = n - 1; k >= 0; --k) pidx = pidx * d + tup[perm[k]];
      out[pidx] += v[idx];
    }
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out / double(count);
}

}  // namespace

VecC sym_embed(const OccState& s, int d) {
  int n = occ_total(s);
  VecC out = VecC::Zero(ipow(d, n));
  if (n == 0) {
    out[0] = 1.0;
    return out;
  }
  std::vector<int> mm;
  double logfac = 0;
  for (const auto& [mo, c] : s) {
    for (int t = 0; t < c; ++t) mm.push_back(mo);
    for (int t = 2; t <= c; ++t) logfac += std::log(double(t));
  }
  for (int t = 2; t <= n; ++t) logfac -= std::log(double(t));
  double coeff = std::exp(0.5 * logfac);  // sqrt(prod c! / n!)
  std::sort(mm.begin(), mm.end());
  do {
    Eigen::Index idx = 0;
    for (int k = n - 1; k >= 0; --k) idx = idx * d + mm[k];
    out[idx] = coeff;
  } while (std::next_permutation(mm.begin(), mm.end()));
  return out;
}

namespace {

// b(f): contract slot 0, times sqrt(n); valid on symmetric tensors
VecC annihilate_tensor(const VecC& f, const VecC& v, int d, int n) {
  Eigen::Index outsz = ipow(d, n - 1);
  VecC out = VecC::Zero(outsz);
  for (Eigen::Index t = 0; t < outsz; ++t) {
    cd acc = 0;
    for (int mo = 0; mo < d; ++mo) acc += std::conj(f[mo]) * v[mo + d * t];
    out[t] = acc;
  }
  return std::sqrt(double(n)) * out;
}

// b*(f) = sqrt(n+1) Sym(f (x) v)
VecC create_tensor(const VecC& f, const VecC& v, int d, int n) {
  VecC raw = VecC::Zero(ipow(d, n + 1));
  for (Eigen::Index t = 0; t < v.size(); ++t)
    for (int mo = 0; mo < d; ++mo) raw[mo + d * t] = f[mo] * v[t];
  return std::sqrt(double(n + 1)) * symmetrize(raw, d, n + 1);
}

// apply a one-body operator to one slot
VecC apply_slot(const MatC& B, const VecC& v, int d, int n, int slot) {
  VecC out = VecC::Zero(v.size());
  Eigen::Index stride = ipow(d, slot);
  for (Eigen::Index idx = 0; idx < v.size(); ++idx) {
    int mo = int((idx / stride) % d);
    Eigen::Index base = idx - mo * stride;
    for (int mp = 0; mp < d; ++mp)
      out[base + mp * stride] += B(mp, mo) * v[idx];
  }
  return out;
}

}  // namespace

MatC oracle_annihilation(const AtomSpec& atom, const FockBasis& b,
                         const FormFactor& ff) {
  const int dk = atom.dim();
  const int d = b.n_modes;
  const Eigen::Index dim = Eigen::Index(dk) * b.size();
  MatC out = MatC::Zero(dim, dim);
  for (int s = 0; s < b.size(); ++s) {
    int n = occ_total(b.states[s]);
    if (n == 0) continue;
    VecC vs = sym_embed(b.states[s], d);
    // targets live one sector down
    int t0 = b.sector_begin[n - 1], t1 = b.sector_begin[n];
    std::vector<VecC> emb(t1 - t0);
    for (int t = t0; t < t1; ++t) emb[t - t0] = sym_embed(b.states[t], d);
    for (int i = 0; i < dk; ++i)
      for (int j = 0; j < dk; ++j) {
        if (ff.zero(i, j)) continue;
        VecC w = annihilate_tensor(ff.at(i, j), vs, d, n);
        for (int t = t0; t < t1; ++t) {
          cd val = emb[t - t0].dot(w);
          if (val != cd(0, 0)) out(j + dk * t, i + dk * s) = val;
        }
      }
  }
  return out;
}

MatC oracle_creation(const AtomSpec& atom, const FockBasis& b,
                     const FormFactor& ff) {
  const int dk = atom.dim();
  const int d = b.n_modes;
  const Eigen::Index dim = Eigen::Index(dk) * b.size();
  MatC out = MatC::Zero(dim, dim);
  for (int s = 0; s < b.size(); ++s) {
    int n = occ_total(b.states[s]);
    if (n + 1 > b.n_max) continue;
    VecC vs = sym_embed(b.states[s], d);
    int t0 = b.sector_begin[n + 1], t1 = b.sector_begin[n + 2];
    std::vector<VecC> emb(t1 - t0);
    for (int t = t0; t < t1; ++t) emb[t - t0] = sym_embed(b.states[t], d);
    for (int i = 0; i < dk; ++i)
      for (int l = 0; l < dk; ++l) {
        if (ff.zero(i, l)) continue;
        VecC w = create_tensor(ff.at(i, l), vs, d, n);
        for (int t = t0; t < t1; ++t) {
          cd val = emb[t - t0].dot(w);
          if (val != cd(0, 0)) out(i + dk * t, l + dk * s) = val;
        }
      }
  }
  return out;
}

MatC oracle_field(const AtomSpec& atom, const FockBasis& b,
                  const FormFactor& ff) {
  return (oracle_annihilation(atom, b, ff) + oracle_creation(atom, b, ff)) /
         std::sqrt(2.0);
}

MatC oracle_dgamma(const FockBasis& b, const MatC& onebody) {
  const int d = b.n_modes;
  MatC out = MatC::Zero(b.size(), b.size());
  for (int s = 0; s < b.size(); ++s) {
    int n = occ_total(b.states[s]);
    if (n == 0) continue;
    VecC vs = sym_embed(b.states[s], d);
    VecC w = VecC::Zero(vs.size());
    for (int slot = 0; slot < n; ++slot) w += apply_slot(onebody, vs, d, n, slot);
    int t0 = b.sector_begin[n], t1 = b.sector_begin[n + 1];
    for (int t = t0; t < t1; ++t) {
      cd val = sym_embed(b.states[t], d).dot(w);
      if (val != cd(0, 0)) out(t, s) = val;
    }
  }
  return out;
}

MatC oracle_gamma(const FockBasis& b, const MatC& q) {
  const int d = b.n_modes;
  MatC out = MatC::Zero(b.size(), b.size());
  for (int s = 0; s < b.size(); ++s) {
    int n = occ_total(b.states[s]);
    VecC w = sym_embed(b.states[s], d);
    for (int slot = 0; slot < n; ++slot) w = apply_slot(q, w, d, n, slot);
    int t0 = b.sector_begin[n], t1 = b.sector_begin[n + 1];
    for (int t = t0; t < t1; ++t) {
      cd val = sym_embed(b.states[t], d).dot(w);
      if (val != cd(0, 0)) out(t, s) = val;
    }
  }
  return out;
}

MatC oracle_hamiltonian(const Model& m) {
  const int dk = m.atom.dim();
  const Eigen::Index dim = m.dim();
  if (m.grid.modes() != m.basis.n_modes)
    throw std::invalid_argument("oracle_hamiltonian: grid/basis mismatch");
  MatC h = m.lambda * oracle_field(m.atom, m.basis, m.alpha);
  MatC dg = oracle_dgamma(m.basis, MatC(omega_op(m.grid).m));
  for (int s = 0; s < m.basis.size(); ++s)
    for (int t = 0; t < m.basis.size(); ++t)
      if (dg(t, s) != cd(0, 0))
        for (int i = 0; i < dk; ++i) h(i + dk * t, i + dk * s) += dg(t, s);
  for (Eigen::Index g = 0; g < dim; ++g) h(g, g) += m.atom.k[g % dk];
  return h;
}

double oracle_vanhove_shift(double lambda, const VecC& v, const VecR& omega) {
  if (v.size() != omega.size())
    throw std::invalid_argument("oracle_vanhove_shift: size mismatch");
  double s = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (omega[i] <= 0)
      throw std::invalid_argument("oracle_vanhove_shift: omega > 0 required");
    s += std::norm(v[i]) / omega[i];
  }
  return -0.5 * lambda * lambda * s;
}

SecondOrder oracle_second_order(const Model& m, int atom_eigindex, double eps) {
  if (eps <= 0)
    throw std::invalid_argument("oracle_second_order: eps > 0 required");
  const int dk = m.atom.dim();
  const VecR& omega = m.grid.nodes;  // dispersion |k| on the half line
  double e2 = 0, gr = 0;
  for (int j = 0; j < dk; ++j) {
    if (m.alpha.zero(j, atom_eigindex)) continue;
    const VecC& f = m.alpha.at(j, atom_eigindex);
    for (Eigen::Index mo = 0; mo < f.size(); ++mo) {
      double den = m.atom.k[atom_eigindex] - m.atom.k[j] -
                   omega[m.grid.rindex(int(mo))];
      if (std::abs(den) < 1e-12)
        throw std::runtime_error(
            "oracle_second_order: resonant denominator in the truncation");
      e2 += std::norm(f[mo]) / den;
      gr += std::norm(f[mo]) * eps / (den * den + eps * eps);
    }
  }
  SecondOrder out;
  out.shift_coeff = 0.5 * e2;
  out.width = m.lambda * m.lambda * gr;  // 2 lambda^2 * (gr / 2)
  out.eps = eps;
  return out;
}

double max_abs_diff(const MatC& a, const SpMat& b) {
  MatC d = a - MatC(b);
  return d.cwiseAbs().maxCoeff();
}

}  // namespace pflab
