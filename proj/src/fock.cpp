#include "pflab/fock.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <stdexcept>

namespace pflab {

int occ_total(const OccState& s) {
  int n = 0;
  for (auto& [m, c] : s) n += c;
  return n;
}

bool occ_less(const OccState& a, const OccState& b) {
  int na = occ_total(a), nb = occ_total(b);
  if (na != nb) return na < nb;
  // lexicographic on expanded tuples: equal modes with a larger run come
  // first (more copies of the smaller mode)
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first != b[j].first) return a[i].first < b[j].first;
    if (a[i].second != b[j].second) return a[i].second > b[j].second;
    ++i;
    ++j;
  }
  return false;  // equal
}

OccState occ_lower(const OccState& s, int mode) {
  OccState t;
  t.reserve(s.size());
  bool found = false;
  for (auto& [m, c] : s) {
    if (m == mode) {
      found = true;
      if (c > 1) t.emplace_back(m, c - 1);
    } else {
      t.emplace_back(m, c);
    }
  }
  if (!found) throw std::invalid_argument("occ_lower: mode not occupied");
  return t;
}

OccState occ_raise(const OccState& s, int mode) {
  OccState t;
  t.reserve(s.size() + 1);
  bool placed = false;
  for (auto& [m, c] : s) {
    if (m == mode) {
      t.emplace_back(m, c + 1);
      placed = true;
    } else {
      if (!placed && m > mode) {
        t.emplace_back(mode, 1);
        placed = true;
      }
      t.emplace_back(m, c);
    }
  }
  if (!placed) t.emplace_back(mode, 1);
  return t;
}

int occ_count(const OccState& s, int mode) {
  for (auto& [m, c] : s)
    if (m == mode) return c;
  return 0;
}

bool FockBasis::has_energy_cut() const {
  return e_max < std::numeric_limits<double>::infinity();
}

int FockBasis::index_of(const OccState& s) const {
  int n = occ_total(s);
  if (n > n_max) return -1;
  auto lo = states.begin() + sector_begin[n];
  auto hi = states.begin() + sector_begin[n + 1];
  auto it = std::lower_bound(lo, hi, s, occ_less);
  if (it == hi || *it != s) return -1;
  return int(it - states.begin());
}

FockBasis enumerate_basis(const VecR& mode_energy, int n_max, double e_max,
                          std::int64_t dim_cap) {
  if (n_max < 0) throw std::invalid_argument("enumerate_basis: n_max >= 0");
  for (Eigen::Index m = 0; m < mode_energy.size(); ++m)
    if (mode_energy[m] <= 0)
      throw std::invalid_argument("enumerate_basis: mode energies must be positive");

  FockBasis b;
  b.n_modes = int(mode_energy.size());
  b.n_max = n_max;
  b.e_max = e_max < 0 ? std::numeric_limits<double>::infinity() : e_max;
  b.mode_energy = mode_energy;

  // minimal energy among modes >= m, for pruning under the energy cut
  VecR suffix_min(b.n_modes + 1);
  suffix_min[b.n_modes] = std::numeric_limits<double>::infinity();
  for (int m = b.n_modes - 1; m >= 0; --m)
    suffix_min[m] = std::min(mode_energy[m], suffix_min[m + 1]);

  b.sector_begin.assign(n_max + 2, 0);
  OccState cur;
  std::int64_t count = 0;

  auto push = [&](const OccState& s) {
    if (++count > dim_cap)
      throw std::runtime_error("enumerate_basis: dimension cap exceeded (" +
                               std::to_string(dim_cap) + " states)");
    b.states.push_back(s);
  };

  std::function<void(int, int, double)> gen = [&](int n_left, int min_mode,
                                                  double e_left) {
    if (n_left == 0) {
      push(cur);
      return;
    }
    for (int m = min_mode; m < b.n_modes; ++m) {
      if (double(n_left) * suffix_min[m] > e_left) break;
      if (mode_energy[m] > e_left) continue;
      if (n_left > 1 &&
          mode_energy[m] + double(n_left - 1) * suffix_min[m] > e_left)
        continue;
      if (!cur.empty() && cur.back().first == m)
        ++cur.back().second;
      else
        cur.emplace_back(m, 1);
      gen(n_left - 1, m, e_left - mode_energy[m]);
      if (cur.back().second > 1)
        --cur.back().second;
      else
        cur.pop_back();
    }
  };

  for (int n = 0; n <= n_max; ++n) {
    b.sector_begin[n] = int(b.states.size());
    gen(n, 0, b.e_max);
  }
  b.sector_begin[n_max + 1] = int(b.states.size());

  b.energies.resize(b.size());
  for (int i = 0; i < b.size(); ++i) {
    double e = 0;
    for (auto& [m, c] : b.states[i]) e += c * mode_energy[m];
    b.energies[i] = e;
  }
  return b;
}

std::int64_t uncut_dimension(int n_modes, int n_max) {
  // sum_n C(n_modes + n - 1, n), computed incrementally
  std::int64_t total = 0, term = 1;
  for (int n = 0; n <= n_max; ++n) {
    total += term;
    term = term * (n_modes + n) / (n + 1);
  }
  return total;
}

VecR number_diag(const FockBasis& b) {
  VecR v(b.size());
  for (int i = 0; i < b.size(); ++i) v[i] = occ_total(b.states[i]);
  return v;
}

VecR dgamma_diag(const FockBasis& b, const VecR& v) {
  if (v.size() != b.n_modes)
    throw std::invalid_argument("dgamma_diag: per-mode vector size mismatch");
  VecR d = VecR::Zero(b.size());
  for (int i = 0; i < b.size(); ++i)
    for (auto& [m, c] : b.states[i]) d[i] += c * v[m];
  return d;
}

VecR vacuum_diag(const FockBasis& b) {
  VecR v = VecR::Zero(b.size());
  v[0] = 1.0;
  return v;
}

}  // namespace pflab
