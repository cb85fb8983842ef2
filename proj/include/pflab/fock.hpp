#pragma once

#include <cstdint>
#include <vector>

#include "pflab/linalg.hpp"

namespace pflab {

// Occupation state: run-length pairs (mode, count), modes strictly
// increasing, counts >= 1. The vacuum is the empty vector.
using OccState = std::vector<std::pair<int, int>>;

int occ_total(const OccState& s);
// order: by particle number, then lexicographically on the expanded
// nondecreasing mode tuple
bool occ_less(const OccState& a, const OccState& b);

OccState occ_lower(const OccState& s, int mode);   // count(mode) must be >= 1
OccState occ_raise(const OccState& s, int mode);
int occ_count(const OccState& s, int mode);

// Truncated bosonic occupation basis over a fixed list of mode energies.
// States are graded by particle number and lexicographic within each
// sector; the vacuum sits at index 0.
struct FockBasis {
  int n_modes = 0;
  int n_max = 0;
  double e_max = 0;  // infinity when no energy cut
  VecR mode_energy;
  std::vector<OccState> states;
  std::vector<int> sector_begin;  // size n_max + 2; sector n = [begin[n], begin[n+1])
  VecR energies;                  // dGamma(omega) eigenvalue per state

  int size() const { return int(states.size()); }
  int index_of(const OccState& s) const;  // -1 when not in basis
  bool has_energy_cut() const;
};

FockBasis enumerate_basis(const VecR& mode_energy, int n_max,
                          double e_max = -1.0,  // <0: no cut
                          std::int64_t dim_cap = 5'000'000);

// Stars-and-bars count for the uncut basis, for the documented dimension
// formula sum_n C(n_modes + n - 1, n).
std::int64_t uncut_dimension(int n_modes, int n_max);

VecR number_diag(const FockBasis& b);

// dGamma of a multiplication operator with per-mode values v:
// diagonal with entries sum_m count_m * v_m.
VecR dgamma_diag(const FockBasis& b, const VecR& v);

// Vacuum projector diagonal (1 at index 0).
VecR vacuum_diag(const FockBasis& b);

}  // namespace pflab
