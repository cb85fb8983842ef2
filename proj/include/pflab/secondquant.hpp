#pragma once

#include "pflab/fock.hpp"
#include "pflab/grid.hpp"

namespace pflab {

// Finite-level system. Input K is any Hermitian matrix; everything
// downstream works in its eigenbasis, so H0 is exactly diagonal.
struct AtomSpec {
  MatC K_input;
  VecR k;       // eigenvalues ascending
  MatC evecs;   // columns, K_input = evecs * diag(k) * evecs^*
  std::vector<double> levels;     // distinct eigenvalues (thresholds k_i)
  std::vector<int> level_of;      // eigenindex -> threshold index

  int dim() const { return int(k.size()); }
  int n_levels() const { return int(levels.size()); }
  std::vector<int> level_indices(int i0) const;  // eigenindices at level i0
};

AtomSpec make_atom(const MatC& K, double degeneracy_tol = 1e-10);

// Coupling form factor alpha: K -> K (x) h, stored as the dim_K x dim_K
// array of one-particle coefficient vectors f_{i,j} in the K-eigenbasis.
// Coefficients live in the weighted (polar, sqrt-quadrature) coordinates,
// so Euclidean inner products are L^2 ones.
struct FormFactor {
  int dim_k = 0;
  int modes = 0;
  std::vector<VecC> f;  // dim_k * dim_k entries, (i, j) at i + dim_k * j

  const VecC& at(int i, int j) const { return f[i + dim_k * j]; }
  VecC& at(int i, int j) { return f[i + dim_k * j]; }
  bool zero(int i, int j) const { return f[i + dim_k * j].size() == 0; }

  // stacked matrix of the operator K -> K (x) h (rows: mode-major blocks
  // of size dim_k), for operator norms
  MatC stacked() const;
  double norm() const;                       // operator norm ||alpha||
  double weighted_norm(const VecR& wm) const;  // ||diag(wm) alpha||, per-mode weights

  FormFactor apply_onebody(const SpMat& op) const;
  FormFactor scaled(cd s) const;
};

FormFactor zero_form_factor(int dim_k, int modes);
// scalar coupling: f_{ij} = delta_{ij} v (the commuting / van Hove shape)
FormFactor scalar_form_factor(int dim_k, const VecC& v);

// Full model data: atom (x) truncated Fock over the grid modes.
struct Model {
  RadialGrid grid;
  AtomSpec atom;
  FockBasis basis;
  FormFactor alpha;
  double lambda = 0;

  int dim() const { return atom.dim() * basis.size(); }
  int gidx(int atom_i, int state) const { return atom_i + atom.dim() * state; }
};

// --- second-quantized assembly (all SparseOp on dim_K * n_states) ---

// a(alpha): <e_j (x) (s - e_m) | a | e_i (x) s> = conj(f_{ij}[m]) sqrt(s_m).
// Truncation contract: creation amplitudes leaving the basis (top sector
// or energy cut) are dropped; creation stays the exact adjoint.
SparseOp annihilation(const AtomSpec& atom, const FockBasis& b, const FormFactor& ff);
SparseOp creation(const AtomSpec& atom, const FockBasis& b, const FormFactor& ff);
SparseOp field(const AtomSpec& atom, const FockBasis& b, const FormFactor& ff);

VecR h0_diag(const AtomSpec& atom, const FockBasis& b);
SparseOp hamiltonian(const Model& m);

SparseOp number_full(const AtomSpec& atom, const FockBasis& b);
SparseOp vacuum_proj_full(const AtomSpec& atom, const FockBasis& b);  // 1 (x) P_Omega
// threshold projector P = P_{k_{i0}} (x) P_Omega; also exposed as the
// list of product-basis indices it selects
std::vector<int> threshold_indices(const AtomSpec& atom, const FockBasis& b, int i0);
SparseOp threshold_proj(const AtomSpec& atom, const FockBasis& b, int i0);

// lift a Fock-space operator (or a diagonal) to the product space
SparseOp lift_fock(const AtomSpec& atom, const SparseOp& fock_op);
SparseOp lift_fock_diag(const AtomSpec& atom, const VecR& diag);

// dGamma of a general one-body operator, exact per sector within the
// truncated basis.
SparseOp dgamma_full(const FockBasis& b, const SparseOp& onebody);

// Gamma(q) second-quantized contraction via sector permanents. Dense per
// sector; guarded by a size cap (meant for small verification spaces).
SparseOp gamma_contraction(const FockBasis& b, const MatC& q, int state_cap = 3000);

// Field-bound check: ratio ||phi(beta) Phi||^2 against
// C1 ||Phi||^2 + 2 ||omega^{-1/2} beta||^2 <Phi, dGamma(omega) Phi>
// for C1 in {||beta||, ||beta||^2}, sampled over random states.
struct NtCheck {
  double beta_norm = 0;
  double beta_wnorm = 0;  // ||omega^{-1/2} beta||
  double max_ratio_c1_norm = 0;    // C1 = ||beta||
  double max_ratio_c1_normsq = 0;  // C1 = ||beta||^2
  int samples = 0;
  std::uint64_t seed = 0;
};
NtCheck nt_estimate_check(const Model& m, const FormFactor& beta,
                          int samples, std::uint64_t seed);

}  // namespace pflab
