#pragma once

#include "pflab/secondquant.hpp"

namespace pflab {

// Reference operators assembled on raw tensor powers (C^d)^{(x)n} with an
// explicit symmetrizer and intertwiner, sharing no occupation combinatorics
// with the production assembly. Dense, meant for small verification spaces.

// intertwiner column: occupation state -> normalized symmetric tensor
VecC sym_embed(const OccState& s, int d);

// a(alpha), a*(alpha), phi(alpha) on atom (x) Fock, computed by tensor
// contraction against the embedded basis states.
MatC oracle_annihilation(const AtomSpec& atom, const FockBasis& b,
                         const FormFactor& ff);
MatC oracle_creation(const AtomSpec& atom, const FockBasis& b,
                     const FormFactor& ff);
MatC oracle_field(const AtomSpec& atom, const FockBasis& b,
                  const FormFactor& ff);

// dGamma(B) and Gamma(Q) on the Fock factor alone (B, Q dense one-body).
MatC oracle_dgamma(const FockBasis& b, const MatC& onebody);
MatC oracle_gamma(const FockBasis& b, const MatC& q);

MatC oracle_hamiltonian(const Model& m);

// commuting (multiplication-operator) coupling: every eigenvalue shifts by
// -lambda^2 ||omega^{-1/2} v||^2 / 2 and nothing broadens
double oracle_vanhove_shift(double lambda, const VecC& v, const VecR& omega);

// second-order perturbation theory for the eigenvalue branch starting at
// atom eigenindex i (vacuum sector), from the raw form factor:
//   shift coefficient e2(i) = (1/2) sum_{j,m} |f_{ji}[m]|^2 / (k_i - k_j - omega_m)
//   width = 2 lambda^2 * (eps/2) sum |f|^2 / (den^2 + eps^2), the smoothed
//   golden-rule sum at resolution eps (direct summation, no operator assembly)
struct SecondOrder {
  double shift_coeff = 0;  // multiply by lambda^2 for the shift
  double width = 0;
  double eps = 0;
};
SecondOrder oracle_second_order(const Model& m, int atom_eigindex, double eps);

double max_abs_diff(const MatC& a, const SpMat& b);

}  // namespace pflab
