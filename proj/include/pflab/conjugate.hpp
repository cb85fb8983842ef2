#pragma once

#include "pflab/onebody.hpp"
#include "pflab/secondquant.hpp"

namespace pflab {

// Assembled conjugate-operator data at one parameter point.
//   A_n = dGamma(a_n),           a_n = (i/2)(m_n D + D m_n)
//   M_n = dGamma(m_n) + P_Omega  (positive part)
//   S_n = -lambda phi(i a_n alpha) - P_Omega
// so that [H_lambda, i A_n] = M_n + S_n up to the one-body finite
// difference defect. With the threshold dressing B_eps:
//   A_hat = A_n + lambda theta B_eps,  S_hat = S_n + [H, i lambda theta B_eps].
// m_source algebraic replaces the function m_n by the matrix [omega, i a_n],
// which makes the free part of the decomposition exact to rounding.
enum class MSource { function, algebraic };

struct ConjugateSet {
  CutoffIndex n;
  double lambda = 0;
  double theta = 0;
  double eps = 0;
  int i0 = -1;  // <0: no threshold dressing (B_eps = 0)
  MSource msource = MSource::function;

  SparseOp A;      // dGamma(a_n), lifted
  SparseOp M;      // positive part
  SparseOp S;      // remainder part
  SparseOp B;      // threshold dressing B_eps (zero op when i0 < 0)
  SparseOp A_hat;  // A + lambda theta B
  SparseOp S_hat;  // S + [H, i lambda theta B]
};

// F_eps = Pbar ((H0 - k_i0)^2 + eps^2)^{-1} Pbar as a diagonal.
VecR f_eps_diag(const Model& m, int i0, double eps);

// B_eps = Im(F_eps phi(alpha) P), rank <= 2 * mult(k_i0).
SparseOp build_b_eps(const Model& m, int i0, double eps);

ConjugateSet build_conjugate(const Model& m, CutoffIndex n, double theta,
                             double eps, int i0,
                             MSource msource = MSource::function);

// Defect Delta = [H, i A_hat] - (M + S_hat), measured two ways:
//  - sigma_max of Delta restricted to a smooth-support test subspace
//    (products of plateau bumps over sectors <= max(1, N_max - 1),
//    margin under any energy cut; one-boson bumps are exact tests even
//    at depth 1 because the field-term mismatch cancels in the
//    truncated algebra),
//  - a power-iteration estimate of the unrestricted norm.
struct ResidualReport {
  double restricted = 0;
  double full_est = 0;
  int subspace_dim = 0;
};
ResidualReport decomposition_residual(const Model& m, const ConjugateSet& c,
                                      int bumps_per_sector = 6);

// Orthonormal basis of the smooth test subspace used above.
MatC smooth_test_subspace(const Model& m, int bumps_per_sector);

// epsilon-power study of the two dressing commutator terms on a fixed
// model: ||W [H0, iB_eps] W|| ~ eps^{-1/2} and
// ||W [phi(alpha), iB_eps] W|| ~ eps^{-3/2}, W = (N+1)^{-1/2}.
struct SizeRow {
  double eps;
  double free_term;
  double field_term;
};
struct SizeReport {
  std::vector<SizeRow> rows;
  double slope_free = 0;   // log-log fit, expected about -0.5
  double slope_field = 0;  // expected about -1.5
};
SizeReport commutator_size_report(const Model& m, int i0,
                                  const std::vector<double>& eps_list);

}  // namespace pflab
