#pragma once

#include <functional>

#include <Eigen/Sparse>

#include "pflab/util.hpp"

namespace pflab {

using SpMat = Eigen::SparseMatrix<cd>;
using Triplet = Eigen::Triplet<cd>;

// Sparse operator with a tracked hermiticity flag. The flag is an
// assembly-time promise, verified in tests rather than on every product.
struct SparseOp {
  SpMat m;
  bool hermitian = false;

  SparseOp() = default;
  SparseOp(SpMat mm, bool h) : m(std::move(mm)), hermitian(h) {}
  Eigen::Index dim() const { return m.rows(); }
};

SparseOp make_diag(const VecR& d);
SparseOp make_diag(const VecC& d);

// [H, iA] = i(HA - AH). Hermitian whenever H and A both are.
SparseOp commutator_i(const SparseOp& H, const SparseOp& A);

SparseOp add(const SparseOp& a, const SparseOp& b);
SparseOp scale(cd s, const SparseOp& a);
SparseOp adjoint(const SparseOp& a);

double max_hermiticity_defect(const SpMat& m);

// Largest singular value by power iteration on A^* A; deterministic for a
// fixed seed. Relative accuracy ~1e-6 is plenty for the residual reports.
double opnorm_est(const SpMat& a, int iters = 120, std::uint64_t seed = 99);

// Largest |eigenvalue| of a Hermitian operator given as a matvec.
double opnorm_est_herm(
    const std::function<VecC(const VecC&)>& apply, Eigen::Index dim,
    int iters = 200, std::uint64_t seed = 99);

// f(H) v for Hermitian H via Lanczos with full reorthogonalization.
// Used for <H>^{-1} = (1+H^2)^{-1/2} in the complement-corrected scans.
VecC lanczos_fn_apply(const SpMat& H, const VecC& v,
                      const std::function<double(double)>& f, int m = 160);

// min/max eigenvalue of a small dense Hermitian matrix.
std::pair<double, double> dense_eig_range(const MatC& h);

// Eigendecomposition of a dense Hermitian matrix (LAPACK zheevd).
// Values ascending, vectors in columns.
void heig(const MatC& h, VecR& evals, MatC& evecs);

// Eigenvalues only (ascending).
VecR heig_values(const MatC& h);

}  // namespace pflab
