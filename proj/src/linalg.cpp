#include "pflab/linalg.hpp"

#include <lapacke.h>

#include <cmath>
#include <stdexcept>

namespace pflab {

SparseOp make_diag(const VecR& d) {
  SpMat m(d.size(), d.size());
  m.reserve(Eigen::VectorXi::Constant(d.size(), 1));
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d[i] != 0.0) m.insert(i, i) = d[i];
  m.makeCompressed();
  return {std::move(m), true};
}

SparseOp make_diag(const VecC& d) {
  SpMat m(d.size(), d.size());
  m.reserve(Eigen::VectorXi::Constant(d.size(), 1));
  bool herm = true;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (d[i] != cd(0, 0)) m.insert(i, i) = d[i];
    if (d[i].imag() != 0.0) herm = false;
  }
  m.makeCompressed();
  return {std::move(m), herm};
}

SparseOp commutator_i(const SparseOp& H, const SparseOp& A) {
  if (H.dim() != A.dim())
    throw std::invalid_argument("commutator_i: dimension mismatch");
  SpMat c = cd(0, 1) * (H.m * A.m - A.m * H.m).eval();
  c.prune(cd(0, 0));
  c.makeCompressed();
  return {std::move(c), H.hermitian && A.hermitian};
}

SparseOp add(const SparseOp& a, const SparseOp& b) {
  SpMat s = a.m + b.m;
  s.makeCompressed();
  return {std::move(s), a.hermitian && b.hermitian};
}

SparseOp scale(cd s, const SparseOp& a) {
  SpMat m = s * a.m;
  bool herm = a.hermitian && s.imag() == 0.0;
  return {std::move(m), herm};
}

SparseOp adjoint(const SparseOp& a) {
  SpMat m = a.m.adjoint();
  m.makeCompressed();
  return {std::move(m), a.hermitian};
}

double max_hermiticity_defect(const SpMat& m) {
  SpMat d = SpMat(m.adjoint()) - m;
  double mx = 0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (SpMat::InnerIterator it(d, k); it; ++it)
      mx = std::max(mx, std::abs(it.value()));
  return mx;
}

double opnorm_est(const SpMat& a, int iters, std::uint64_t seed) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  Rng rng(seed);
  VecC v = rng.cgauss_vec(a.cols());
  v.normalize();
  double s = 0;
  for (int k = 0; k < iters; ++k) {
    VecC w = a.adjoint() * (a * v).eval();
    double n = w.norm();
    if (n == 0) return 0.0;
    v = w / n;
    s = std::sqrt(n);
  }
  return s;
}

double opnorm_est_herm(const std::function<VecC(const VecC&)>& apply,
                       Eigen::Index dim, int iters, std::uint64_t seed) {
  Rng rng(seed);
  VecC v = rng.cgauss_vec(dim);
  v.normalize();
  double lam = 0;
  for (int k = 0; k < iters; ++k) {
    VecC w = apply(v);
    lam = w.norm();
    if (lam == 0) return 0.0;
    v = w / lam;
  }
  return lam;
}

VecC lanczos_fn_apply(const SpMat& H, const VecC& v,
                      const std::function<double(double)>& f, int m) {
  Eigen::Index n = H.rows();
  m = int(std::min<Eigen::Index>(m, n));
  double vnorm = v.norm();
  if (vnorm == 0) return VecC::Zero(n);

  MatC V(n, m);
  std::vector<double> alpha, beta;
  V.col(0) = v / vnorm;
  int kk = m;
  for (int k = 0; k < m; ++k) {
    VecC w = H * V.col(k);
    double a = V.col(k).dot(w).real();
    alpha.push_back(a);
    w -= a * V.col(k);
    if (k > 0) w -= beta[k - 1] * V.col(k - 1);
    // full reorthogonalization, twice for safety
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j <= k; ++j) w -= (V.col(j).dot(w)) * V.col(j);
    double b = w.norm();
    if (k + 1 == m) break;
    if (b < 1e-13 * vnorm) {
      kk = k + 1;
      break;
    }
    beta.push_back(b);
    V.col(k + 1) = w / b;
  }
  MatR T = MatR::Zero(kk, kk);
  for (int i = 0; i < kk; ++i) {
    T(i, i) = alpha[i];
    if (i + 1 < kk) T(i, i + 1) = T(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<MatR> es(T);
  VecR fe(kk);
  for (int i = 0; i < kk; ++i) fe[i] = f(es.eigenvalues()[i]);
  VecR e0 = VecR::Zero(kk);
  e0[0] = 1.0;
  VecR y = es.eigenvectors() * (fe.asDiagonal() * (es.eigenvectors().transpose() * e0));
  return vnorm * (V.leftCols(kk) * y.cast<cd>());
}

std::pair<double, double> dense_eig_range(const MatC& h) {
  Eigen::SelfAdjointEigenSolver<MatC> es(h, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev[0], ev[ev.size() - 1]};
}

void heig(const MatC& h, VecR& evals, MatC& evecs) {
  lapack_int n = lapack_int(h.rows());
  if (h.cols() != n) throw std::invalid_argument("heig: square matrix required");
  evecs = h;
  evals.resize(n);
  if (n == 0) return;
  lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'V', 'L', n,
      reinterpret_cast<lapack_complex_double*>(evecs.data()), n, evals.data());
  if (info != 0)
    throw std::runtime_error("zheevd failed, info=" + std::to_string(info));
}

VecR heig_values(const MatC& h) {
  lapack_int n = lapack_int(h.rows());
  if (h.cols() != n)
    throw std::invalid_argument("heig_values: square matrix required");
  MatC work = h;
  VecR evals(n);
  if (n == 0) return evals;
  lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'N', 'L', n,
      reinterpret_cast<lapack_complex_double*>(work.data()), n, evals.data());
  if (info != 0)
    throw std::runtime_error("zheevd failed, info=" + std::to_string(info));
  return evals;
}

}  // namespace pflab
