#pragma once

#include <optional>
#include <string>

#include "pflab/conjugate.hpp"
#include "pflab/fermi.hpp"

namespace pflab {

struct EigenResult {
  VecR values;      // ascending
  MatC vectors;     // columns
  VecR residuals;   // ||H v - lambda v||
  bool dense_path = true;
};

// Full dense Hermitian diagonalization (LAPACK), guarded by a size cap.
EigenResult eig_dense(const SparseOp& H, int dim_cap = 8000);

// Eigenpairs in [lo, hi] by shift-invert Lanczos with full
// reorthogonalization; inner solves by diagonally preconditioned MINRES.
// Degenerate clusters are recovered by deflated restarts.
struct WindowOpts {
  double tol = 1e-9;          // residual tolerance * spectral scale
  int max_lanczos = 260;      // Krylov size per pass
  int max_passes = 8;
  int minres_maxit = 30000;
  double minres_tol = 1e-12;
  std::uint64_t seed = 1234;
};
EigenResult eig_window(const SparseOp& H, double lo, double hi,
                       const WindowOpts& opts = {});

// Orthonormal columns spanning Ran E_I(H); dense under the cap, windowed
// Lanczos above it.
MatC spectral_projector_basis(const SparseOp& H, double lo, double hi,
                              int dense_cap = 2600,
                              const WindowOpts& opts = {});

// MINRES for (A - sigma) x = b, A Hermitian, with an SPD diagonal
// preconditioner. Throws on non-convergence (message carries the trace).
VecC minres_shifted(const SpMat& A, double sigma, const VecC& b,
                    const VecR& precond_diag, double tol, int maxit);

// Feshbach-Schur complement onto the span of the orthonormal columns V:
//   G(z) = z I_vv - H_vv - H_vv' (z I_v'v' - H_v'v')^{-1} H_v'v.
// min_singular is sigma_min(G), the membership indicator for z in the
// spectrum of H.
struct FeshbachResult {
  MatC G;
  double min_singular;
};
FeshbachResult feshbach(const MatC& H, const MatC& V, cd z);

// ---- scans ----

struct MourreParams {
  double lo = 0, hi = 0;  // interval I
  std::vector<double> lambdas;
  double theta_exp = 1.0 / 3.0;
  double theta_scale = 1.0;
  double eps_exp = 2.0 / 3.0;
  double eps_scale = 1.0;
  double eta = 1.0;
  CutoffIndex n = CutoffIndex::inf();
  MSource msource = MSource::function;
  int dense_cap = 2600;
  WindowOpts window;
};

struct MourreRow {
  double lambda, eps, theta, c2, mineig, bound;
  bool pass;
  // size diagnostics for the small part of S_hat (vacuum projector
  // removed; it only cancels the one inside M)
  double mineig_j0;      // ... compressed by E_J(H0), else nan
  double mineig_i_shat;  // ... compressed by E_I(H_lambda)
  int dim_i;             // dim Ran E_I(H_lambda)
  bool size_ok;          // lambda/eps, eps/theta, theta all < 1
};

struct MourreReport {
  bool threshold_mode = false;
  int i0 = -1;
  double lo = 0, hi = 0, eta = 1;
  double away_c = 0;  // fitted C in 1 - C lambda (away mode)
  bool schedule_ok = true;  // ratios decrease toward 0 along the schedule
  std::string schedule_note;
  std::vector<MourreRow> rows;
};

// proto.lambda is ignored; the schedule drives it.
MourreReport mourre_scan(const Model& proto, const MourreParams& p);

// ---- virial ----

struct VirialRow {
  double eigenvalue;
  double v1;       // |<u, [H, i A_hat] u>|
  double v2;       // |<u, (M + S_hat) u>|
  double delta_u;  // ||([H,iA_hat] - M - S_hat) u||, rigorous bound for v2
};
std::vector<VirialRow> virial_check(const Model& m, const ConjugateSet& c,
                                    int max_vectors = -1, int dim_cap = 4000);

// ---- limiting absorption ----

enum class LapWeight { dirichlet_sqrt, none };

struct LapParams {
  double s = 0.8;
  LapWeight variant = LapWeight::dirichlet_sqrt;
  std::vector<double> xs;
  std::vector<double> ys;
  int power_iters = 40;
  int dense_cap = 4000;
};

struct LapRow {
  double x, y, w_norm, u_norm;
};

struct LapReport {
  double s = 0;
  std::string variant;
  double median_gap = 0;      // level spacing near the x-window
  double holder_exponent = 0; // modulus-of-continuity fit of x -> w_norm
  double holder_y = 0;        // the y (nearest 10*median_gap) used for the fit
  std::vector<LapRow> rows;
};

LapReport lap_scan(const Model& m, const LapParams& p);

// ---- resonance width ----

struct WidthParams {
  int i0 = 1;
  std::vector<double> ys;
  int scan_points = 81;
  double window_widths = 10.0;
};

struct WidthResult {
  double x0 = 0;
  double gamma_fit = 0;   // full width, Poisson broadening removed
  double quality = 0;     // 1 - relative rms residual of the fit
  double gamma_theory = 0;  // 2 lambda^2 c2(eps at the resolution scale)
};

WidthResult resonance_width(const Model& m, const WidthParams& p);

// f(H) for dense Hermitian H.
MatC dense_matrix_function(const MatC& H, const std::function<double(double)>& f);

// median spacing of sorted values within [lo, hi]
double median_gap(const VecR& values, double lo, double hi);

}  // namespace pflab
