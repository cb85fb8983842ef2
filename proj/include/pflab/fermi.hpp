#pragma once

#include "pflab/secondquant.hpp"

namespace pflab {

// Continuum description of the coupling, for analytic reference values:
// momentum-space radial profile per (i, j) eigenpair and channel. The
// polar Jacobian r^{(d-1)/2} and channel surface weights are applied by
// the evaluator, mirroring the grid assembly.
struct ContinuumFactor {
  int dim_k = 0;
  int n_ch = 1;
  int d = 3;
  std::vector<double> channel_weights;  // size n_ch
  // profile(i, j, ch) callable; empty std::function = zero
  std::vector<std::function<cd(double)>> profiles;  // (i + dim_k*j)*n_ch + ch

  const std::function<cd(double)>& at(int i, int j, int ch) const {
    return profiles[std::size_t(i + dim_k * j) * n_ch + ch];
  }
};

ContinuumFactor zero_continuum_factor(int dim_k, int n_ch, int d);

// Level-shift matrix at threshold i0 and resolution eps:
//   Lambda(eps) = eps * P phi(alpha) F_eps phi(alpha) P,
// positive semidefinite on Ran P by construction.
struct FgrMatrix {
  MatC lambda_matrix;  // mult x mult over the threshold eigenvectors
  double c1 = 0;       // max eigenvalue
  double c2 = 0;       // min eigenvalue
};
FgrMatrix fgr_matrix(const Model& m, int i0, double eps);

// eps -> 0 limit from the continuum profiles: matrix with entries
//   (pi/2) sum_{i: k_i < k_i0} (k_i0 - k_i)^{d-1}
//       sum_ch w_ch conj(f_{i,a}(gap)) f_{i,b}(gap)
// over threshold eigenindices a, b. The pi is the half-line Poisson
// mass, the 1/2 the field normalization. sum_empty marks the ground
// state (no lower level), where the matrix is identically zero.
struct FgrAnalytic {
  MatC lambda_matrix;
  double c1 = 0;
  double c2 = 0;
  bool sum_empty = false;
};
FgrAnalytic fgr_analytic(const AtomSpec& atom, int i0,
                         const ContinuumFactor& cf);

struct FgrRow {
  double eps;
  double c1;
  double c2;
  double rel_err;  // ||Lambda(eps) - Lambda_inf|| / ||Lambda_inf||, nan if empty
};
struct FgrReport {
  int i0 = 0;
  bool sum_empty = false;
  FgrAnalytic analytic;
  std::vector<FgrRow> rows;
};
FgrReport fgr_convergence(const Model& m, int i0, const ContinuumFactor& cf,
                          const std::vector<double>& eps_list);

// Joint (grid, eps) refinement against the analytic limit. Rows flag the
// invalid regime eps below a few grid spacings (discrete comb resolved);
// best_eps per grid locates the plateau between comb resolution and
// smoothing bias.
struct FgrGridRow {
  int n_r = 0;
  double h = 0;  // grid spacing
  double eps = 0;
  double rel_err = 0;
  bool eps_below_spacing = false;  // eps < 3h: outside the validity regime
};
struct FgrGridReport {
  std::vector<FgrGridRow> rows;
  std::vector<std::pair<int, double>> best_eps;  // per n_r: argmin rel_err
};
FgrGridReport fgr_joint_convergence(
    const std::function<Model(int)>& make_model, const std::vector<int>& n_rs,
    int i0, const ContinuumFactor& cf, const std::vector<double>& eps_list);

}  // namespace pflab
