#pragma once

#include "pflab/cutoff.hpp"
#include "pflab/grid.hpp"
#include "pflab/linalg.hpp"

namespace pflab {

// Multiplication operator by f(r), diagonal in the grid coordinates.
SparseOp mult_op(const RadialGrid& g, const std::function<double(double)>& f);

// Boson dispersion omega = multiplication by r.
SparseOp omega_op(const RadialGrid& g);

// Antisymmetrized first-derivative matrix acting on weighted coefficient
// vectors: exactly D = -D^T. Uniform grids get the banded central
// difference; general grids an antisymmetrized 3-point divided difference
// conjugated by sqrt(weight).
SparseOp derivative_op(const RadialGrid& g);

// Conjugate-operator generator on one particle:
//   a_n = (i/2)(m_n(r) D + D m_n(r)),  a_inf = i D.
// Hermitian by construction (exactly, including boundary rows).
SparseOp generator_a(const RadialGrid& g, CutoffIndex n);

// Flow of the cutoff field: solves d/dt phi = m_n(phi), phi(0) = r0,
// together with the spatial derivative J = phi' (variational equation).
// Adaptive RK with per-step tolerance 1e-12; t of either sign.
struct FlowResult {
  VecR phi;
  VecR jac;
};
FlowResult flow_map(CutoffIndex n, double t, const VecR& r0);

// Discrete transplantation isometry for t >= 0:
//   (W u)(r) = 1_{Omega}(r) sqrt(phi'_{-t}(r)) u(phi_{-t}(r)),
// with cubic interpolation at flowed points and zero extension outside
// the grid. Throws on t < 0 (the continuum operator is an isometry only
// for forward times; use adjoint(W) for the reverse direction).
SparseOp isometry_w(const RadialGrid& g, CutoffIndex n, double t);

// The adjoint transplantation assembled directly from the forward flow,
//   (W* u)(r) = 1_{(0,inf)}(r) sqrt(phi'_{t}(r)) u(phi_t(r)),
// for cross-checking adjoint(isometry_w) against the explicit formula.
SparseOp isometry_w_adjoint(const RadialGrid& g, CutoffIndex n, double t);

// Square root of the Dirichlet Laplacian on (0, r_max), dense, built from
// the eigendecomposition of the standard second-difference matrix.
// Uniform grids only.
struct DirichletSqrt {
  VecR evals;   // eigenvalues of -Laplacian, ascending
  MatR evecs;   // sine eigenvectors, columns
  MatR sqrt_b;  // the operator matrix (one channel, n_r x n_r)
};
DirichletSqrt dirichlet_sqrt_laplacian(const RadialGrid& g);
SparseOp dirichlet_sqrt_op(const RadialGrid& g);

// Multiplication weight (1 + r^2)^{1/2}.
SparseOp weight_b(const RadialGrid& g);

}  // namespace pflab
