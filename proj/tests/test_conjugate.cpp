#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pflab/conjugate.hpp"
#include "pflab/fermi.hpp"

using namespace pflab;

namespace {

Model smooth_model(int n_r, double r_max, int n_max, double lambda,
                   double amp = 1.0) {
  Model m;
  m.grid = make_grid(n_r, r_max);
  MatC K = MatC::Zero(2, 2);
  K(1, 1) = 1.0;
  m.atom = make_atom(K);
  VecR me(m.grid.modes());
  for (int mo = 0; mo < m.grid.modes(); ++mo)
    me[mo] = m.grid.nodes[m.grid.rindex(mo)];
  m.basis = enumerate_basis(me, n_max);
  m.alpha = zero_form_factor(2, m.grid.modes());
  VecC f(m.grid.modes());
  for (int mo = 0; mo < m.grid.modes(); ++mo) {
    double r = m.grid.nodes[m.grid.rindex(mo)];
    // d = 3 polar reduction of amp * r e^{-r}, weighted coordinates
    f[mo] = amp * r * std::exp(-r) * r *
            std::sqrt(m.grid.weights[m.grid.rindex(mo)]);
  }
  m.alpha.at(0, 1) = f;
  m.alpha.at(1, 0) = f;
  m.lambda = lambda;
  return m;
}

double mineig(const SpMat& a) { return heig_values(MatC(a)).minCoeff(); }

}  // namespace

TEST_CASE("smoothed threshold resolvent: diagonal values and rejection") {
  auto m = smooth_model(12, 4.0, 2, 0.1);
  CHECK_THROWS_AS(f_eps_diag(m, 1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(f_eps_diag(m, 1, -0.3), std::invalid_argument);
  double eps = 0.2;
  auto fd = f_eps_diag(m, 1, eps);
  auto h0 = h0_diag(m.atom, m.basis);
  auto tidx = threshold_indices(m.atom, m.basis, 1);
  for (int t : tidx) CHECK(fd[t] == 0.0);  // complement projection
  for (int i = 0; i < m.dim(); ++i) {
    if (std::find(tidx.begin(), tidx.end(), i) != tidx.end()) continue;
    double den = (h0[i] - 1.0) * (h0[i] - 1.0) + eps * eps;
    CHECK(fd[i] == doctest::Approx(1.0 / den).epsilon(1e-13));
    CHECK(fd[i] <= 1.0 / (eps * eps) + 1e-15);
  }
  // on the threshold block itself the smoothed resolvent has norm 1/eps
  for (int t : tidx)
    CHECK(1.0 / std::sqrt((h0[t] - 1.0) * (h0[t] - 1.0) + eps * eps) ==
          doctest::Approx(1.0 / eps).epsilon(1e-14));
}

TEST_CASE("threshold dressing is hermitian with rank at most 2 mult") {
  auto m = smooth_model(10, 4.0, 2, 0.1);
  auto b = build_b_eps(m, 1, 0.15);
  CHECK(b.hermitian);
  CHECK(max_hermiticity_defect(b.m) <= 1e-13);
  int mult = int(m.atom.level_indices(1).size());
  auto sv = MatC(b.m).jacobiSvd().singularValues();
  double top = sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-12 * top) ++rank;
  CHECK(rank <= 2 * mult);
}

TEST_CASE("assembled conjugate set: hermiticity and undressed limit") {
  auto m = smooth_model(10, 4.0, 2, 0.1);
  CHECK_THROWS_AS(build_conjugate(m, CutoffIndex::finite(2.0), 0.0, 0.1, 1),
                  std::invalid_argument);
  auto c = build_conjugate(m, CutoffIndex::finite(2.0), 0.3, 0.15, 1);
  for (const SparseOp* op : {&c.A, &c.M, &c.S, &c.B, &c.A_hat, &c.S_hat}) {
    CHECK(op->hermitian);
    CHECK(max_hermiticity_defect(op->m) <= 1e-12);
  }
  auto plain = build_conjugate(m, CutoffIndex::finite(2.0), 0.0, 0.0, -1);
  CHECK(MatC(plain.B.m).cwiseAbs().maxCoeff() == 0.0);
  CHECK(MatC(plain.A_hat.m - plain.A.m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("positive parts increase with the cutoff index up to N + vacuum") {
  auto m = smooth_model(6, 3.0, 2, 0.1);
  auto c1 = build_conjugate(m, CutoffIndex::finite(1.0), 0.0, 0.0, -1);
  auto c2 = build_conjugate(m, CutoffIndex::finite(2.0), 0.0, 0.0, -1);
  auto c4 = build_conjugate(m, CutoffIndex::finite(4.0), 0.0, 0.0, -1);
  auto cinf = build_conjugate(m, CutoffIndex::inf(), 0.0, 0.0, -1);
  CHECK(mineig(SpMat(c2.M.m - c1.M.m)) >= -1e-12);
  CHECK(mineig(SpMat(c4.M.m - c2.M.m)) >= -1e-12);
  CHECK(mineig(SpMat(cinf.M.m - c4.M.m)) >= -1e-12);
  // the limit is N + P_Omega, bounded below by the identity
  int dim = m.dim();
  SpMat eye(dim, dim);
  eye.setIdentity();
  CHECK(mineig(SpMat(cinf.M.m - eye)) >= -1e-12);
  auto nf = number_full(m.atom, m.basis);
  auto pv = vacuum_proj_full(m.atom, m.basis);
  CHECK(MatC(cinf.M.m - nf.m - pv.m).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("algebraic m-source makes the decomposition exact to rounding") {
  auto m = smooth_model(14, 4.0, 2, 0.2);
  auto c = build_conjugate(m, CutoffIndex::finite(2.0), 0.2, 0.2, 1,
                           MSource::algebraic);
  auto rep = decomposition_residual(m, c, 4);
  CHECK(rep.subspace_dim > 0);
  CHECK(rep.restricted <= 1e-12);
  CHECK(rep.full_est <= 1e-10);
}

TEST_CASE("default m-source defect shrinks at second order in the spacing") {
  std::vector<double> hs, es;
  for (int n_r : {100, 200, 400}) {
    auto m = smooth_model(n_r, 6.0, 1, 0.2);
    auto c = build_conjugate(m, CutoffIndex::finite(2.0), 0.1, 0.3, 1);
    auto rep = decomposition_residual(m, c, 6);
    hs.push_back(std::log(6.0 / n_r));
    es.push_back(std::log(rep.restricted));
  }
  auto [a0, slope] = linfit(hs, es);
  (void)a0;
  CHECK(slope >= 1.7);
}

TEST_CASE("threshold block of the dressing commutator is the level-shift matrix") {
  auto m = smooth_model(16, 5.0, 2, 0.1);
  double eps = 0.25;
  auto b = build_b_eps(m, 1, eps);
  auto phi = field(m.atom, m.basis, m.alpha);
  auto comm = commutator_i(phi, b);
  auto fm = fgr_matrix(m, 1, eps);
  auto tidx = threshold_indices(m.atom, m.basis, 1);
  REQUIRE(int(tidx.size()) == fm.lambda_matrix.rows());
  for (int a = 0; a < int(tidx.size()); ++a)
    for (int bb = 0; bb < int(tidx.size()); ++bb) {
      cd got = comm.m.coeff(tidx[a], tidx[bb]);
      cd want = fm.lambda_matrix(a, bb) / eps;
      CHECK(std::abs(got - want) <= 1e-12 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("dressing terms diverge at the documented epsilon powers") {
  auto m = smooth_model(300, 6.0, 1, 0.1);
  auto rep = commutator_size_report(m, 1, {0.4, 0.2, 0.1, 0.05});
  REQUIRE(rep.rows.size() == 4);
  for (const auto& r : rep.rows) {
    CHECK(r.free_term > 0.0);
    CHECK(r.field_term > 0.0);
  }
  CHECK(rep.slope_free >= -0.6);   // no worse than eps^{-1/2}
  CHECK(rep.slope_free <= -0.1);   // and genuinely divergent
  CHECK(rep.slope_field >= -1.6);  // no worse than eps^{-3/2}
  CHECK(rep.slope_field <= rep.slope_free - 0.5);
}

TEST_CASE("remainder is relatively bounded by the free energy") {
  auto m = smooth_model(12, 4.0, 2, 0.3);
  auto c = build_conjugate(m, CutoffIndex::finite(2.0), 0.0, 0.0, -1);
  auto h0 = h0_diag(m.atom, m.basis);
  Rng rng(13);
  double cmax = 0;
  for (int rep = 0; rep < 8; ++rep) {
    VecC u = rng.cgauss_vec(m.dim());
    u /= u.norm();
    VecC h0u = h0.cast<cd>().asDiagonal() * u;
    cmax = std::max(cmax, (c.S.m * u).norm() / (h0u.norm() + 1.0));
  }
  CHECK(cmax > 0.0);
  CHECK(cmax < 1e3);
}
