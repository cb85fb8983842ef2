#include "pflab/onebody.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace pflab {

SparseOp mult_op(const RadialGrid& g, const std::function<double(double)>& f) {
  return make_diag(g.sample(f));
}

SparseOp omega_op(const RadialGrid& g) {
  return mult_op(g, [](double r) { return r; });
}

namespace {

// Raw 3-point divided-difference derivative (one channel, unweighted
// coordinates). Second-order accurate in the interior.
MatR divided_diff(const RadialGrid& g) {
  int n = g.n_r;
  MatR d = MatR::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    if (j == 0 || j == n - 1) {
      // one-sided 2-point at the ends; the antisymmetrization and the
      // compact-support test convention make the boundary rows harmless
      int k = j == 0 ? 0 : n - 2;
      double h = g.nodes[k + 1] - g.nodes[k];
      d(j, k) = -1.0 / h;
      d(j, k + 1) = 1.0 / h;
    } else {
      double hm = g.nodes[j] - g.nodes[j - 1];
      double hp = g.nodes[j + 1] - g.nodes[j];
      d(j, j - 1) = -hp / (hm * (hm + hp));
      d(j, j) = (hp - hm) / (hm * hp);
      d(j, j + 1) = hm / (hp * (hm + hp));
    }
  }
  return d;
}

}  // namespace

SparseOp derivative_op(const RadialGrid& g) {
  int n = g.n_r;
  std::vector<Triplet> trips;

  if (g.rule == QuadRule::midpoint) {
    double h = g.r_max / g.n_r;
    for (int c = 0; c < g.n_ch; ++c) {
      int off = n * c;
      for (int j = 0; j + 1 < n; ++j) {
        trips.emplace_back(off + j, off + j + 1, cd(1.0 / (2 * h), 0));
        trips.emplace_back(off + j + 1, off + j, cd(-1.0 / (2 * h), 0));
      }
    }
  } else {
    MatR raw = divided_diff(g);
    VecR sw = g.weights.cwiseSqrt();
    MatR wd = sw.asDiagonal() * raw * sw.cwiseInverse().asDiagonal();
    MatR anti = 0.5 * (wd - wd.transpose());
    for (int c = 0; c < g.n_ch; ++c) {
      int off = n * c;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          if (anti(j, k) != 0.0)
            trips.emplace_back(off + j, off + k, cd(anti(j, k), 0));
    }
  }

  SpMat m(g.modes(), g.modes());
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return {std::move(m), false};
}

SparseOp generator_a(const RadialGrid& g, CutoffIndex n) {
  SparseOp d = derivative_op(g);
  VecR m = g.sample([&](double r) { return m_field(n, r); });
  SpMat md = m.cast<cd>().asDiagonal() * d.m;
  SpMat dm = d.m * m.cast<cd>().asDiagonal();
  SpMat a = cd(0, 0.5) * (SpMat(md + dm));
  a.prune(cd(0, 0));
  a.makeCompressed();
  return {std::move(a), true};
}

FlowResult flow_map(CutoffIndex n, double t, const VecR& r0) {
  FlowResult out;
  out.phi.resize(r0.size());
  out.jac.resize(r0.size());

  if (n.infinite) {
    for (Eigen::Index i = 0; i < r0.size(); ++i) {
      out.phi[i] = r0[i] + t;
      out.jac[i] = 1.0;
    }
    return out;
  }

  using state = std::vector<double>;
  state x(2 * r0.size());
  for (Eigen::Index i = 0; i < r0.size(); ++i) {
    x[2 * i] = r0[i];
    x[2 * i + 1] = 1.0;
  }
  auto rhs = [&](const state& s, state& dsdt, double) {
    for (std::size_t i = 0; i < s.size() / 2; ++i) {
      dsdt[2 * i] = m_field(n, s[2 * i]);
      dsdt[2 * i + 1] = m_field_prime(n, s[2 * i]) * s[2 * i + 1];
    }
  };

  if (t != 0.0) {
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<state>>(1e-12, 1e-12);
    double dt = t > 0 ? std::min(0.1, t) : std::max(-0.1, t);
    ode::integrate_adaptive(stepper, rhs, x, 0.0, t, dt);
  }

  for (Eigen::Index i = 0; i < r0.size(); ++i) {
    out.phi[i] = x[2 * i];
    out.jac[i] = x[2 * i + 1];
  }
  return out;
}

namespace {

// Lagrange interpolation weights at point r using up to 4 neighboring
// nodes; returns (first node index, coefficients).
std::pair<int, std::vector<double>> lagrange4(const VecR& nodes, double r) {
  int n = int(nodes.size());
  // first node >= r
  int hi = int(std::lower_bound(nodes.data(), nodes.data() + n, r) - nodes.data());
  int start = std::clamp(hi - 2, 0, std::max(0, n - 4));
  int count = std::min(4, n - start);
  std::vector<double> w(count, 1.0);
  for (int a = 0; a < count; ++a) {
    for (int b = 0; b < count; ++b) {
      if (a == b) continue;
      w[a] *= (r - nodes[start + b]) / (nodes[start + a] - nodes[start + b]);
    }
  }
  return {start, w};
}

SparseOp transplant(const RadialGrid& g, CutoffIndex n, double flow_time) {
  // (T u)(r_j) = sqrt(J(r_j)) u(phi(r_j)) with phi the time-flow_time map
  FlowResult fr = flow_map(n, flow_time, g.nodes);
  std::vector<Triplet> trips;
  for (int j = 0; j < g.n_r; ++j) {
    double p = fr.phi[j];
    double jac = fr.jac[j];
    if (jac <= 0.0) continue;
    if (p <= 0.0) continue;  // outside Omega: zero row
    if (p < g.nodes[0] || p > g.nodes[g.n_r - 1]) continue;  // zero extension
    auto [start, wts] = lagrange4(g.nodes, p);
    for (std::size_t a = 0; a < wts.size(); ++a) {
      if (wts[a] == 0.0) continue;
      int k = start + int(a);
      double val = std::sqrt(jac) * wts[a] *
                   std::sqrt(g.weights[j] / g.weights[k]);
      for (int c = 0; c < g.n_ch; ++c)
        trips.emplace_back(j + g.n_r * c, k + g.n_r * c, cd(val, 0));
    }
  }
  SpMat m(g.modes(), g.modes());
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return {std::move(m), false};
}

}  // namespace

SparseOp isometry_w(const RadialGrid& g, CutoffIndex n, double t) {
  if (t < 0)
    throw std::invalid_argument("isometry_w: t >= 0 required (adjoint handles t < 0)");
  return transplant(g, n, -t);
}

SparseOp isometry_w_adjoint(const RadialGrid& g, CutoffIndex n, double t) {
  if (t < 0) throw std::invalid_argument("isometry_w_adjoint: t >= 0 required");
  return transplant(g, n, t);
}

DirichletSqrt dirichlet_sqrt_laplacian(const RadialGrid& g) {
  if (g.rule != QuadRule::midpoint)
    throw std::invalid_argument("dirichlet_sqrt_laplacian: uniform grid required");
  int n = g.n_r;
  double h = g.r_max / n;
  MatR lap = MatR::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    lap(j, j) = 2.0 / (h * h);
    if (j + 1 < n) lap(j, j + 1) = lap(j + 1, j) = -1.0 / (h * h);
  }
  Eigen::SelfAdjointEigenSolver<MatR> es(lap);
  DirichletSqrt out;
  out.evals = es.eigenvalues();
  out.evecs = es.eigenvectors();
  out.sqrt_b =
      out.evecs * out.evals.cwiseSqrt().asDiagonal() * out.evecs.transpose();
  return out;
}

SparseOp dirichlet_sqrt_op(const RadialGrid& g) {
  DirichletSqrt ds = dirichlet_sqrt_laplacian(g);
  std::vector<Triplet> trips;
  trips.reserve(std::size_t(g.n_r) * g.n_r * g.n_ch);
  for (int c = 0; c < g.n_ch; ++c) {
    int off = g.n_r * c;
    for (int j = 0; j < g.n_r; ++j)
      for (int k = 0; k < g.n_r; ++k)
        trips.emplace_back(off + j, off + k, cd(ds.sqrt_b(j, k), 0));
  }
  SpMat m(g.modes(), g.modes());
  m.setFromTriplets(trips.begin(), trips.end());
  m.makeCompressed();
  return {std::move(m), true};
}

SparseOp weight_b(const RadialGrid& g) {
  return mult_op(g, [](double r) { return std::sqrt(1.0 + r * r); });
}

}  // namespace pflab
