#include "pflab/grid.hpp"

#include <Eigen/Eigenvalues>

#include <functional>
#include <stdexcept>

namespace pflab {

double RadialGrid::spacing() const {
  double h = nodes[0];
  for (int j = 1; j < n_r; ++j) h = std::max(h, nodes[j] - nodes[j - 1]);
  return h;
}

VecR RadialGrid::sample(const std::function<double(double)>& f) const {
  VecR v(modes());
  for (int c = 0; c < n_ch; ++c)
    for (int j = 0; j < n_r; ++j) v[j + n_r * c] = f(nodes[j]);
  return v;
}

RadialGrid make_grid(int n_r, double r_max, int n_ch, QuadRule rule) {
  if (n_r < 2) throw std::invalid_argument("make_grid: n_r >= 2 required");
  if (r_max <= 0) throw std::invalid_argument("make_grid: r_max > 0 required");
  if (n_ch < 1) throw std::invalid_argument("make_grid: n_ch >= 1 required");

  RadialGrid g;
  g.n_r = n_r;
  g.n_ch = n_ch;
  g.r_max = r_max;
  g.rule = rule;
  g.nodes.resize(n_r);
  g.weights.resize(n_r);

  if (rule == QuadRule::midpoint) {
    double h = r_max / n_r;
    for (int j = 0; j < n_r; ++j) {
      g.nodes[j] = (j + 0.5) * h;
      g.weights[j] = h;
    }
  } else {
    // Gauss-Legendre via Golub-Welsch on the Jacobi matrix, mapped from
    // (-1,1) to (0, r_max).
    MatR J = MatR::Zero(n_r, n_r);
    for (int k = 1; k < n_r; ++k) {
      double b = k / std::sqrt(4.0 * k * k - 1.0);
      J(k - 1, k) = J(k, k - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<MatR> es(J);
    for (int j = 0; j < n_r; ++j) {
      double x = es.eigenvalues()[j];
      double w0 = 2.0 * es.eigenvectors()(0, j) * es.eigenvectors()(0, j);
      g.nodes[j] = 0.5 * r_max * (x + 1.0);
      g.weights[j] = 0.5 * r_max * w0;
    }
  }
  return g;
}

QuadRule parse_rule(const std::string& s) {
  if (s == "midpoint") return QuadRule::midpoint;
  if (s == "gauss" || s == "gauss_legendre") return QuadRule::gauss_legendre;
  throw std::invalid_argument("unknown quadrature rule: " + s);
}

}  // namespace pflab
