#pragma once

#include <functional>
#include <string>

#include "pflab/util.hpp"

namespace pflab {

enum class QuadRule { midpoint, gauss_legendre };

// Radial quadrature grid on (0, r_max), replicated over n_ch angular
// channels. One-particle coefficient vectors live in C^{n_r * n_ch} and
// carry sqrt(weight) so the Euclidean inner product realizes L^2(dr) per
// channel; index = r-index + n_r * channel.
struct RadialGrid {
  int n_r = 0;
  int n_ch = 1;
  double r_max = 0;
  QuadRule rule = QuadRule::midpoint;
  VecR nodes;    // size n_r, strictly increasing in (0, r_max)
  VecR weights;  // size n_r, positive, sum = r_max

  int modes() const { return n_r * n_ch; }
  int rindex(int mode) const { return mode % n_r; }
  int channel(int mode) const { return mode / n_r; }
  double spacing() const;  // max node gap, the resolution scale h

  // samples of a scalar function of r, replicated over channels,
  // without quadrature weighting (use for multiplication operators)
  VecR sample(const std::function<double(double)>& f) const;
};

RadialGrid make_grid(int n_r, double r_max, int n_ch = 1,
                     QuadRule rule = QuadRule::midpoint);

QuadRule parse_rule(const std::string& s);

}  // namespace pflab
