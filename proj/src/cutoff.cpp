#include "pflab/cutoff.hpp"

#include <cmath>
#include <stdexcept>

namespace pflab {

// chi(x) = 1 - smoothstep(x - 1): the transition lives on [1, 2].
double chi(double x) {
  if (x <= 1.0) return 1.0;
  if (x >= 2.0) return 0.0;
  return 1.0 - smoothstep(x - 1.0);
}

double chi_prime(double x) {
  if (x <= 1.0 || x >= 2.0) return 0.0;
  return -smoothstep_prime(x - 1.0);
}

double m_field(CutoffIndex n, double t) {
  if (n.infinite) return 1.0;
  if (n.n <= 0) throw std::invalid_argument("cutoff index must be positive");
  return 1.0 - chi(n.n * t);
}

double m_field_prime(CutoffIndex n, double t) {
  if (n.infinite) return 0.0;
  if (n.n <= 0) throw std::invalid_argument("cutoff index must be positive");
  return -n.n * chi_prime(n.n * t);
}

double s_field(CutoffIndex n, double t) {
  if (n.infinite) {
    if (t <= 0) throw std::invalid_argument("s_field: t > 0 required for n = inf");
    return 1.0 / t;
  }
  if (t <= 0) return 0.0;
  return m_field(n, t) / t;  // vanishes identically for t <= 1/n
}

}  // namespace pflab
