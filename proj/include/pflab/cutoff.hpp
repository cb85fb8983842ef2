#pragma once

#include <limits>

#include "pflab/util.hpp"

namespace pflab {

// Index of the cutoff vector-field family. Finite n gives the field
// m_n(t) = 1 - chi(n t) vanishing on [0, 1/n]; n = infinity gives the
// constant field 1 (free translation generator).
struct CutoffIndex {
  bool infinite = false;
  double n = 1.0;

  static CutoffIndex inf() { return {true, 0.0}; }
  static CutoffIndex finite(double n) { return {false, n}; }
};

// Smooth decreasing cutoff chi: 1 on [0,1], 0 on [2, infinity), built
// from exp(-1/x) transitions.
double chi(double x);
double chi_prime(double x);

// m_n and its derivative; s_n(t) = m_n(t)/t extended smoothly by 0 at 0.
double m_field(CutoffIndex n, double t);
double m_field_prime(CutoffIndex n, double t);
double s_field(CutoffIndex n, double t);

}  // namespace pflab
