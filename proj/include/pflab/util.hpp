#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pflab {

using cd = std::complex<double>;
using VecR = Eigen::VectorXd;
using VecC = Eigen::VectorXcd;
using MatR = Eigen::MatrixXd;
using MatC = Eigen::MatrixXcd;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Deterministic RNG wrapper. All random draws in the library go through
// this so a single seed pins every sampled quantity.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return unif_(eng_); }
  double gauss() { return norm_(eng_); }
  cd cgauss() { return cd(norm_(eng_), norm_(eng_)) / std::sqrt(2.0); }

  VecC cgauss_vec(Eigen::Index n) {
    VecC v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = cgauss();
    return v;
  }

  MatC cgauss_mat(Eigen::Index r, Eigen::Index c) {
    MatC m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = cgauss();
    return m;
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> norm_{0.0, 1.0};
};

// Shortest round-trip decimal for a double; used by every CSV writer so
// identical runs produce byte-identical files.
std::string fmt_double(double x);

// FNV-1a over raw bytes; stable input fingerprint for manifests.
std::uint64_t fnv1a(const void* data, std::size_t n);
std::uint64_t fnv1a(const std::string& s);

// Least squares fit y = a + b*x. Returns {a, b}.
std::pair<double, double> linfit(const std::vector<double>& x,
                                 const std::vector<double>& y);

// Smooth transition: 0 for x <= 0, 1 for x >= 1, C^infinity, built from
// exp(-1/x).
double smoothstep(double x);
double smoothstep_prime(double x);

// C_c^infinity bump supported on (lo, hi), equal to 1 on the middle
// plateau [lo + w, hi - w].
double plateau_bump(double x, double lo, double hi, double w);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace pflab
