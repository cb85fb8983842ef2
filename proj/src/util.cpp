#include "pflab/util.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pflab {

std::string fmt_double(double x) {
  char buf[48];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a(const std::string& s) { return fnv1a(s.data(), s.size()); }

std::pair<double, double> linfit(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("linfit: need >= 2 matching points");
  double n = double(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double den = n * sxx - sx * sx;
  double b = (n * sxy - sx * sy) / den;
  double a = (sy - b * sx) / n;
  return {a, b};
}

namespace {
double half_bump(double x) { return x > 0 ? std::exp(-1.0 / x) : 0.0; }
}  // namespace

double smoothstep(double x) {
  double p = half_bump(x), q = half_bump(1.0 - x);
  return p / (p + q);
}

double smoothstep_prime(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  double p = half_bump(x), q = half_bump(1.0 - x);
  double dp = p / (x * x), dq = -q / ((1.0 - x) * (1.0 - x));
  double s = p + q;
  return (dp * s - p * (dp + dq)) / (s * s);
}

double plateau_bump(double x, double lo, double hi, double w) {
  if (x <= lo || x >= hi) return 0.0;
  return smoothstep((x - lo) / w) * smoothstep((hi - x) / w);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace pflab
