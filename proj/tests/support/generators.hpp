#pragma once

// Seeded random inputs for property tests, plus closed-form oracles that do
// not go through the library's own evaluation paths.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace gen {

class Source {
 public:
  explicit Source(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  // Speed strictly inside the light cone.
  double beta(double max = 0.9) { return uniform(-max, max); }

  // Increasing list of n values in [lo, hi], at least gap apart.
  std::vector<double> sorted(int n, double lo, double hi, double gap) {
    std::vector<double> v;
    const double span = (hi - lo - gap * (n - 1));
    std::vector<double> u(static_cast<std::size_t>(n));
    for (auto& x : u) x = uniform(0.0, span);
    std::sort(u.begin(), u.end());
    for (int i = 0; i < n; ++i) v.push_back(lo + u[static_cast<std::size_t>(i)] + gap * i);
    return v;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace gen

namespace oracle {

using C = std::complex<double>;

// Free Schroedinger Gaussian with position spread s0 of the density at t = 0.
struct Gaussian {
  double m{1.0}, s0{1.0}, x0{0.0}, k0{0.0};

  C spread(double t) const { return C{1.0, t / (2.0 * m * s0 * s0)}; }
  double width(double t) const { return s0 * std::abs(spread(t)); }
  double center(double t) const { return x0 + k0 * t / m; }

  // Logarithmic derivatives, free of any phase convention.
  C log_dx(double t, double x) const { return C{0.0, k0} - (x - center(t)) / (2.0 * s0 * s0 * spread(t)); }
  C log_dxx(double t, double x) const {
    const C l = log_dx(t, x);
    return l * l - 1.0 / (2.0 * s0 * s0 * spread(t));
  }
  C log_dt(double t, double x) const { return C{0.0, 0.5 / m} * log_dxx(t, x); }

  double density(double t, double x) const {
    const double w = width(t);
    const double z = (x - center(t)) / w;
    return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * w);
  }
  // Probability left of x on the time slice t.
  double cdf(double t, double x) const { return 0.5 * std::erfc(-(x - center(t)) / (std::sqrt(2.0) * width(t))); }
  // Streamline through (0, x_start): fixed standardized position.
  double streamline(double x_start, double t) const {
    return center(t) + (x_start - x0) * width(t) / s0;
  }
  // Local velocity j / rho.
  double velocity(double t, double x) const { return log_dx(t, x).imag() / m; }
};

}  // namespace oracle
