#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>

#include "transcoord/error.hpp"

namespace transcoord {

using Complex = std::complex<double>;

// A pair of computational chart parameters: (time, space). Only the library
// internals and tests look at these; results are geometric.
struct Vec2 {
  double t{0.0};
  double x{0.0};

  constexpr Vec2 operator+(Vec2 o) const noexcept { return {t + o.t, x + o.x}; }
  constexpr Vec2 operator-(Vec2 o) const noexcept { return {t - o.t, x - o.x}; }
  constexpr Vec2 operator-() const noexcept { return {-t, -x}; }
  constexpr Vec2 operator*(double s) const noexcept { return {t * s, x * s}; }
  constexpr Vec2 operator/(double s) const noexcept { return {t / s, x / s}; }
  friend constexpr Vec2 operator*(double s, Vec2 v) noexcept { return v * s; }
};

inline double max_abs(Vec2 v) noexcept { return std::max(std::abs(v.t), std::abs(v.x)); }

// Row-major 2x2 matrix acting on Vec2 column vectors.
struct Mat2 {
  double tt{1.0}, tx{0.0};
  double xt{0.0}, xx{1.0};

  constexpr Vec2 operator*(Vec2 v) const noexcept { return {tt * v.t + tx * v.x, xt * v.t + xx * v.x}; }
  constexpr Mat2 operator*(const Mat2& o) const noexcept {
    return {tt * o.tt + tx * o.xt, tt * o.tx + tx * o.xx, xt * o.tt + xx * o.xt, xt * o.tx + xx * o.xx};
  }
  constexpr double det() const noexcept { return tt * xx - tx * xt; }
  Mat2 inverse() const {
    const double d = det();
    require(std::abs(d) > 1e-300, ErrorCode::invalid_argument, "singular chart jacobian");
    return {xx / d, -tx / d, -xt / d, tt / d};
  }
};

// Axis-aligned box in chart parameters.
struct Region {
  double t_min{-std::numeric_limits<double>::infinity()};
  double t_max{std::numeric_limits<double>::infinity()};
  double x_min{-std::numeric_limits<double>::infinity()};
  double x_max{std::numeric_limits<double>::infinity()};

  bool contains(Vec2 p) const noexcept { return p.t >= t_min && p.t <= t_max && p.x >= x_min && p.x <= x_max; }
};

struct Interval {
  double lo{0.0};
  double hi{0.0};
  double length() const noexcept { return hi - lo; }
};

namespace detail {

// Four-point Lagrange interpolation on a uniform lattice, evaluated at local
// offset s measured in units of the spacing from node 1 (nodes at -1,0,1,2).
// Returns value and derivative with respect to s.
template <class T>
inline std::pair<T, T> cubic_lagrange(const std::array<T, 4>& f, double s) {
  const double sm1 = s + 1.0, s0 = s, s1 = s - 1.0, s2 = s - 2.0;
  const double w0 = -s0 * s1 * s2 / 6.0;
  const double w1 = sm1 * s1 * s2 / 2.0;
  const double w2 = -sm1 * s0 * s2 / 2.0;
  const double w3 = sm1 * s0 * s1 / 6.0;
  const double d0 = -(s1 * s2 + s0 * s2 + s0 * s1) / 6.0;
  const double d1 = (s1 * s2 + sm1 * s2 + sm1 * s1) / 2.0;
  const double d2 = -(s0 * s2 + sm1 * s2 + sm1 * s0) / 2.0;
  const double d3 = (s0 * s1 + sm1 * s1 + sm1 * s0) / 6.0;
  return {f[0] * w0 + f[1] * w1 + f[2] * w2 + f[3] * w3, f[0] * d0 + f[1] * d1 + f[2] * d2 + f[3] * d3};
}

// Fourth-order central first derivative of a scalar function.
template <class F>
inline double central_derivative(F&& f, double at, double h) {
  return (-f(at + 2.0 * h) + 8.0 * f(at + h) - 8.0 * f(at - h) + f(at - 2.0 * h)) / (12.0 * h);
}

// 64-bit mixer used for per-trial seed derivation.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail
}  // namespace transcoord
