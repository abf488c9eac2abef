#pragma once

// Geodesic and light-ray integration on diagonal 1+1 charts. Used only for
// charts whose metric is not the Minkowski form; Minkowski charts use closed
// forms everywhere.

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "transcoord/chart.hpp"
#include "transcoord/error.hpp"

namespace transcoord::detail {

namespace odeint = boost::numeric::odeint;

using GeodesicState = std::array<double, 4>;  // t, x, dt/dλ, dx/dλ
using ScalarState = std::array<double, 1>;

inline constexpr double kGeodesicTolerance = 1e-13;

inline void geodesic_rhs(const Chart& chart, const GeodesicState& y, GeodesicState& dy) {
  const Vec2 p{y[0], y[1]};
  const auto g = chart.metric(p);
  const auto [dA, dB] = chart.metric_gradient(p);
  const double ut = y[2], ux = y[3];
  const double A = g.gtt, B = g.gxx;
  dy[0] = ut;
  dy[1] = ux;
  dy[2] = -(dA.t / (2 * A) * ut * ut + dA.x / A * ut * ux - dB.t / (2 * A) * ux * ux);
  dy[3] = -(-dA.x / (2 * B) * ut * ut + dB.t / B * ut * ux + dB.x / (2 * B) * ux * ux);
}

template <class Rhs, class State>
inline void integrate_span(Rhs&& rhs, State& y, double from, double to, double tol) {
  if (from == to) return;
  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(tol, tol);
  const double dt0 = (to - from) / 32.0;
  try {
    odeint::integrate_adaptive(stepper, rhs, y, from, to, dt0);
  } catch (const odeint::step_adjustment_error& e) {
    fail(ErrorCode::no_unique_geodesic, std::string("integrator stalled: ") + e.what());
  } catch (const odeint::no_progress_error& e) {
    fail(ErrorCode::no_unique_geodesic, std::string("integrator stalled: ") + e.what());
  }
}

// Geodesic through p with initial velocity v, followed for affine parameter
// λ in [0, 1]. Returns end point and end velocity.
inline GeodesicState exp_map(const Chart& chart, Vec2 p, Vec2 v) {
  GeodesicState y{p.t, p.x, v.t, v.x};
  integrate_span([&](const GeodesicState& s, GeodesicState& ds, double) { geodesic_rhs(chart, s, ds); }, y, 0.0,
                 1.0, kGeodesicTolerance);
  return y;
}

// Initial velocity of the geodesic from a reaching b at λ = 1 (damped Newton
// on the shooting residual).
inline Vec2 shoot(const Chart& chart, Vec2 a, Vec2 b) {
  const double scale = std::max(1.0, max_abs(b - a));
  auto residual = [&](Vec2 v) {
    const auto y = exp_map(chart, a, v);
    return Vec2{y[0] - b.t, y[1] - b.x};
  };
  Vec2 v = b - a;
  try {
    Vec2 r = residual(v);
    for (int iter = 0; iter < 40; ++iter) {
      const double rn = max_abs(r);
      if (rn <= 1e-12 * scale) return v;
      const double h = 1e-7 * std::max(1.0, max_abs(v));
      const Vec2 rt = (residual(v + Vec2{h, 0}) - residual(v - Vec2{h, 0})) / (2 * h);
      const Vec2 rx = (residual(v + Vec2{0, h}) - residual(v - Vec2{0, h})) / (2 * h);
      const Mat2 jac{rt.t, rx.t, rt.x, rx.x};
      const Vec2 step = jac.inverse() * r;
      double damping = 1.0;
      for (int k = 0; k < 30; ++k) {
        const Vec2 trial = v - step * damping;
        const Vec2 rtrial = residual(trial);
        if (max_abs(rtrial) < rn || damping < 1e-6) {
          v = trial;
          r = rtrial;
          break;
        }
        damping *= 0.5;
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::no_unique_geodesic) throw;
    fail(ErrorCode::no_unique_geodesic, std::string("shooting left the chart: ") + e.what());
  }
  fail(ErrorCode::no_unique_geodesic,
       "no converged geodesic between the events on chart '" + chart.id() + "'");
}

// Light ray through start, parameterized by the space parameter. x_sign picks
// the spatial heading, t_sign picks future (+1) or past (-1). Returns the time
// parameter where the ray reaches x.
inline double light_ray_time(const Chart& chart, Vec2 start, int x_sign, int t_sign, double x) {
  ScalarState y{start.t};
  const double sign = static_cast<double>(x_sign * t_sign);
  integrate_span(
      [&](const ScalarState& s, ScalarState& ds, double xx) {
        const auto g = chart.metric({s[0], xx});
        ds[0] = sign * std::sqrt(g.gxx / -g.gtt);
      },
      y, start.x, x, 1e-14);
  return y[0];
}

// Intersection of the future light ray from `lower` with the past light ray
// from `upper`, both heading toward x_sign.
inline Vec2 cone_intersection(const Chart& chart, Vec2 lower, Vec2 upper, int x_sign) {
  const double x0 = x_sign > 0 ? std::max(lower.x, upper.x) : std::min(lower.x, upper.x);
  auto gap = [&](double x) {
    const double t_up = light_ray_time(chart, lower, x_sign, +1, x);
    const double t_down = light_ray_time(chart, upper, x_sign, -1, x);
    return t_up - t_down;
  };
  try {
    const double g0 = gap(x0);
    require(g0 < 0.0, ErrorCode::scale_too_coarse, "light cones do not bracket an intersection");
    double step = std::max(1e-12, max_abs(upper - lower));
    double x1 = x0 + x_sign * step;
    double g1 = gap(x1);
    int expansions = 0;
    while (g1 <= 0.0) {
      require(++expansions < 60, ErrorCode::scale_too_coarse, "light cones never intersect");
      step *= 2.0;
      x1 = x0 + x_sign * step;
      g1 = gap(x1);
    }
    double lo = x0, hi = x1, glo = g0, ghi = g1;
    if (x_sign < 0) {
      std::swap(lo, hi);
      std::swap(glo, ghi);
    }
    std::uintmax_t iters = 200;
    auto [ra, rb] = boost::math::tools::toms748_solve(gap, lo, hi, glo, ghi,
                                                      boost::math::tools::eps_tolerance<double>(50), iters);
    const double xs = 0.5 * (ra + rb);
    return {light_ray_time(chart, lower, x_sign, +1, xs), xs};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::scale_too_coarse) throw;
    fail(ErrorCode::scale_too_coarse, std::string("cone intersection failed: ") + e.what());
  } catch (const std::exception& e) {
    fail(ErrorCode::scale_too_coarse, std::string("cone intersection failed: ") + e.what());
  }
}

}  // namespace transcoord::detail
