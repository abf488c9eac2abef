#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "transcoord/chart.hpp"
#include "transcoord/error.hpp"
#include "transcoord/geometry.hpp"
#include "transcoord/numeric.hpp"
#include "transcoord/partition.hpp"
#include "transcoord/wavepacket.hpp"

namespace transcoord {

// Decreasing sequence of neighborhood scales, plus how many even error terms
// (h^2, h^4, ...) the extrapolation removes.
struct LimitSchedule {
  std::vector<double> deltas;
  int richardson_levels{3};

  static LimitSchedule geometric(double delta0 = 1e-2, double ratio = 0.25, int levels = 5, int richardson = 3) {
    require(delta0 > 0.0 && ratio > 0.0 && ratio < 1.0 && levels >= 1, ErrorCode::invalid_argument,
            "bad geometric schedule");
    LimitSchedule s;
    s.richardson_levels = richardson;
    for (int i = 0; i < levels; ++i) s.deltas.push_back(delta0 * std::pow(ratio, i));
    return s;
  }

  void validate() const {
    require(deltas.size() >= 3, ErrorCode::insufficient_points, "schedule needs at least three scales");
    require(richardson_levels >= 0, ErrorCode::invalid_argument, "negative extrapolation depth");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      require(deltas[i] > 0.0 && std::isfinite(deltas[i]), ErrorCode::invalid_argument, "scales must be positive");
      if (i > 0) require(deltas[i] < deltas[i - 1], ErrorCode::invalid_argument, "scales must strictly decrease");
    }
  }
};

struct DerivativeResult {
  Complex value;
  double observed_order{0.0};
  double residual{0.0};
  bool non_convergent{false};
  std::vector<double> deltas;
  std::vector<Complex> raw;        // one difference quotient per scale
  std::vector<Complex> extrapolated;  // best extrapolant available at each scale
};

enum class GridPolicy { flow, rest };

// --- convergence machinery ------------------------------------------------------

inline constexpr double kErrorFloor = 1e-12;

// Least-squares slope of log error against log sqrt(delta). Errors at or below
// the floor are dropped; if nothing is left the result is +infinity.
inline double convergence_order(const std::vector<std::pair<double, Complex>>& values,
                                 std::optional<Complex> limit = std::nullopt) {
  require(values.size() >= 3, ErrorCode::insufficient_points, "order estimate needs three points");
  std::vector<double> lh, le;
  if (limit) {
    for (const auto& [d, v] : values) {
      const double e = std::abs(v - *limit);
      if (e > kErrorFloor) {
        lh.push_back(0.5 * std::log(d));
        le.push_back(std::log(e));
      }
    }
  } else {
    // Successive differences decay at the same rate as the errors.
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
      const double e = std::abs(values[i + 1].second - values[i].second);
      if (e > kErrorFloor) {
        lh.push_back(0.5 * std::log(values[i].first));
        le.push_back(std::log(e));
      }
    }
  }
  if (lh.size() < 2) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(lh.size());
  double mh = 0, me = 0;
  for (std::size_t i = 0; i < lh.size(); ++i) {
    mh += lh[i] / n;
    me += le[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lh.size(); ++i) {
    sxy += (lh[i] - mh) * (le[i] - me);
    sxx += (lh[i] - mh) * (lh[i] - mh);
  }
  return sxy / sxx;
}

namespace detail {

// Neville tableau in h^2 with h = sqrt(delta), depth-limited.
inline DerivativeResult extrapolate(const std::vector<double>& deltas, const std::vector<Complex>& raw, int depth) {
  const std::size_t n = raw.size();
  std::vector<std::vector<Complex>> T(n);
  DerivativeResult r;
  r.deltas = deltas;
  r.raw = raw;
  for (std::size_t i = 0; i < n; ++i) {
    T[i].push_back(raw[i]);
    const std::size_t kmax = std::min<std::size_t>(i, static_cast<std::size_t>(depth));
    for (std::size_t k = 1; k <= kmax; ++k) {
      const double ratio = deltas[i - k] / deltas[i];
      T[i].push_back(T[i][k - 1] + (T[i][k - 1] - T[i - 1][k - 1]) / (ratio - 1.0));
    }
    r.extrapolated.push_back(T[i].back());
  }
  const auto& last = T[n - 1];
  r.value = last.back();
  r.residual = last.size() > 1 ? std::abs(last.back() - last[last.size() - 2]) : std::abs(raw[n - 1] - raw[n - 2]);
  std::vector<std::pair<double, Complex>> pts;
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(deltas[i], raw[i]);
  r.observed_order = convergence_order(pts, r.value);
  // Errors of the raw quotients should shrink with the scale.
  const double floor = kErrorFloor * std::max(1.0, std::abs(r.value));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double e0 = std::abs(raw[i] - r.value), e1 = std::abs(raw[i + 1] - r.value);
    if (e0 > floor && e1 > e0 * (1.0 + 1e-9)) r.non_convergent = true;
  }
  return r;
}

inline double spatial_separation(const Neighborhood& n) {
  if (n.center.chart()->is_minkowski()) return 2.0 * std::sqrt(n.delta);
  return std::sqrt(interval_squared(n.c, n.c_prime).value);
}

inline double temporal_separation(const Neighborhood& n) {
  if (n.center.chart()->is_minkowski()) return 2.0 * std::sqrt(n.delta);
  return std::sqrt(-interval_squared(n.b_prime, n.b).value);
}

}  // namespace detail

// Limit of central difference quotients of f over the neighborhoods of the
// grid's anchor: (f(c') - f(c)) / |c c'| for space, (f(b) - f(b')) / |b' b|
// for time.
template <class F>
DerivativeResult directional_limit(F&& f, const LocalGrid& grid, Axis axis, const LimitSchedule& sched) {
  sched.validate();
  std::vector<Complex> raw;
  for (double delta : sched.deltas) {
    const Neighborhood n = build_neighborhood(grid.anchor, grid.t_hat, delta);
    const Complex q = axis == Axis::space ? (Complex(f(n.c_prime)) - Complex(f(n.c))) / detail::spatial_separation(n)
                                          : (Complex(f(n.b)) - Complex(f(n.b_prime))) / detail::temporal_separation(n);
    raw.push_back(q);
  }
  return detail::extrapolate(sched.deltas, raw, sched.richardson_levels);
}

inline LocalGrid grid_for(const WaveFunction& phi, const Event& a, GridPolicy policy) {
  if (policy == GridPolicy::rest) return chart_rest_grid(a);
  try {
    return local_grid(phi, a);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::vanishing_density || e.code() == ErrorCode::spacelike_current) {
      fail(ErrorCode::undefined_grid, std::string("no local grid at this event: ") + e.what());
    }
    throw;
  }
}

inline DerivativeResult transcoord_partial(const WaveFunction& phi, const LocalGrid& grid, Axis axis,
                                           const LimitSchedule& sched = LimitSchedule::geometric()) {
  return directional_limit([&](const Event& e) { return phi.evaluate(e); }, grid, axis, sched);
}

inline DerivativeResult transcoord_partial(const WaveFunction& phi, const Event& a, Axis axis,
                                           const LimitSchedule& sched = LimitSchedule::geometric(),
                                           GridPolicy policy = GridPolicy::flow) {
  return transcoord_partial(phi, grid_for(phi, a, policy), axis, sched);
}

// Exact derivative of an analytic form along a grid axis.
inline Complex analytic_grid_partial(const WaveFunction& phi, const LocalGrid& grid, Axis axis) {
  require(phi.is_analytic(), ErrorCode::no_analytic_form, "grid-sampled wave functions have no closed form");
  const Direction& d = axis == Axis::time ? grid.t_hat : grid.x_hat;
  const Vec2 h = push_components(d.anchor(), d.components(), *phi.home());
  const Jet z = phi.jet_at(phi.home_point(grid.anchor));
  return h.t * z.dt + h.x * z.dx;
}

inline constexpr double kMaxEvaluations = 1e6;

// Nested spatial difference of extrapolated first derivatives taken on the
// local grids at c and c'.
inline DerivativeResult transcoord_second_x(const WaveFunction& phi, const Event& a,
                                            const LimitSchedule& sched = LimitSchedule::geometric(),
                                            GridPolicy policy = GridPolicy::flow) {
  sched.validate();
  const double n = static_cast<double>(sched.deltas.size());
  require(n * 2.0 * n * 2.0 <= kMaxEvaluations, ErrorCode::cost_guard, "schedule implies too many evaluations");
  const LocalGrid grid = grid_for(phi, a, policy);
  auto inner = [&](const Event& e) { return transcoord_partial(phi, e, Axis::space, sched, policy).value; };
  return directional_limit(inner, grid, Axis::space, sched);
}

// Probability between the partition lines through c and c', per unit metric
// width, in the limit of small neighborhoods.
inline DerivativeResult local_normalization_density(const WaveFunction& phi, const Event& a,
                                                    const LimitSchedule& sched = LimitSchedule::geometric(),
                                                    GridPolicy policy = GridPolicy::flow) {
  require(phi.normalizable(), ErrorCode::non_normalizable, "plane waves have no finite probability");
  sched.validate();
  const LocalGrid grid = grid_for(phi, a, policy);
  std::vector<Complex> raw;
  for (double delta : sched.deltas) {
    const Neighborhood n = build_neighborhood(grid.anchor, grid.t_hat, delta);
    raw.emplace_back(fraction_between(phi, n.c, n.c_prime) / detail::spatial_separation(n), 0.0);
  }
  return detail::extrapolate(sched.deltas, raw, sched.richardson_levels);
}

}  // namespace transcoord
