#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "transcoord/chart.hpp"
#include "transcoord/detail/geodesic.hpp"
#include "transcoord/error.hpp"
#include "transcoord/numeric.hpp"

namespace transcoord {

enum class CausalClass { timelike, spacelike, lightlike };

inline const char* to_string(CausalClass c) noexcept {
  switch (c) {
    case CausalClass::timelike: return "timelike";
    case CausalClass::spacelike: return "spacelike";
    case CausalClass::lightlike: return "lightlike";
  }
  return "?";
}

// Squared invariant interval, length^2 with c = 1. Negative is timelike.
struct IntervalSq {
  double value{0.0};
};

// Relative width of the band around zero that counts as lightlike.
inline constexpr double kLightlikeBand = 1e-9;

inline CausalClass classify_value(double s2, double scale) noexcept {
  if (std::abs(s2) < kLightlikeBand * std::max(1.0, std::abs(scale))) return CausalClass::lightlike;
  return s2 < 0.0 ? CausalClass::timelike : CausalClass::spacelike;
}

// A tangent vector at an event, components in the anchor's chart basis.
struct Vector {
  Event anchor;
  Vec2 comps;
};

struct Covector {
  Event anchor;
  Vec2 comps;
};

inline double metric_dot(const Event& at, Vec2 u, Vec2 v) { return at.chart()->metric(at.point()).dot(u, v); }

// Unit (or unit-scaled null) direction at an event.
class Direction {
 public:
  static Direction timelike(Event anchor, Vec2 comps) {
    const double n2 = metric_dot(anchor, comps, comps);
    require(n2 < 0.0, ErrorCode::invalid_argument, "timelike direction requires g(u,u) < 0");
    return Direction(std::move(anchor), comps / std::sqrt(-n2), CausalClass::timelike);
  }
  static Direction spacelike(Event anchor, Vec2 comps) {
    const double n2 = metric_dot(anchor, comps, comps);
    require(n2 > 0.0, ErrorCode::invalid_argument, "spacelike direction requires g(u,u) > 0");
    return Direction(std::move(anchor), comps / std::sqrt(n2), CausalClass::spacelike);
  }
  static Direction lightlike(Event anchor, Vec2 comps) {
    const double n2 = metric_dot(anchor, comps, comps);
    require(std::abs(n2) <= 1e-9 * std::max(1.0, max_abs(comps) * max_abs(comps)) && comps.t != 0.0,
            ErrorCode::invalid_argument, "lightlike direction requires g(u,u) = 0 and a time component");
    return Direction(std::move(anchor), comps / comps.t, CausalClass::lightlike);
  }
  static Direction of_class(Event anchor, Vec2 comps, CausalClass cls) {
    switch (cls) {
      case CausalClass::timelike: return timelike(std::move(anchor), comps);
      case CausalClass::spacelike: return spacelike(std::move(anchor), comps);
      case CausalClass::lightlike: return lightlike(std::move(anchor), comps);
    }
    fail(ErrorCode::invalid_argument, "unknown causal class");
  }
  // Chart-rest time direction: along the chart's time parameter.
  static Direction chart_rest(Event anchor) { return timelike(std::move(anchor), {1.0, 0.0}); }

  const Event& anchor() const noexcept { return anchor_; }
  Vec2 components() const noexcept { return comps_; }
  CausalClass causal_class() const noexcept { return class_; }

  Direction in_chart(const ChartPtr& target) const {
    Event moved = anchor_.in_chart(target);
    const Vec2 c = push_components(anchor_, comps_, *target);
    return of_class(std::move(moved), c, class_);
  }

 private:
  Direction(Event anchor, Vec2 comps, CausalClass cls) : anchor_(std::move(anchor)), comps_(comps), class_(cls) {}

  Event anchor_;
  Vec2 comps_;
  CausalClass class_;
};

// Orthonormal frame at an event: t_hat timelike, x_hat spacelike, with x_hat
// pointing toward increasing chart space parameter.
struct LocalGrid {
  Event anchor;
  Direction t_hat;
  Direction x_hat;
};

// Unit spacelike vector orthogonal to a future timelike direction, oriented
// toward increasing space parameter.
inline Direction orthonormal_completion(const Direction& t_hat) {
  require(t_hat.causal_class() == CausalClass::timelike, ErrorCode::invalid_argument,
          "completion needs a timelike direction");
  const Event& a = t_hat.anchor();
  const auto g = a.chart()->metric(a.point());
  const Vec2 u = t_hat.components();
  Vec2 x{g.gxx * u.x, -g.gtt * u.t};
  if (x.x < 0.0) x = -x;
  return Direction::spacelike(a, x);
}

inline LocalGrid grid_from_time_direction(const Direction& t_hat) {
  return {t_hat.anchor(), t_hat, orthonormal_completion(t_hat)};
}

// Frame aligned with the chart parameters at an event; chart-dependent, kept
// for comparisons against chart-axis derivatives.
inline LocalGrid chart_rest_grid(const Event& a) { return grid_from_time_direction(Direction::chart_rest(a)); }

inline LocalGrid grid_in_chart(const LocalGrid& grid, const ChartPtr& target) {
  return {grid.anchor.in_chart(target), grid.t_hat.in_chart(target), grid.x_hat.in_chart(target)};
}

// --- intervals --------------------------------------------------------------

namespace detail {

// Deterministic chart and endpoint order so the result is symmetric.
inline std::pair<Vec2, Vec2> canonical_pair(Vec2 p, Vec2 q) {
  if (p.t < q.t || (p.t == q.t && p.x <= q.x)) return {p, q};
  return {q, p};
}

inline const ChartPtr& common_chart(const Event& a, const Event& b) {
  require_same_root(*a.chart(), *b.chart());
  if (a.chart() == b.chart()) return a.chart();
  return a.chart()->id() <= b.chart()->id() ? a.chart() : b.chart();
}

}  // namespace detail

inline IntervalSq interval_squared(const Event& a, const Event& b) {
  const ChartPtr& chart = detail::common_chart(a, b);
  const auto [p, q] = detail::canonical_pair(a.point_in(*chart), b.point_in(*chart));
  const Vec2 d = q - p;
  if (chart->is_minkowski()) return {-d.t * d.t + d.x * d.x};
  if (max_abs(d) == 0.0) return {0.0};
  const Vec2 v = detail::shoot(*chart, p, q);
  return {chart->metric(p).norm2(v)};
}

inline CausalClass classify_relation(const Event& a, const Event& b) {
  const double s2 = interval_squared(a, b).value;
  const ChartPtr& chart = detail::common_chart(a, b);
  const Vec2 d = b.point_in(*chart) - a.point_in(*chart);
  return classify_value(s2, max_abs(d) * max_abs(d));
}

// True when b lies in the closed future cone of a (b == a included).
inline bool in_closed_future(const Event& a, const Event& b) {
  const ChartPtr& chart = detail::common_chart(a, b);
  const Vec2 pa = a.point_in(*chart), pb = b.point_in(*chart);
  if (max_abs(pb - pa) <= 1e-12 * std::max(1.0, max_abs(pa))) return true;
  if (pb.t < pa.t) return false;
  return classify_relation(a, b) != CausalClass::spacelike;
}

inline bool in_closed_past(const Event& a, const Event& b) { return in_closed_future(b, a); }

// --- neighborhoods -----------------------------------------------------------

struct Neighborhood {
  Event center;  // a
  double delta;  // squared-interval scale
  Event b;       // forward along the time direction
  Event b_prime; // backward along the time direction
  Event c;       // -x side
  Event c_prime; // +x side
};

// Neighborhood of a cut out by the backward cone of b and the forward cone of
// b', where ab = ab' = -delta along time_dir.
inline Neighborhood build_neighborhood(const Event& a, const Direction& time_dir, double delta) {
  require(delta > 0.0 && std::isfinite(delta), ErrorCode::invalid_argument, "delta must be positive");
  require(time_dir.causal_class() == CausalClass::timelike, ErrorCode::invalid_argument,
          "neighborhood needs a timelike direction");
  const Direction u = time_dir.anchor().chart() == a.chart() ? time_dir : time_dir.in_chart(a.chart());
  require(approx_equal(u.anchor(), a), ErrorCode::invalid_argument, "time direction must be anchored at the center");
  const double h = std::sqrt(delta);
  const Vec2 p = a.point();
  const Vec2 ut = u.components();
  const ChartPtr& chart = a.chart();
  if (chart->is_minkowski()) {
    const Vec2 ux = orthonormal_completion(u).components();
    return {a, delta, Event(chart, p + ut * h), Event(chart, p - ut * h), Event(chart, p - ux * h),
            Event(chart, p + ux * h)};
  }
  Vec2 pb, pbp;
  try {
    const auto yb = detail::exp_map(*chart, p, ut * h);
    const auto ybp = detail::exp_map(*chart, p, ut * -h);
    pb = {yb[0], yb[1]};
    pbp = {ybp[0], ybp[1]};
  } catch (const Error& e) {
    fail(ErrorCode::scale_too_coarse, std::string("time steps leave the chart: ") + e.what());
  }
  const Vec2 pc_prime = detail::cone_intersection(*chart, pbp, pb, +1);
  const Vec2 pc = detail::cone_intersection(*chart, pbp, pb, -1);
  return {a, delta, Event(chart, pb), Event(chart, pbp), Event(chart, pc), Event(chart, pc_prime)};
}

// --- boosts and index gymnastics -----------------------------------------------

inline Direction boost_direction(const Direction& d, double beta) {
  require(std::abs(beta) < 1.0, ErrorCode::superluminal_boost, "|beta| must be below 1");
  const Event& a = d.anchor();
  const auto g = a.chart()->metric(a.point());
  const double st = std::sqrt(-g.gtt), sx = std::sqrt(g.gxx);
  const Vec2 c = d.components();
  const Vec2 frame{c.t * st, c.x * sx};
  const double gamma = 1.0 / std::sqrt(1.0 - beta * beta);
  const Vec2 boosted{gamma * (frame.t + beta * frame.x), gamma * (beta * frame.t + frame.x)};
  return Direction::of_class(a, {boosted.t / st, boosted.x / sx}, d.causal_class());
}

inline Direction boost_direction_by_rapidity(const Direction& d, double rapidity) {
  return boost_direction(d, std::tanh(rapidity));
}

inline Covector lower_index(const Vector& v) {
  const auto g = v.anchor.chart()->metric(v.anchor.point());
  return {v.anchor, {g.gtt * v.comps.t, g.gxx * v.comps.x}};
}

inline Covector lower_index(const Direction& d) { return lower_index(Vector{d.anchor(), d.components()}); }

inline Vector raise_index(const Covector& w) {
  const auto g = w.anchor.chart()->metric(w.anchor.point());
  return {w.anchor, {w.comps.t / g.gtt, w.comps.x / g.gxx}};
}

// Rapidity of a timelike direction relative to the chart-rest frame.
inline double rapidity_of(const Direction& d) {
  const Event& a = d.anchor();
  const auto g = a.chart()->metric(a.point());
  const Vec2 c = d.components();
  return std::atanh(c.x * std::sqrt(g.gxx) / (c.t * std::sqrt(-g.gtt)));
}

// --- regional symmetry --------------------------------------------------------

struct ConservationReport {
  bool energy_conserved;
  bool momentum_conserved;
};

// Samples the metric coefficients on an n x n lattice over region; energy is
// conserved when they do not vary with the time parameter, momentum when they
// do not vary with the space parameter.
inline ConservationReport metric_symmetry_report(const Chart& chart, const Region& region, int samples = 9,
                                                 double tol = 1e-12) {
  if (chart.is_minkowski()) return {true, true};
  require(samples >= 2, ErrorCode::invalid_argument, "need at least two samples per axis");
  require(std::isfinite(region.t_min) && std::isfinite(region.t_max) && std::isfinite(region.x_min) &&
              std::isfinite(region.x_max),
          ErrorCode::invalid_argument, "region must be bounded");
  std::vector<std::vector<MetricCoefficients>> grid(samples, std::vector<MetricCoefficients>(samples));
  for (int i = 0; i < samples; ++i) {
    for (int j = 0; j < samples; ++j) {
      const double t = region.t_min + (region.t_max - region.t_min) * i / (samples - 1);
      const double x = region.x_min + (region.x_max - region.x_min) * j / (samples - 1);
      grid[i][j] = chart.metric({t, x});
    }
  }
  auto close = [tol](const MetricCoefficients& p, const MetricCoefficients& q) {
    return std::abs(p.gtt - q.gtt) <= tol * std::max(1.0, std::abs(p.gtt)) &&
           std::abs(p.gxx - q.gxx) <= tol * std::max(1.0, std::abs(p.gxx));
  };
  bool energy = true, momentum = true;
  for (int i = 0; i < samples; ++i) {
    for (int j = 0; j < samples; ++j) {
      energy = energy && close(grid[i][j], grid[0][j]);
      momentum = momentum && close(grid[i][j], grid[i][0]);
    }
  }
  return {energy, momentum};
}

}  // namespace transcoord
