#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "transcoord/chart.hpp"
#include "transcoord/error.hpp"
#include "transcoord/geometry.hpp"
#include "transcoord/numeric.hpp"
#include "transcoord/wavepacket.hpp"

namespace transcoord {

// Relative density below which the flow direction is undefined.
inline constexpr double kDensityFloor = 1e-12;

// Conserved current as a home-chart vector (density, current).
inline Vec2 current_vector(const WaveFunction& phi, Vec2 home_p) {
  const auto dc = phi.density_current_at(home_p);
  return {dc.rho, dc.j};
}

// Unit timelike direction of the probability flow at a, in a's chart.
inline Direction flow_direction(const WaveFunction& phi, const Event& a) {
  const Vec2 p = phi.home_point(a);
  const Vec2 J = current_vector(phi, p);
  const double floor = kDensityFloor * phi.peak_density(p.t);
  require(J.t > floor, ErrorCode::vanishing_density, "density below the floor; flow direction undefined");
  require(J.t > std::abs(J.x), ErrorCode::spacelike_current, "current is not timelike at this event");
  const Direction home_dir = Direction::timelike(Event(phi.home(), p), J);
  return a.chart() == phi.home() ? home_dir : home_dir.in_chart(a.chart());
}

// Density measured in the flow's own frame: sqrt(-J.J).
inline double rest_density(const WaveFunction& phi, const Event& a) {
  const Vec2 J = current_vector(phi, phi.home_point(a));
  const double n2 = J.t * J.t - J.x * J.x;
  require(n2 >= 0.0, ErrorCode::spacelike_current, "current is not timelike at this event");
  return std::sqrt(n2);
}

// Tangent of the streamline through a, (1, j / rho) in the home chart,
// expressed in a's chart. Unlike flow_direction it accepts superluminal
// flow, which Schroedinger tails produce.
inline Vec2 streamline_tangent(const WaveFunction& phi, const Event& a) {
  const Vec2 p = phi.home_point(a);
  const Vec2 J = current_vector(phi, p);
  require(J.t > kDensityFloor * phi.peak_density(p.t), ErrorCode::vanishing_density,
          "density below the floor; flow direction undefined");
  const Vec2 v{1.0, J.x / J.t};
  return a.chart() == phi.home() ? v : push_components(Event(phi.home(), p), v, *a.chart());
}

inline LocalGrid local_grid(const WaveFunction& phi, const Event& a) {
  return grid_from_time_direction(flow_direction(phi, a));
}

// --- flux integrals ---------------------------------------------------------------

namespace detail {

// Adaptive Gauss-Kronrod that also stops once the error estimate falls under
// an absolute floor. Spectral sums carry roundoff noise of fixed size, so a
// purely relative test would bisect the far tails to the depth limit.
template <class F>
double integrate_to_floor(const F& f, double a, double b, double abs_floor, int depth = 10) {
  double err = 0.0, l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err, &l1);
  if (depth == 0 || err <= std::max(1e-14 * l1, abs_floor)) return v;
  const double m = 0.5 * (a + b);
  return integrate_to_floor(f, a, m, 0.5 * abs_floor, depth - 1) +
         integrate_to_floor(f, m, b, 0.5 * abs_floor, depth - 1);
}

// Probability crossing the straight home-chart segment p -> q, counted
// positive when the flow passes from its left to its right.
inline double flux_across_segment(const WaveFunction& phi, Vec2 p, Vec2 q) {
  const Vec2 d = q - p;
  if (max_abs(d) == 0.0) return 0.0;
  auto f = [&](double s) {
    const auto dc = phi.density_current_swept(p + d * s);
    return dc.rho * d.x - dc.j * d.t;
  };
  const double floor = 1e-15 * phi.peak_density(0.5 * (p.t + q.t)) * max_abs(d);
  return integrate_to_floor(f, 0.0, 1.0, floor);
}

inline double support_scale(const WaveFunction& phi, double t) {
  const auto s = phi.support(t);
  require(s.has_value(), ErrorCode::non_normalizable, "plane waves carry infinite probability");
  return s->length();
}

// Flux across the ray p + s dir for s from 0 outward (sign = +1) or from
// -infinity up to 0 (sign = -1), chunked until the ray leaves the support.
inline double flux_along_ray(const WaveFunction& phi, Vec2 p, Vec2 dir, int sign) {
  const double chunk = support_scale(phi, p.t) / 48.0;
  double total = 0.0;
  Vec2 cur = p;
  for (int n = 0; n < 100000; ++n) {
    const Vec2 next = cur + dir * (sign * chunk);
    const double piece = sign > 0 ? flux_across_segment(phi, cur, next) : flux_across_segment(phi, next, cur);
    total += piece;
    cur = next;
    const auto s = phi.support(cur.t);
    const bool beyond = sign > 0 ? cur.x > s->hi : cur.x < s->lo;
    if (beyond) return total;
  }
  fail(ErrorCode::non_normalizable, "perpendicular never leaves the packet support");
}

}  // namespace detail

// Probability on the -x side of the partition line through a. Klein-Gordon
// packets are cut along the perpendicular to the flow. Schroedinger packets
// spread without a speed limit, so a tilted perpendicular can stay inside
// the packet forever; they are cut along the home-chart time slice instead.
inline double fraction_at(const WaveFunction& phi, const Event& a) {
  require(phi.normalizable(), ErrorCode::non_normalizable, "plane waves have no fraction");
  const Event home_a = a.in_chart(phi.home());
  if (phi.principle().kind == Principle::schroedinger)
    return detail::flux_along_ray(phi, home_a.point(), Vec2{0.0, 1.0}, -1);
  const Direction x_hat = orthonormal_completion(flow_direction(phi, home_a));
  return detail::flux_along_ray(phi, home_a.point(), x_hat.components(), -1);
}

// Probability crossing any spacelike curve from a to b; by conservation it
// depends only on the partition lines through the end points.
inline double fraction_between(const WaveFunction& phi, const Event& a, const Event& b) {
  return detail::flux_across_segment(phi, phi.home_point(a), phi.home_point(b));
}

// --- partition lines ------------------------------------------------------------------

struct PartitionLine {
  std::optional<double> fraction;
  ChartPtr chart;
  double t_first{0.0};
  double dt{0.0};
  std::vector<Event> samples;       // at chart times t_first + i dt
  std::vector<double> proper_time;  // along the line, zero at the seed
  bool truncated{false};
  std::string truncation_reason;

  double t_last() const noexcept { return t_first + dt * static_cast<double>(samples.size() - 1); }

  bool covers(double t) const noexcept {
    if (samples.size() < 4) return false;
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    return t >= t_first - tol && t <= t_last() + tol;
  }

  // Event on the line at chart time t (cubic interpolation of samples).
  Event crossing(double t) const {
    require(covers(t), ErrorCode::line_truncated, "partition line does not reach the requested time");
    const auto n = static_cast<long>(samples.size());
    const double s = (t - t_first) / dt;
    const long i = std::clamp(static_cast<long>(std::floor(s)), 1L, n - 3);
    const double local = s - static_cast<double>(i);
    const std::array<double, 4> xs{samples[i - 1].point().x, samples[i].point().x, samples[i + 1].point().x,
                                   samples[i + 2].point().x};
    return Event(chart, t, detail::cubic_lagrange<double>(xs, local).first);
  }
};

namespace detail {

using LineState = std::array<double, 2>;  // space parameter, proper time

inline constexpr double kStreamlineTolerance = 1e-11;

}  // namespace detail

// Streamline of the flow through seed, integrated in the seed chart's time
// over t_range with `samples` equal steps. Stops early (and says so) when the
// flow direction becomes undefined.
inline PartitionLine trace_partition_line(const WaveFunction& phi, const Event& seed, Interval t_range,
                                          int samples = 201) {
  require(samples >= 4, ErrorCode::invalid_argument, "need at least four samples");
  require(t_range.hi > t_range.lo, ErrorCode::invalid_argument, "empty time range");
  const ChartPtr& chart = seed.chart();
  const Vec2 s0 = seed.point();
  require(s0.t >= t_range.lo && s0.t <= t_range.hi, ErrorCode::invalid_argument, "seed outside the time range");

  PartitionLine line;
  line.chart = chart;
  line.dt = t_range.length() / (samples - 1);
  std::vector<double> grid(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) grid[static_cast<std::size_t>(i)] = t_range.lo + line.dt * i;

  auto rhs = [&](const detail::LineState& y, detail::LineState& dy, double t) {
    const Vec2 c = streamline_tangent(phi, Event(chart, t, y[0]));
    const double v = c.x / c.t;
    const auto g = chart->metric({t, y[0]});
    dy[0] = v;
    dy[1] = std::sqrt(std::max(0.0, -(g.gtt + g.gxx * v * v)));
  };

  namespace odeint = boost::numeric::odeint;
  auto run = [&](std::vector<double> times, std::vector<std::pair<double, detail::LineState>>& out) {
    if (times.size() < 2) return std::string{};
    detail::LineState y{s0.x, 0.0};
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<detail::LineState>>(
        detail::kStreamlineTolerance, detail::kStreamlineTolerance);
    const double step = (times[1] - times[0]) / 4.0;
    try {
      odeint::integrate_times(stepper, rhs, y, times.begin(), times.end(), step,
                              [&](const detail::LineState& st, double t) { out.emplace_back(t, st); });
    } catch (const Error& e) {
      return std::string(e.what());
    } catch (const std::exception& e) {
      return std::string("integration stalled: ") + e.what();
    }
    return std::string{};
  };

  std::vector<double> fwd{s0.t}, bwd{s0.t};
  bool seed_on_grid = false;
  for (double t : grid) {
    if (t > s0.t) fwd.push_back(t);
    if (t < s0.t) bwd.push_back(t);
    if (t == s0.t) seed_on_grid = true;
  }
  std::reverse(bwd.begin() + 1, bwd.end());
  std::vector<std::pair<double, detail::LineState>> ahead, behind;
  const std::string why_f = run(fwd, ahead);
  const std::string why_b = run(bwd, behind);
  if (!ahead.empty()) ahead.erase(ahead.begin());
  if (!behind.empty()) behind.erase(behind.begin());
  std::reverse(behind.begin(), behind.end());
  if (seed_on_grid && why_b.empty()) behind.emplace_back(s0.t, detail::LineState{s0.x, 0.0});
  std::vector<std::pair<double, detail::LineState>> all = behind;
  all.insert(all.end(), ahead.begin(), ahead.end());
  line.truncated = !why_f.empty() || !why_b.empty() || static_cast<int>(all.size()) < samples;
  line.truncation_reason = !why_b.empty() ? why_b : why_f;
  if (line.truncated && line.truncation_reason.empty()) line.truncation_reason = "integration ended early";
  line.t_first = all.empty() ? s0.t : all.front().first;
  for (const auto& [t, st] : all) {
    line.samples.emplace_back(chart, t, st[0]);
    line.proper_time.push_back(st[1]);
  }
  if (phi.normalizable()) line.fraction = fraction_at(phi, seed);
  return line;
}

// Seed on the chart slice at time t whose fraction equals f.
inline Event seed_for_fraction(const WaveFunction& phi, double f, double t, const ChartPtr& chart) {
  require(f > 0.0 && f < 1.0, ErrorCode::invalid_argument, "fraction must lie in (0, 1)");
  require(phi.normalizable(), ErrorCode::non_normalizable, "plane waves have no fraction");
  const auto supp = phi.support(0.0);
  Vec2 guess{t, 0.5 * (supp->lo + supp->hi)};
  if (chart != phi.home()) guess = Event(phi.home(), guess).point_in(*chart);
  guess.t = t;
  const double step0 = detail::support_scale(phi, 0.0) / 24.0;
  auto g = [&](double x) { return fraction_at(phi, Event(chart, t, x)) - f; };
  const double g0 = g(guess.x);
  // Orientation of the chart's space parameter relative to the flow.
  const double probe = g(guess.x + 1e-3 * step0);
  const double dir = (probe >= g0) ? 1.0 : -1.0;
  const double heading = g0 < 0.0 ? dir : -dir;
  double a = guess.x, ga = g0, step = step0;
  double b = a + heading * step, gb = g(b);
  for (int n = 0; n < 200 && (ga < 0.0) == (gb < 0.0); ++n) {
    a = b;
    ga = gb;
    step *= 1.5;
    b = a + heading * step;
    gb = g(b);
  }
  require((ga < 0.0) != (gb < 0.0), ErrorCode::invalid_argument, "fraction not bracketed on the slice");
  if (a > b) {
    std::swap(a, b);
    std::swap(ga, gb);
  }
  std::uintmax_t iters = 200;
  const auto [lo, hi] =
      boost::math::tools::toms748_solve(g, a, b, ga, gb, boost::math::tools::eps_tolerance<double>(48), iters);
  return Event(chart, t, 0.5 * (lo + hi));
}

// Partition line carrying fraction f, seeded on the slice at chart time t_seed.
inline PartitionLine trace_fraction_line(const WaveFunction& phi, double f, double t_seed, Interval t_range,
                                         const ChartPtr& chart, int samples = 201) {
  return trace_partition_line(phi, seed_for_fraction(phi, f, t_seed, chart), t_range, samples);
}

// Largest change over `times` of the probability between the two lines.
inline double fraction_conservation_check(const WaveFunction& phi, const PartitionLine& line1,
                                          const PartitionLine& line2, const std::vector<double>& times) {
  require(!times.empty(), ErrorCode::invalid_argument, "no times given");
  for (double t : times) {
    require(line1.covers(t) && line2.covers(t), ErrorCode::line_truncated,
            "partition line does not cover t=" + std::to_string(t));
  }
  double first = 0.0, drift = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double f = fraction_between(phi, line1.crossing(times[i]), line2.crossing(times[i]));
    if (i == 0) first = f;
    drift = std::max(drift, std::abs(f - first));
  }
  return drift;
}

// --- minimal-probability direction ------------------------------------------------------

struct MinProbabilityDirection {
  Direction direction;
  double rapidity;  // relative to the home chart's rest frame
  bool degenerate;
};

// Probability content of the spacelike diameter c c' of the neighborhood of
// a built along the home-chart direction of the given rapidity.
inline double neighborhood_probability(const WaveFunction& phi, const Event& home_a, double rapidity, double delta) {
  const Direction rest = Direction::chart_rest(home_a);
  const Neighborhood n = build_neighborhood(home_a, boost_direction_by_rapidity(rest, rapidity), delta);
  return fraction_between(phi, n.c, n.c_prime);
}

inline MinProbabilityDirection min_probability_direction(const WaveFunction& phi, const Event& a, double delta,
                                                         double max_rapidity = 3.0) {
  const Event home_a = a.in_chart(phi.home());
  auto obj = [&](double eta) { return neighborhood_probability(phi, home_a, eta, delta); };
  const auto [eta, value] = boost::math::tools::brent_find_minima(obj, -max_rapidity, max_rapidity, 40);
  const double edge = std::max(obj(-max_rapidity), obj(max_rapidity));
  const bool degenerate = !(edge - value > 1e-12 * std::max(std::abs(edge), 1e-300));
  if (degenerate) {
    const Direction flow = flow_direction(phi, a);
    return {flow, rapidity_of(flow_direction(phi, home_a)), true};
  }
  const Direction best = boost_direction_by_rapidity(Direction::chart_rest(home_a), eta);
  return {a.chart() == phi.home() ? best : best.in_chart(a.chart()), eta, false};
}

// --- internal coordinates ---------------------------------------------------------------

// Coordinates built from the flow: time is proper time along the streamline
// through an event, counted from where it crosses the perpendicular through
// the origin; space is metric arc length along that perpendicular.
// Schroedinger packets get the Galilean version: the home-chart time slice
// through the origin replaces the perpendicular and elapsed home time
// replaces proper time.
class InternalChart {
 public:
  InternalChart(const WaveFunction& phi, const Event& origin)
      : phi_(phi), origin_(origin), o_(origin.point_in(*phi.home())),
        galilean_(phi.principle().kind == Principle::schroedinger) {
    if (galilean_) {
      streamline_tangent(phi_, Event(phi_.home(), o_));
      t0_ = {1.0, 0.0};
      x0_ = {0.0, 1.0};
    } else {
      const Direction t_hat = flow_direction(phi_, Event(phi_.home(), o_));
      t0_ = t_hat.components();
      x0_ = orthonormal_completion(t_hat).components();
    }
  }

  bool galilean() const noexcept { return galilean_; }

  const Event& origin() const noexcept { return origin_; }

  // Event on the perpendicular at arc length sigma, carried along its
  // streamline for proper time tau.
  Event event_at(double tau, double sigma) const {
    Vec2 p = o_ + x0_ * sigma;
    p = flow(p, tau);
    return Event(phi_.home(), p).in_chart(origin_.chart());
  }

  std::pair<double, double> coordinates(const Event& e) const {
    Vec2 p = e.point_in(*phi_.home());
    const double s0 = frame_time(p);
    if (s0 == 0.0) return {0.0, frame_space(p)};
    // Walk back toward the perpendicular in chunks, then refine the crossing.
    const double chunk = std::max(std::abs(s0), 1e-6);
    const double dir = s0 > 0.0 ? -1.0 : 1.0;
    double tau = 0.0;
    Vec2 cur = p;
    for (int n = 0; n < 10000; ++n) {
      const Vec2 next = flow(cur, dir * chunk);
      if ((frame_time(next) > 0.0) != (s0 > 0.0) || frame_time(next) == 0.0) {
        auto g = [&](double h) { return frame_time(flow(cur, dir * h)); };
        std::uintmax_t iters = 200;
        const double g_lo = frame_time(cur), g_hi = frame_time(next);
        double h;
        if (g_hi == 0.0) {
          h = chunk;
        } else {
          const auto [lo, hi] = boost::math::tools::toms748_solve(g, 0.0, chunk, g_lo, g_hi,
                                                                  boost::math::tools::eps_tolerance<double>(50), iters);
          h = 0.5 * (lo + hi);
        }
        const Vec2 q = flow(cur, dir * h);
        tau += h;
        return {-dir * tau, frame_space(q)};
      }
      tau += chunk;
      cur = next;
    }
    fail(ErrorCode::line_truncated, "streamline never reaches the origin's perpendicular");
  }

  double t_of(const Event& e) const { return coordinates(e).first; }
  double x_of(const Event& e) const { return coordinates(e).second; }

  Complex phi_at(double tau, double sigma) const { return phi_.evaluate(event_at(tau, sigma)); }

  // Probability per unit arc length crossing the perpendicular at sigma.
  double density_on_perpendicular(double sigma) const {
    const auto dc = phi_.density_current_swept(o_ + x0_ * sigma);
    return dc.rho * x0_.x - dc.j * x0_.t;
  }

  // Integral of the perpendicular density over its whole length.
  double total_normalization() const {
    return detail::flux_along_ray(phi_, o_, x0_, -1) + detail::flux_along_ray(phi_, o_, x0_, +1);
  }

 private:
  using State = std::array<double, 2>;

  // Time and space of p in the origin's rest frame (home chart is flat).
  double frame_time(Vec2 p) const {
    const Vec2 d = p - o_;
    return d.t * t0_.t - d.x * t0_.x;
  }
  double frame_space(Vec2 p) const {
    const Vec2 d = p - o_;
    return -d.t * x0_.t + d.x * x0_.x;
  }

  Vec2 flow(Vec2 p, double tau) const {
    if (tau == 0.0) return p;
    namespace odeint = boost::numeric::odeint;
    State y{p.t, p.x};
    auto rhs = [&](const State& s, State& ds, double) {
      const Event e(phi_.home(), s[0], s[1]);
      const Vec2 u = galilean_ ? streamline_tangent(phi_, e) : flow_direction(phi_, e).components();
      ds[0] = u.t;
      ds[1] = u.x;
    };
    try {
      detail::integrate_span(rhs, y, 0.0, tau, detail::kStreamlineTolerance);
    } catch (const Error& e) {
      fail(ErrorCode::line_truncated, std::string("streamline ends: ") + e.what());
    }
    return {y[0], y[1]};
  }

  WaveFunction phi_;
  Event origin_;
  Vec2 o_;
  bool galilean_;
  Vec2 t0_;
  Vec2 x0_;
};

inline InternalChart build_internal_chart(const WaveFunction& phi, const Event& origin) {
  return InternalChart(phi, origin);
}

}  // namespace transcoord
