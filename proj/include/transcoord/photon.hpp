#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "transcoord/chart.hpp"
#include "transcoord/differentials.hpp"
#include "transcoord/error.hpp"
#include "transcoord/geometry.hpp"
#include "transcoord/numeric.hpp"

namespace transcoord {

enum class Heading { left, right };

inline const char* to_string(Heading h) noexcept { return h == Heading::left ? "left" : "right"; }

// Relative phase pi(u) = offset + rate * u of one component, where u labels
// the light lines of the photon's heading.
struct PhaseComponent {
  Complex weight{1.0, 0.0};
  double offset{0.0};
  double rate{1.0};
};

// A light line of a given heading, identified by an event on it.
struct LightLine {
  Event through;
  Heading heading;
};

// Gridless photon: relative phases constant along light lines of one heading,
// over a band of light lines. It has no frequency or momentum of its own;
// those exist only relative to a local grid (see grid_relative_kinematics).
class PhotonPhaseField {
 public:
  PhotonPhaseField(Heading heading, std::vector<PhaseComponent> components, Interval band,
                   ChartPtr home = Chart::standard())
      : heading_(heading), components_(std::move(components)), band_(band), home_(std::move(home)) {
    require(!components_.empty(), ErrorCode::invalid_argument, "photon needs at least one phase component");
    require(band_.hi >= band_.lo, ErrorCode::invalid_argument, "empty light-line band");
    require(home_ != nullptr && home_->is_minkowski(), ErrorCode::invalid_argument, "photons live on a flat chart");
  }

  Heading heading() const noexcept { return heading_; }
  const std::vector<PhaseComponent>& components() const noexcept { return components_; }
  Interval band() const noexcept { return band_; }
  const ChartPtr& home() const noexcept { return home_; }

  // Light-line label of an event for this photon's heading.
  double line_label(const Event& e) const {
    const Vec2 p = e.point_in(*home_);
    return heading_ == Heading::right ? p.t - p.x : p.t + p.x;
  }

  bool in_band(const Event& e) const {
    const double u = line_label(e);
    const double tol = 1e-12 * std::max(1.0, std::abs(u));
    return u >= band_.lo - tol && u <= band_.hi + tol;
  }

  double phase(std::size_t component, const Event& e) const {
    const auto& c = components_.at(component);
    return c.offset + c.rate * line_label(e);
  }

 private:
  Heading heading_;
  std::vector<PhaseComponent> components_;
  Interval band_;
  ChartPtr home_;
};

// Summed phase step between two light lines of the photon.
inline double relative_phase_difference(const PhotonPhaseField& photon, const LightLine& l1, const LightLine& l2) {
  require(l1.heading == photon.heading() && l2.heading == photon.heading(), ErrorCode::direction_mismatch,
          "light lines must share the photon's heading");
  require(photon.in_band(l1.through) && photon.in_band(l2.through), ErrorCode::outside_band,
          "light line outside the photon band");
  double d = 0.0;
  for (std::size_t i = 0; i < photon.components().size(); ++i)
    d += photon.phase(i, l2.through) - photon.phase(i, l1.through);
  return d;
}

struct GridRelativeKinematics {
  double e_gamma;
  double p_gamma;
  std::vector<double> omega;  // per component
  std::vector<double> k;
  LocalGrid grid;
};

// Phase rates of each component along the grid axes, taken as limits over
// neighborhoods of the anchor: omega = d(pi)/d(t_hat), k = -d(pi)/d(x_hat).
inline GridRelativeKinematics grid_relative_kinematics(const PhotonPhaseField& photon, const LocalGrid& grid,
                                                       const Event& a,
                                                       const LimitSchedule& sched = LimitSchedule::geometric(1e-2,
                                                                                                             0.25, 3,
                                                                                                             1)) {
  require(approx_equal(grid.anchor, a, 1e-12), ErrorCode::grid_event_mismatch, "grid is not anchored at the event");
  require(photon.in_band(a), ErrorCode::outside_band, "event outside the photon band");
  GridRelativeKinematics out{0.0, 0.0, {}, {}, grid};
  for (std::size_t i = 0; i < photon.components().size(); ++i) {
    auto pi = [&](const Event& e) { return photon.phase(i, e); };
    const double w = directional_limit(pi, grid, Axis::time, sched).value.real();
    const double k = -directional_limit(pi, grid, Axis::space, sched).value.real();
    out.omega.push_back(w);
    out.k.push_back(k);
    out.e_gamma += w;
    out.p_gamma += k;
  }
  return out;
}

namespace detail {

// Rapidity of a grid's time axis in the flat root chart.
inline double root_rapidity(const LocalGrid& g) {
  const Chart* root = g.anchor.chart()->root();
  require(root->is_minkowski(), ErrorCode::requires_flat_region, "grid does not sit in a flat region");
  const Vec2 u = detail::jacobian_to_root(*g.anchor.chart(), g.anchor.point()) * g.t_hat.components();
  return std::atanh(u.x / u.t);
}

}  // namespace detail

// Frequency seen on grid_b over frequency seen on grid_a for a photon of the
// given heading: sqrt((1 - beta) / (1 + beta)) for recession speed beta.
inline double doppler_ratio(const LocalGrid& grid_a, const LocalGrid& grid_b, Heading heading) {
  require(grid_a.anchor.comparable(grid_b.anchor), ErrorCode::requires_flat_region,
          "grids do not share a flat region");
  const double rel = detail::root_rapidity(grid_b) - detail::root_rapidity(grid_a);
  return std::exp(heading == Heading::right ? -rel : rel);
}

// Closed form for a recession speed beta along the photon heading.
inline double doppler_factor(double beta) {
  require(std::abs(beta) < 1.0, ErrorCode::superluminal_boost, "|beta| must be below 1");
  return std::sqrt((1.0 - beta) / (1.0 + beta));
}

// --- Huygens wavelets ------------------------------------------------------------

struct WaveletSource {
  Event event;
  double phase{0.0};
  double intensity{1.0};
};

struct Superposed {
  double relative_phase;
  double intensity;
  Complex amplitude;
};

// Coherent sum at target of scalar wavelets from each source whose forward
// cone reaches it; phase advances by wavenumber times path length.
inline Superposed huygens_superpose(const std::vector<WaveletSource>& sources, const Event& target,
                                    double wavenumber) {
  Complex sum{};
  bool any = false;
  for (const auto& s : sources) {
    require(s.intensity >= 0.0, ErrorCode::invalid_argument, "negative intensity");
    const ChartPtr& chart = s.event.chart();
    require(chart->root()->is_minkowski(), ErrorCode::requires_flat_region, "wavelets need a flat region");
    const Vec2 p = s.event.point_in(*chart->root()), q = target.point_in(*chart->root());
    const double path = std::abs(q.x - p.x);
    if (q.t - p.t < path * (1.0 - 1e-12)) continue;
    any = true;
    sum += std::sqrt(s.intensity) * std::polar(1.0, s.phase + wavenumber * path);
  }
  require(any, ErrorCode::not_reachable, "target lies outside every forward cone");
  return {std::arg(sum), std::norm(sum), sum};
}

// Planar screen geometry: sources and target are points of a plane, the
// wavelets have already arrived (steady state).
struct PlanarSource {
  double x;
  double y;
  double phase{0.0};
  double intensity{1.0};
};

inline Superposed huygens_superpose_planar(const std::vector<PlanarSource>& sources, double x, double y,
                                           double wavenumber) {
  require(!sources.empty(), ErrorCode::not_reachable, "no sources");
  Complex sum{};
  for (const auto& s : sources) {
    require(s.intensity >= 0.0, ErrorCode::invalid_argument, "negative intensity");
    const double path = std::hypot(x - s.x, y - s.y);
    sum += std::sqrt(s.intensity) * std::polar(1.0, s.phase + wavenumber * path);
  }
  return {std::arg(sum), std::norm(sum), sum};
}

// Two slits at (0, +-d/2) and a screen at distance L; intensity at transverse
// offset y.
inline double two_slit_intensity(double d, double screen, double wavelength, double y) {
  const double k = 2.0 * std::numbers::pi / wavelength;
  return huygens_superpose_planar({{0.0, d / 2}, {0.0, -d / 2}}, screen, y, k).intensity;
}

// --- emission directions ---------------------------------------------------------

struct EmissionWeights {
  std::array<double, 2> weight{0.5, 0.5};  // left, right

  void validate() const {
    require(weight[0] >= 0.0 && weight[1] >= 0.0 && std::abs(weight[0] + weight[1] - 1.0) <= 1e-12,
            ErrorCode::not_normalized, "emission weights must be non-negative and sum to one");
  }
};

inline double solid_angle_probability(const EmissionWeights& w, Heading heading) {
  w.validate();
  return w.weight[heading == Heading::left ? 0 : 1];
}

}  // namespace transcoord
