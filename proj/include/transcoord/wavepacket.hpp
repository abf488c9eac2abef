#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <fftw3.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "transcoord/chart.hpp"
#include "transcoord/error.hpp"
#include "transcoord/numeric.hpp"

namespace transcoord {

enum class Principle { schroedinger, klein_gordon };

struct DynamicPrinciple {
  Principle kind{Principle::schroedinger};
  double mass{1.0};

  static DynamicPrinciple schroedinger(double m) { return make(Principle::schroedinger, m); }
  static DynamicPrinciple klein_gordon(double m) { return make(Principle::klein_gordon, m); }

  // Dispersion relation of free plane waves.
  double omega(double k) const {
    return kind == Principle::schroedinger ? k * k / (2.0 * mass) : std::sqrt(k * k + mass * mass);
  }

 private:
  static DynamicPrinciple make(Principle p, double m) {
    require(m > 0.0 && std::isfinite(m), ErrorCode::invalid_argument, "mass must be positive");
    return {p, m};
  }
};

inline bool operator==(const DynamicPrinciple& a, const DynamicPrinciple& b) {
  return a.kind == b.kind && a.mass == b.mass;
}

struct DensityCurrent {
  double rho;
  double j;
};

enum class Axis { time, space };

class WaveFunction;
using WaveFunctionPtr = std::shared_ptr<const WaveFunction>;

struct PlaneWave {
  double k;
  double omega;
};

struct GaussianPacket {
  double sigma0;
  double x0;
  double k0;
};

struct Superposition {
  std::vector<std::pair<Complex, WaveFunctionPtr>> terms;
};

// Lattice of amplitudes: slices[n][i] at time t0 + n dt, space x0 + i dx.
// dslices holds the time derivative on the same lattice.
struct GridSampled {
  double x0{0.0};
  double dx{1.0};
  double t0{0.0};
  double dt{1.0};
  std::vector<std::vector<Complex>> slices;
  std::vector<std::vector<Complex>> dslices;

  std::size_t nx() const noexcept { return slices.empty() ? 0 : slices.front().size(); }
  std::size_t nt() const noexcept { return slices.size(); }
  double x_end() const noexcept { return x0 + dx * static_cast<double>(nx() - 1); }
  double t_end() const noexcept { return t0 + dt * static_cast<double>(nt() - 1); }
};

using WaveForm = std::variant<PlaneWave, GaussianPacket, Superposition, GridSampled>;

// Value and first partials in the home chart; dxx is filled for analytic forms.
struct Jet {
  Complex v;
  Complex dt;
  Complex dx;
  Complex dxx;
};

namespace detail {

// Momentum-space nodes of a positive-frequency packet.
struct SpectralNodes {
  std::vector<double> k;
  std::vector<double> omega;
  std::vector<Complex> weight;  // includes dk / 2pi and normalization
};

inline constexpr int kSpectralNodes = 512;
inline constexpr double kSpectralHalfWidth = 8.0;  // in units of 1/sigma0

}  // namespace detail

// Wave function of one free massive particle. Lives on a flat home chart;
// events on any chart connected to it can be evaluated.
class WaveFunction {
 public:
  static WaveFunction plane_wave(DynamicPrinciple p, double k, std::optional<double> omega = std::nullopt,
                                 ChartPtr home = Chart::standard()) {
    return WaveFunction(p, PlaneWave{k, omega.value_or(p.omega(k))}, std::move(home));
  }

  static WaveFunction gaussian(DynamicPrinciple p, double sigma0, double x0, double k0,
                               ChartPtr home = Chart::standard()) {
    require(sigma0 > 0.0 && std::isfinite(sigma0), ErrorCode::invalid_argument, "packet width must be positive");
    WaveFunction w(p, GaussianPacket{sigma0, x0, k0}, std::move(home));
    if (p.kind == Principle::klein_gordon) w.build_spectral();
    return w;
  }

  // Weighted sum of components sharing one principle and home chart. Rescaled
  // to unit total probability when every component is normalizable.
  static WaveFunction superposition(std::vector<std::pair<Complex, WaveFunctionPtr>> terms) {
    require(!terms.empty(), ErrorCode::invalid_argument, "superposition needs at least one term");
    const auto& first = *terms.front().second;
    for (const auto& [c, w] : terms) {
      require(w != nullptr, ErrorCode::invalid_argument, "null superposition term");
      require(w->principle() == first.principle(), ErrorCode::invalid_argument,
              "superposition terms must share a dynamic principle");
      require(w->home() == first.home(), ErrorCode::invalid_argument, "superposition terms must share a home chart");
    }
    WaveFunction w(first.principle(), Superposition{std::move(terms)}, first.home());
    if (w.normalizable()) {
      const double q = w.total_charge(0.0);
      require(q > 0.0 && std::isfinite(q), ErrorCode::non_normalizable, "superposition has no probability");
      for (auto& term : std::get<Superposition>(w.form_).terms) term.first /= std::sqrt(q);
    }
    return w;
  }

  static WaveFunction grid_sampled(DynamicPrinciple p, GridSampled grid, ChartPtr home = Chart::standard()) {
    require(grid.nt() >= 2, ErrorCode::invalid_argument, "grid needs at least two time slices");
    require(grid.nx() >= 4, ErrorCode::invalid_argument, "grid needs at least four space samples");
    require(grid.dx > 0.0 && grid.dt > 0.0, ErrorCode::invalid_argument, "grid spacings must be positive");
    for (const auto& s : grid.slices) require(s.size() == grid.nx(), ErrorCode::invalid_argument, "ragged grid");
    if (grid.dslices.empty()) {
      // Forward differences between stored slices stand in for the time derivative.
      grid.dslices.resize(grid.nt());
      for (std::size_t n = 0; n < grid.nt(); ++n) {
        const std::size_t a = n + 1 < grid.nt() ? n : n - 1;
        grid.dslices[n].resize(grid.nx());
        for (std::size_t i = 0; i < grid.nx(); ++i)
          grid.dslices[n][i] = (grid.slices[a + 1][i] - grid.slices[a][i]) / grid.dt;
      }
    }
    require(grid.dslices.size() == grid.nt(), ErrorCode::invalid_argument, "derivative slices do not match");
    WaveFunction w(p, std::move(grid), std::move(home));
    double peak = 0.0;
    for (const auto& s : std::get<GridSampled>(w.form_).slices)
      for (const auto& z : s) peak = std::max(peak, std::norm(z));
    w.grid_peak_ = peak;
    return w;
  }

  const DynamicPrinciple& principle() const noexcept { return principle_; }
  const WaveForm& form() const noexcept { return form_; }
  const ChartPtr& home() const noexcept { return home_; }
  double mass() const noexcept { return principle_.mass; }

  bool is_analytic() const noexcept {
    if (std::holds_alternative<GridSampled>(form_)) return false;
    if (const auto* s = std::get_if<Superposition>(&form_)) {
      return std::all_of(s->terms.begin(), s->terms.end(), [](const auto& t) { return t.second->is_analytic(); });
    }
    return true;
  }

  bool normalizable() const noexcept {
    if (std::holds_alternative<PlaneWave>(form_)) return false;
    if (const auto* s = std::get_if<Superposition>(&form_)) {
      return std::all_of(s->terms.begin(), s->terms.end(), [](const auto& t) { return t.second->normalizable(); });
    }
    return true;
  }

  Vec2 home_point(const Event& a) const { return a.point_in(*home_); }

  Complex evaluate(const Event& a) const { return value_at(home_point(a)); }

  Complex value_at(Vec2 p) const {
    if (const auto* g = std::get_if<GridSampled>(&form_)) return grid_jet(*g, p, false).v;
    return jet_at(p).v;
  }

  // Value and home-chart partials at p.
  Jet jet_at(Vec2 p) const {
    return std::visit([&](const auto& f) { return jet_of(f, p); }, form_);
  }

  DensityCurrent density_current(const Event& a) const { return density_current_at(home_point(a)); }

  DensityCurrent density_current_at(Vec2 p) const { return current_of(jet_at(p)); }

  DensityCurrent current_of(const Jet& z) const {
    const double m = principle_.mass;
    const double j = std::imag(std::conj(z.v) * z.dx) / m;
    if (principle_.kind == Principle::schroedinger) return {std::norm(z.v), j};
    return {-std::imag(std::conj(z.v) * z.dt) / m, j};
  }

  // Density and current for integrals that sweep across the packet: zero
  // outside a sampled lattice, and shifted stencils at its edges.
  DensityCurrent density_current_swept(Vec2 p) const {
    const auto* g = std::get_if<GridSampled>(&form_);
    if (g == nullptr) return density_current_at(p);
    if (p.x < g->x0 || p.x > g->x_end() || p.t < g->t0 || p.t > g->t_end()) return {0.0, 0.0};
    return current_of(grid_jet(*g, p, false));
  }

  // Exact partial along a chart axis of the event's own chart.
  Complex analytic_partial(const Event& a, Axis axis) const {
    require(is_analytic(), ErrorCode::no_analytic_form, "grid-sampled wave functions have no closed form");
    const Vec2 p = home_point(a);
    const Jet z = jet_at(p);
    const Vec2 e = axis == Axis::time ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
    const Vec2 h = push_components(a, e, *home_);
    return h.t * z.dt + h.x * z.dx;
  }

  // Exact second partial along the home chart's space axis.
  Complex analytic_second_x(Vec2 p) const {
    require(is_analytic(), ErrorCode::no_analytic_form, "grid-sampled wave functions have no closed form");
    return jet_at(p).dxx;
  }

  // Interval of the home space parameter at home time t outside which the
  // density is negligible; empty for non-normalizable forms.
  std::optional<Interval> support(double t) const {
    return std::visit([&](const auto& f) { return support_of(f, t); }, form_);
  }

  // Upper estimate of the peak density at home time t.
  double peak_density(double t) const {
    return std::visit([&](const auto& f) { return peak_of(f, t); }, form_);
  }

  // Total conserved charge on the home slice at time t.
  double total_charge(double t) const {
    const auto s = support(t);
    require(s.has_value(), ErrorCode::non_normalizable, "plane waves carry infinite probability");
    const int chunks = 64;
    const double w = s->length() / chunks;
    double q = 0.0;
    for (int c = 0; c < chunks; ++c) {
      const double lo = s->lo + w * c;
      q += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          [&](double x) { return density_current_swept({t, x}).rho; }, lo, lo + w, 0, 0.0);
    }
    return q;
  }

 private:
  WaveFunction(DynamicPrinciple p, WaveForm form, ChartPtr home)
      : principle_(p), form_(std::move(form)), home_(std::move(home)) {
    require(home_ != nullptr && home_->is_minkowski(), ErrorCode::invalid_argument,
            "wave functions live on a flat home chart");
  }

  void build_spectral() {
    const auto& g = std::get<GaussianPacket>(form_);
    auto nodes = std::make_shared<detail::SpectralNodes>();
    const int n = detail::kSpectralNodes;
    const double half = detail::kSpectralHalfWidth / g.sigma0;
    const double dk = 2.0 * half / n;
    const double amp = std::pow(2.0 * std::numbers::pi * g.sigma0 * g.sigma0, -0.25) * 2.0 * g.sigma0 *
                       std::sqrt(std::numbers::pi);
    double charge = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double k = g.k0 - half + dk * i;
      const double a = amp * std::exp(-g.sigma0 * g.sigma0 * (k - g.k0) * (k - g.k0));
      const double w = (i == 0 || i == n ? 0.5 : 1.0) * dk / (2.0 * std::numbers::pi);
      nodes->k.push_back(k);
      nodes->omega.push_back(principle_.omega(k));
      nodes->weight.push_back(a * w);
      charge += w * a * a * principle_.omega(k) / principle_.mass;
    }
    for (auto& c : nodes->weight) c /= std::sqrt(charge);
    spectral_ = std::move(nodes);
  }

  Jet jet_of(const PlaneWave& f, Vec2 p) const {
    const Complex v = std::polar(1.0, f.k * p.x - f.omega * p.t);
    const Complex i{0.0, 1.0};
    return {v, -i * f.omega * v, i * f.k * v, -f.k * f.k * v};
  }

  Jet jet_of(const GaussianPacket& f, Vec2 p) const {
    const Complex i{0.0, 1.0};
    if (spectral_) {
      const auto& s = *spectral_;
      Jet z{};
      for (std::size_t n = 0; n < s.k.size(); ++n) {
        const Complex e = s.weight[n] * std::polar(1.0, s.k[n] * (p.x - f.x0) - s.omega[n] * p.t);
        z.v += e;
        z.dt += -i * s.omega[n] * e;
        z.dx += i * s.k[n] * e;
        z.dxx += -s.k[n] * s.k[n] * e;
      }
      return z;
    }
    const double m = principle_.mass;
    const double s2 = f.sigma0 * f.sigma0;
    const Complex d = 1.0 + i * p.t / (2.0 * m * s2);
    const double y = p.x - f.x0;
    const Complex num = -y * y / (4.0 * s2) + i * f.k0 * y - i * f.k0 * f.k0 * p.t / (2.0 * m);
    const Complex v = std::pow(2.0 * std::numbers::pi * s2, -0.25) / std::sqrt(d) * std::exp(num / d);
    const Complex slope = (-y / (2.0 * s2) + i * f.k0) / d;
    const Complex dx = slope * v;
    const Complex dxx = (slope * slope - 1.0 / (2.0 * s2 * d)) * v;
    return {v, i / (2.0 * m) * dxx, dx, dxx};
  }

  Jet jet_of(const Superposition& f, Vec2 p) const {
    Jet z{};
    for (const auto& [c, w] : f.terms) {
      const Jet t = w->jet_at(p);
      z.v += c * t.v;
      z.dt += c * t.dt;
      z.dx += c * t.dx;
      z.dxx += c * t.dxx;
    }
    return z;
  }

  Jet jet_of(const GridSampled& f, Vec2 p) const { return grid_jet(f, p, true); }

  // Cubic in space (four-point Lagrange), linear in time. With strict set the
  // stencil must be interior; otherwise it is shifted inward at the edges.
  static Jet grid_jet(const GridSampled& g, Vec2 p, bool strict) {
    const double eps = 1e-12;
    if (!(p.t >= g.t0 - eps * std::max(1.0, std::abs(g.t0)) && p.t <= g.t_end() + eps * std::max(1.0, std::abs(g.t_end())) &&
          p.x >= g.x0 - eps * std::max(1.0, std::abs(g.x0)) && p.x <= g.x_end() + eps * std::max(1.0, std::abs(g.x_end())))) {
      fail(ErrorCode::outside_packet, "event outside the sampled lattice");
    }
    const auto nx = static_cast<long>(g.nx());
    const auto nt = static_cast<long>(g.nt());
    const double sx = (p.x - g.x0) / g.dx;
    long i = std::clamp(static_cast<long>(std::floor(sx)), 0L, nx - 2);
    if (strict && (i < 1 || i + 2 > nx - 1)) {
      fail(ErrorCode::insufficient_stencil, "cubic stencil needs a neighbour on each side");
    }
    i = std::clamp(i, 1L, nx - 3);
    const double s = sx - static_cast<double>(i);
    const double st = (p.t - g.t0) / g.dt;
    const long n = std::clamp(static_cast<long>(std::floor(st)), 0L, nt - 2);
    const double w = std::clamp(st - static_cast<double>(n), 0.0, 1.0);
    auto sample = [&](const std::vector<std::vector<Complex>>& lat, long row) {
      return detail::cubic_lagrange<Complex>({lat[row][i - 1], lat[row][i], lat[row][i + 1], lat[row][i + 2]}, s);
    };
    const auto [v0, d0] = sample(g.slices, n);
    const auto [v1, d1] = sample(g.slices, n + 1);
    const auto [t0, u0] = sample(g.dslices, n);
    const auto [t1, u1] = sample(g.dslices, n + 1);
    (void)u0;
    (void)u1;
    return {(1.0 - w) * v0 + w * v1, (1.0 - w) * t0 + w * t1, ((1.0 - w) * d0 + w * d1) / g.dx, Complex{}};
  }

  // Density spread at time t; the spreading rate is the curvature of the
  // dispersion relation at k0.
  double gaussian_width(const GaussianPacket& f, double t) const {
    const double m = principle_.mass;
    const double w0 = principle_.omega(f.k0);
    const double curvature = principle_.kind == Principle::schroedinger ? 1.0 / m : m * m / (w0 * w0 * w0);
    const double a = curvature * t / (2.0 * f.sigma0 * f.sigma0);
    return f.sigma0 * std::sqrt(1.0 + a * a);
  }

  double gaussian_center(const GaussianPacket& f, double t) const {
    if (principle_.kind == Principle::schroedinger) return f.x0 + f.k0 / principle_.mass * t;
    return f.x0 + f.k0 / principle_.omega(f.k0) * t;
  }

  std::optional<Interval> support_of(const PlaneWave&, double) const { return std::nullopt; }
  std::optional<Interval> support_of(const GaussianPacket& f, double t) const {
    const double c = gaussian_center(f, t), w = 12.0 * gaussian_width(f, t);
    if (principle_.kind == Principle::schroedinger) return Interval{c - w, c + w};
    // Klein-Gordon packets also stay inside the light cone of their initial window.
    const double reach = 12.0 * f.sigma0 + std::abs(t);
    return Interval{std::max(c - w, f.x0 - reach), std::min(c + w, f.x0 + reach)};
  }
  std::optional<Interval> support_of(const Superposition& f, double t) const {
    std::optional<Interval> out;
    for (const auto& term : f.terms) {
      const auto s = term.second->support(t);
      if (!s) return std::nullopt;
      out = out ? Interval{std::min(out->lo, s->lo), std::max(out->hi, s->hi)} : *s;
    }
    return out;
  }
  std::optional<Interval> support_of(const GridSampled& f, double) const { return Interval{f.x0, f.x_end()}; }

  double peak_of(const PlaneWave& f, double) const {
    return principle_.kind == Principle::schroedinger ? 1.0 : std::abs(f.omega) / principle_.mass;
  }
  double peak_of(const GaussianPacket& f, double t) const {
    const double base = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * gaussian_width(f, t));
    return principle_.kind == Principle::schroedinger ? base : base * principle_.omega(f.k0) / principle_.mass;
  }
  double peak_of(const Superposition& f, double t) const {
    double s = 0.0;
    for (const auto& [c, w] : f.terms) s += std::abs(c) * std::sqrt(w->peak_density(t));
    return s * s;
  }
  double peak_of(const GridSampled&, double) const { return grid_peak_; }

  DynamicPrinciple principle_;
  WaveForm form_;
  ChartPtr home_;
  std::shared_ptr<const detail::SpectralNodes> spectral_;
  double grid_peak_{0.0};
};

// --- evolution ------------------------------------------------------------------

namespace detail {

class FftPlan {
 public:
  explicit FftPlan(int n) : n_(n), buf_(static_cast<std::size_t>(n)) {
    auto* p = reinterpret_cast<fftw_complex*>(buf_.data());
    fwd_ = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }

  std::vector<Complex>& buffer() noexcept { return buf_; }
  void forward() { fftw_execute(fwd_); }
  // Unnormalized inverse; callers divide by n.
  void backward() { fftw_execute(bwd_); }
  int size() const noexcept { return n_; }

 private:
  int n_;
  std::vector<Complex> buf_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

inline double lattice_norm(const std::vector<Complex>& s, double dx) {
  double q = 0.0;
  for (const auto& z : s) q += std::norm(z);
  return q * dx;
}

}  // namespace detail

// Spectral propagation of the last stored slice over `duration`, sampled on
// `steps` equal intervals. The lattice is treated as periodic; every Fourier
// mode advances by its exact free phase, so the scheme is unitary.
inline WaveFunction evolve(const WaveFunction& phi, double duration, int steps = 64, double max_drift = 1e-8) {
  const auto* g = std::get_if<GridSampled>(&phi.form());
  require(g != nullptr, ErrorCode::invalid_argument, "evolve needs a grid-sampled wave function");
  require(duration >= 0.0 && std::isfinite(duration), ErrorCode::invalid_argument, "duration must be non-negative");
  require(steps >= 1, ErrorCode::invalid_argument, "need at least one step");
  const auto& start = g->slices.back();
  const double t_start = g->t_end();
  if (duration == 0.0) return phi;
  const int n = static_cast<int>(g->nx());
  detail::FftPlan plan(n);
  auto& buf = plan.buffer();
  std::copy(start.begin(), start.end(), buf.begin());
  plan.forward();
  const std::vector<Complex> spectrum = buf;
  std::vector<double> k(static_cast<std::size_t>(n)), omega(static_cast<std::size_t>(n));
  const double length = g->dx * n;
  for (int i = 0; i < n; ++i) {
    const int m = i <= n / 2 ? i : i - n;
    k[static_cast<std::size_t>(i)] = 2.0 * std::numbers::pi * m / length;
    omega[static_cast<std::size_t>(i)] = phi.principle().omega(k[static_cast<std::size_t>(i)]);
  }
  GridSampled out;
  out.x0 = g->x0;
  out.dx = g->dx;
  out.t0 = t_start;
  out.dt = duration / steps;
  const double norm0 = detail::lattice_norm(start, g->dx);
  for (int s = 0; s <= steps; ++s) {
    const double t = out.dt * s;
    std::vector<Complex> slice(static_cast<std::size_t>(n)), dslice(static_cast<std::size_t>(n));
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const Complex phase = std::polar(1.0, -omega[u] * t);
        buf[u] = spectrum[u] * phase * (pass == 0 ? Complex{1.0} : Complex{0.0, -omega[u]});
      }
      plan.backward();
      auto& dst = pass == 0 ? slice : dslice;
      for (int i = 0; i < n; ++i) dst[static_cast<std::size_t>(i)] = buf[static_cast<std::size_t>(i)] / double(n);
    }
    const double drift = std::abs(detail::lattice_norm(slice, g->dx) - norm0);
    require(drift <= max_drift * std::max(1.0, norm0), ErrorCode::unstable_evolution,
            "norm drift " + std::to_string(drift) + " exceeds bound");
    out.slices.push_back(std::move(slice));
    out.dslices.push_back(std::move(dslice));
  }
  return WaveFunction::grid_sampled(phi.principle(), std::move(out), phi.home());
}

// Samples a wave function on a lattice on two slices, dt apart, ending at t.
inline WaveFunction sample_on_lattice(const WaveFunction& phi, double t, double x0, double dx, int nx,
                                      double dt = 1e-3) {
  require(nx >= 4, ErrorCode::invalid_argument, "need at least four samples");
  require(dt > 0.0, ErrorCode::invalid_argument, "slice spacing must be positive");
  GridSampled g;
  g.x0 = x0;
  g.dx = dx;
  g.t0 = t - dt;
  g.dt = dt;
  for (double ts : {t - dt, t}) {
    std::vector<Complex> s, d;
    for (int i = 0; i < nx; ++i) {
      const Jet z = phi.jet_at({ts, x0 + dx * i});
      s.push_back(z.v);
      d.push_back(z.dt);
    }
    g.slices.push_back(std::move(s));
    g.dslices.push_back(std::move(d));
  }
  return WaveFunction::grid_sampled(phi.principle(), std::move(g), phi.home());
}

// Uniform packet of probability 1 over a home-chart window of width `width`.
inline WaveFunction boxcar(DynamicPrinciple p, double x_lo, double width, int nx = 257, double t0 = -10.0,
                           double t1 = 10.0) {
  require(width > 0.0, ErrorCode::invalid_argument, "boxcar width must be positive");
  require(p.kind == Principle::schroedinger, ErrorCode::invalid_argument, "boxcar is a Schroedinger fixture");
  GridSampled g;
  g.x0 = x_lo;
  g.dx = width / (nx - 1);
  g.t0 = t0;
  g.dt = t1 - t0;
  const std::vector<Complex> s(static_cast<std::size_t>(nx), Complex{1.0 / std::sqrt(width), 0.0});
  const std::vector<Complex> d(static_cast<std::size_t>(nx), Complex{});
  g.slices = {s, s};
  g.dslices = {d, d};
  return WaveFunction::grid_sampled(p, std::move(g));
}

}  // namespace transcoord
