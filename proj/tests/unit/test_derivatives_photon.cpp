#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support/generators.hpp"
#include "transcoord/transcoord.hpp"

using namespace transcoord;

namespace {

const ChartPtr& home() { return Chart::standard(); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::invalid_argument;
}

// Oracle derivative of a Schroedinger Gaussian along a home-chart vector.
Complex oracle_along(const oracle::Gaussian& g, const WaveFunction& w, Vec2 p, Vec2 dir) {
  const Complex v = w.value_at(p);
  return v * (dir.t * g.log_dt(p.t, p.x) + dir.x * g.log_dx(p.t, p.x));
}

}  // namespace

// --- convergence machinery ---------------------------------------------------------

TEST(Order, RecoversPowerLaw) {
  gen::Source src(1);
  for (int i = 0; i < 50; ++i) {
    const double p = src.uniform(0.5, 4.0), c = src.uniform(0.1, 10.0);
    std::vector<std::pair<double, Complex>> pts;
    for (double d : {1e-2, 2.5e-3, 6.25e-4, 1.5625e-4}) pts.emplace_back(d, Complex{3.0 + c * std::pow(std::sqrt(d), p)});
    EXPECT_NEAR(convergence_order(pts, Complex{3.0}), p, 1e-6);
    EXPECT_NEAR(convergence_order(pts), p, 1e-6);
  }
}

TEST(Order, ExactDataHasInfiniteOrder) {
  std::vector<std::pair<double, Complex>> pts{{1e-2, 2.0}, {1e-3, 2.0}, {1e-4, 2.0}};
  EXPECT_TRUE(std::isinf(convergence_order(pts, Complex{2.0})));
  pts.pop_back();
  EXPECT_EQ(code_of([&] { convergence_order(pts); }), ErrorCode::insufficient_points);
}

TEST(Schedule, Validation) {
  LimitSchedule s;
  s.deltas = {1e-2, 1e-3};
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::insufficient_points);
  s.deltas = {1e-2, 1e-3, 1e-3};
  EXPECT_EQ(code_of([&] { s.validate(); }), ErrorCode::invalid_argument);
  EXPECT_NO_THROW(LimitSchedule::geometric().validate());
  EXPECT_EQ(LimitSchedule::geometric().deltas.size(), 5u);
}

TEST(Extrapolation, RemovesEvenPowers) {
  // q(h) = 1 + h^2 + h^4 + h^6 is exact after three levels.
  const auto sched = LimitSchedule::geometric(1e-1, 0.5, 5, 3);
  std::vector<Complex> raw;
  for (double d : sched.deltas) raw.emplace_back(1.0 + d + d * d + d * d * d);
  const auto r = detail::extrapolate(sched.deltas, raw, 3);
  EXPECT_NEAR(std::abs(r.value - 1.0), 0.0, 1e-14);
  EXPECT_FALSE(r.non_convergent);
}

// --- trans-coordinate partials -----------------------------------------------------

TEST(Partial, PlaneWaveExactOnChartGrid) {
  const auto w = WaveFunction::plane_wave(DynamicPrinciple::schroedinger(1.0), 1.5);
  const Event a(home(), 0.3, 0.7);
  const Complex v = w.evaluate(a);
  const auto dx = transcoord_partial(w, a, Axis::space, LimitSchedule::geometric(), GridPolicy::rest);
  const auto dt = transcoord_partial(w, a, Axis::time, LimitSchedule::geometric(), GridPolicy::rest);
  EXPECT_NEAR(std::abs(dx.value / v - Complex(0, 1.5)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(dt.value / v - Complex(0, -1.125)), 0.0, 1e-12);
  // A current faster than light leaves no flow grid.
  EXPECT_EQ(code_of([&] { transcoord_partial(w, a, Axis::space); }), ErrorCode::undefined_grid);
}

TEST(Partial, PlaneWaveOnBoostedGridsMatchesAnalytic) {
  gen::Source src(2);
  for (int i = 0; i < 50; ++i) {
    const auto w = WaveFunction::plane_wave(DynamicPrinciple::klein_gordon(src.uniform(0.5, 2)), src.uniform(-2, 2));
    const Event a(home(), src.uniform(-3, 3), src.uniform(-3, 3));
    const LocalGrid grid = grid_from_time_direction(boost_direction(Direction::chart_rest(a), src.beta()));
    for (Axis ax : {Axis::space, Axis::time}) {
      const Complex want = analytic_grid_partial(w, grid, ax);
      EXPECT_NEAR(std::abs(transcoord_partial(w, grid, ax).value - want), 0.0, 1e-12 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(Partial, KleinGordonProperFrequencyIsTheMass) {
  gen::Source src(3);
  for (int i = 0; i < 30; ++i) {
    const double m = src.uniform(0.5, 3.0);
    const auto w = WaveFunction::plane_wave(DynamicPrinciple::klein_gordon(m), src.uniform(-2, 2));
    const Event a(home(), src.uniform(-2, 2), src.uniform(-2, 2));
    const auto r = transcoord_partial(w, a, Axis::time);
    EXPECT_NEAR(std::abs(r.value / w.evaluate(a) - Complex(0, -m)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(transcoord_partial(w, a, Axis::space).value), 0.0, 1e-12);
  }
}

TEST(Partial, GaussianMatchesOracleWithSecondOrderConvergence) {
  gen::Source src(4);
  for (int i = 0; i < 40; ++i) {
    const oracle::Gaussian g{1.0, src.uniform(0.8, 1.5), 0.0, src.uniform(-0.3, 0.3)};
    const auto w = WaveFunction::gaussian(DynamicPrinciple::schroedinger(1.0), g.s0, g.x0, g.k0);
    const double t = src.uniform(0, 2);
    const Event a(home(), t, g.center(t) + g.width(t) * src.uniform(-1, 1));
    const LocalGrid grid = local_grid(w, a);
    for (Axis ax : {Axis::space, Axis::time}) {
      const Vec2 dir = (ax == Axis::time ? grid.t_hat : grid.x_hat).components();
      const Complex want = oracle_along(g, w, a.point(), dir);
      const auto r = transcoord_partial(w, grid, ax);
      EXPECT_NEAR(std::abs(r.value - want), 0.0, 1e-9);
      EXPECT_GE(r.observed_order, 1.9);
      EXPECT_FALSE(r.non_convergent);
    }
  }
}

TEST(Partial, SecondSpatialDerivativeOnChartGrid) {
  const oracle::Gaussian g{1.0, 1.0, 0.0, 0.3};
  const auto w = WaveFunction::gaussian(DynamicPrinciple::schroedinger(1.0), 1.0, 0.0, 0.3);
  const Event a(home(), 0.5, 0.4);
  const auto r = transcoord_second_x(w, a, LimitSchedule::geometric(), GridPolicy::rest);
  const Complex want = w.evaluate(a) * g.log_dxx(0.5, 0.4);
  EXPECT_NEAR(std::abs(r.value - want), 0.0, 1e-8);
}

TEST(Partial, CostGuard) {
  const auto w = WaveFunction::gaussian(DynamicPrinciple::schroedinger(1.0), 1.0, 0.0, 0.0);
  const auto big = LimitSchedule::geometric(1e-2, 0.99, 600, 1);
  EXPECT_EQ(code_of([&] { transcoord_second_x(w, Event(home(), 0.0, 0.0), big); }), ErrorCode::cost_guard);
}

TEST(Partial, GridSampledPacketFollowsItsSamples) {
  const auto w = WaveFunction::gaussian(DynamicPrinciple::schroedinger(1.0), 1.0, 0.0, 0.2);
  const auto g = sample_on_lattice(w, 0.0, -10.0, 0.01, 2001);
  const Event a(home(), 0.0, 0.3);
  const auto r = transcoord_partial(g, a, Axis::space, LimitSchedule::geometric(1e-4, 0.25, 3, 1),
                                    GridPolicy::rest);
  EXPECT_NEAR(std::abs(r.value - w.jet_at({0.0, 0.3}).dx), 0.0, 1e-5);
}

// --- local normalization density ----------------------------------------------------

TEST(Normalization, ConvergesToDensityOnChartGrid) {
  gen::Source src(5);
  for (int i = 0; i < 20; ++i) {
    const oracle::Gaussian g{1.0, src.uniform(0.7, 1.5), 0.0, src.uniform(-0.5, 0.5)};
    const auto w = WaveFunction::gaussian(DynamicPrinciple::schroedinger(1.0), g.s0, g.x0, g.k0);
    const double t = src.uniform(0, 2), x = g.center(t) + g.width(t) * src.uniform(-1.5, 1.5);
    const auto r = local_normalization_density(w, Event(home(), t, x), LimitSchedule::geometric(), GridPolicy::rest);
    EXPECT_NEAR(r.value.real(), g.density(t, x), 1e-9);
    EXPECT_GE(r.observed_order, 1.0);
  }
}

TEST(Normalization, FlowGridGivesRestDensity) {
  const auto w = WaveFunction::gaussian(DynamicPrinciple::schroedinger(1.0), 1.0, 0.0, 0.4);
  const Event a(home(), 0.5, 0.6);
  EXPECT_NEAR(local_normalization_density(w, a).value.real(), rest_density(w, a), 1e-9);
}

TEST(Normalization, BoxcarIsExactAtEveryScale) {
  const auto b = boxcar(DynamicPrinciple::schroedinger(1.0), 0.0, 4.0);
  const auto r = local_normalization_density(b, Event(home(), 0.0, 2.0), LimitSchedule::geometric(), GridPolicy::rest);
  for (const auto& q : r.raw) EXPECT_NEAR(q.real(), 0.25, 1e-14);
}

TEST(Normalization, PlaneWaveHasNone) {
  const auto w = WaveFunction::plane_wave(DynamicPrinciple::klein_gordon(1.0), 0.5);
  EXPECT_EQ(code_of([&] { local_normalization_density(w, Event(home(), 0, 0)); }), ErrorCode::non_normalizable);
}

// --- photons ---------------------------------------------------------------------------

TEST(Photon, PhaseIsConstantAlongLightLines) {
  const PhotonPhaseField p(Heading::right, {{Complex{1.0}, 0.3, 2.0}}, {-5.0, 5.0});
  gen::Source src(6);
  for (int i = 0; i < 50; ++i) {
    const double t = src.uniform(-3, 3), x = src.uniform(-1, 1), s = src.uniform(-1, 1);
    EXPECT_NEAR(p.phase(0, Event(home(), t, x)), p.phase(0, Event(home(), t + s, x + s)), 1e-12);
  }
  EXPECT_TRUE(p.in_band(Event(home(), 1.0, 0.0)));
  EXPECT_FALSE(p.in_band(Event(home(), 9.0, 0.0)));
}

TEST(Photon, RelativePhaseDifference) {
  const PhotonPhaseField p(Heading::left, {{Complex{1.0}, 0.0, 1.5}, {Complex{1.0}, 1.0, 0.5}}, {-10.0, 10.0});
  const LightLine l1{Event(home(), 0.0, 0.0), Heading::left}, l2{Event(home(), 1.0, 1.0), Heading::left};
  EXPECT_NEAR(relative_phase_difference(p, l1, l2), 2.0 * 2.0, 1e-14);
  EXPECT_EQ(code_of([&] { relative_phase_difference(p, l1, {Event(home(), 0, 0), Heading::right}); }),
            ErrorCode::direction_mismatch);
  EXPECT_EQ(code_of([&] { relative_phase_difference(p, l1, {Event(home(), 20, 0), Heading::left}); }),
            ErrorCode::outside_band);
}

TEST(Photon, EnergyExistsOnlyRelativeToAGrid) {
  gen::Source src(7);
  for (int i = 0; i < 100; ++i) {
    const double rate = src.uniform(0.5, 3.0), beta = src.beta(0.95);
    const Heading h = src.coin() ? Heading::right : Heading::left;
    const PhotonPhaseField p(h, {{Complex{1.0}, 0.0, rate}}, {-1e3, 1e3});
    const Event a(home(), src.uniform(-2, 2), src.uniform(-2, 2));
    const auto rest = grid_relative_kinematics(p, chart_rest_grid(a), a);
    const auto moving =
        grid_relative_kinematics(p, grid_from_time_direction(boost_direction(Direction::chart_rest(a), beta)), a);
    EXPECT_NEAR(rest.e_gamma, rate, 1e-12);
    EXPECT_NEAR(rest.p_gamma, h == Heading::right ? rate : -rate, 1e-12);
    const double shift = h == Heading::right ? doppler_factor(beta) : doppler_factor(-beta);
    EXPECT_NEAR(moving.e_gamma / rest.e_gamma, shift, 1e-12);
    EXPECT_NEAR(moving.e_gamma * moving.e_gamma - moving.p_gamma * moving.p_gamma, 0.0, 1e-11);
  }
}

TEST(Photon, GridMustSitAtTheEvent) {
  const PhotonPhaseField p(Heading::right, {{Complex{1.0}, 0.0, 1.0}}, {-10.0, 10.0});
  const Event a(home(), 0, 0), b(home(), 1, 0);
  EXPECT_EQ(code_of([&] { grid_relative_kinematics(p, chart_rest_grid(a), b); }), ErrorCode::grid_event_mismatch);
}

TEST(Doppler, RatioFromGridsMatchesClosedForm) {
  gen::Source src(8);
  for (int i = 0; i < 100; ++i) {
    const double b1 = src.beta(), b2 = src.beta();
    const Event a(home(), 0, 0);
    const auto g1 = grid_from_time_direction(boost_direction(Direction::chart_rest(a), b1));
    const auto g2 = grid_from_time_direction(boost_direction(Direction::chart_rest(a), b2));
    const double rel = (b2 - b1) / (1.0 - b1 * b2);
    EXPECT_NEAR(doppler_ratio(g1, g2, Heading::right), doppler_factor(rel), 1e-12);
    EXPECT_NEAR(doppler_ratio(g1, g2, Heading::left), doppler_factor(-rel), 1e-12);
  }
  EXPECT_DOUBLE_EQ(doppler_factor(0.6), 0.5);
}

TEST(Doppler, NeedsFlatRoot) {
  const auto c = Chart::diagonal("curved", static_diagonal([](double x) { return -1 - x * x; },
                                                           [](double) { return 1.0; }));
  const Event a(c, 0.0, 1.0);
  EXPECT_EQ(code_of([&] { doppler_ratio(chart_rest_grid(a), chart_rest_grid(a), Heading::right); }),
            ErrorCode::requires_flat_region);
}

TEST(Huygens, TwoSourcesGiveCosineSquaredFringes) {
  gen::Source src(9);
  for (int i = 0; i < 200; ++i) {
    const double d = src.uniform(0.5, 2), L = src.uniform(5, 50), lambda = src.uniform(0.1, 1), y = src.uniform(-20, 20);
    const double delta = (std::hypot(L, y - d / 2) - std::hypot(L, y + d / 2)) / lambda;
    const double want = 4.0 * std::pow(std::cos(std::numbers::pi * delta), 2);
    EXPECT_NEAR(two_slit_intensity(d, L, lambda, y), want, 1e-9);
  }
}

TEST(Huygens, OnlyReachingWaveletsContribute) {
  const std::vector<WaveletSource> sources{{Event(home(), 0.0, -1.0)}, {Event(home(), 0.0, 1.0)}};
  const auto both = huygens_superpose(sources, Event(home(), 2.0, 0.0), 3.0);
  EXPECT_NEAR(both.intensity, 4.0, 1e-12);
  const auto one = huygens_superpose(sources, Event(home(), 2.5, 2.0), 3.0);
  EXPECT_NEAR(one.intensity, 1.0, 1e-12);
  EXPECT_EQ(code_of([&] { huygens_superpose(sources, Event(home(), 0.5, 5.0), 3.0); }), ErrorCode::not_reachable);
}

TEST(Emission, WeightsMustBeAProbability) {
  EmissionWeights w;
  EXPECT_DOUBLE_EQ(solid_angle_probability(w, Heading::left), 0.5);
  w.weight = {0.7, 0.4};
  EXPECT_EQ(code_of([&] { w.validate(); }), ErrorCode::not_normalized);
}
