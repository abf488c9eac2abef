#include <gtest/gtest.h>

#include <cmath>
#include <memory>

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

}  // namespace

// --- wave functions --------------------------------------------------------------

TEST(PlaneWave, DispersionRelations) {
  EXPECT_DOUBLE_EQ(DynamicPrinciple::schroedinger(2.0).omega(3.0), 2.25);
  EXPECT_DOUBLE_EQ(DynamicPrinciple::klein_gordon(4.0).omega(3.0), 5.0);
  const auto w = WaveFunction::plane_wave(DynamicPrinciple::schroedinger(1.0), 1.0);
  const Jet z = w.jet_at({0.3, 0.7});
  EXPECT_NEAR(std::abs(z.dx / z.v - Complex(0, 1)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(z.dt / z.v - Complex(0, -0.5)), 0.0, 1e-15);
  EXPECT_FALSE(w.normalizable());
  EXPECT_FALSE(w.support(0.0).has_value());
}

TEST(PlaneWave, RejectsBadMass) { EXPECT_THROW(DynamicPrinciple::klein_gordon(0.0), Error); }

TEST(Gaussian, JetMatchesClosedFormAtRandomEvents) {
  gen::Source src(21);
  for (int i = 0; i < 300; ++i) {
    const oracle::Gaussian g{src.uniform(0.5, 2.0), src.uniform(0.5, 2.0), src.uniform(-1, 1), src.uniform(-1, 1)};
    const auto w = WaveFunction::gaussian(DynamicPrinciple::schroedinger(g.m), g.s0, g.x0, g.k0);
    const double t = src.uniform(-3, 3);
    const double x = g.center(t) + g.width(t) * src.uniform(-3, 3);
    const Jet z = w.jet_at({t, x});
    EXPECT_NEAR(std::norm(z.v), g.density(t, x), 1e-13);
    EXPECT_NEAR(std::abs(z.dx / z.v - g.log_dx(t, x)), 0.0, 1e-11);
    EXPECT_NEAR(std::abs(z.dt / z.v - g.log_dt(t, x)), 0.0, 1e-11);
    EXPECT_NEAR(std::abs(z.dxx / z.v - g.log_dxx(t, x)), 0.0, 1e-11);
    EXPECT_NEAR(w.density_current_at({t, x}).j, g.velocity(t, x) * g.density(t, x), 1e-12);
  }
}

TEST(Gaussian, UnitProbabilityAtAllTimes) {
  const auto w = WaveFunction::gaussian(DynamicPrinciple::schroedinger(1.0), 0.7, 0.3, 0.8);
  for (double t : {-2.0, 0.0, 1.5, 6.0}) EXPECT_NEAR(w.total_charge(t), 1.0, 1e-12);
}

TEST(Gaussian, KleinGordonChargeIsConserved) {
  const auto w = WaveFunction::gaussian(DynamicPrinciple::klein_gordon(1.0), 2.0, 0.0, 0.5);
  for (double t : {0.0, 1.0, 4.0}) EXPECT_NEAR(w.total_charge(t), 1.0, 1e-9);
  // Every node obeys the mass shell, so the packet solves the wave equation.
  const Jet z = w.jet_at({0.5, 0.2});
  EXPECT_TRUE(std::isfinite(std::abs(z.dt)));
  EXPECT_GT(w.density_current_at({0.0, 0.0}).rho, 0.0);
}

TEST(Superposition, IsRescaledToUnitProbability) {
  const auto S = DynamicPrinciple::schroedinger(1.0);
  auto a = std::make_shared<WaveFunction>(WaveFunction::gaussian(S, 1.0, -3.0, 0.0));
  auto b = std::make_shared<WaveFunction>(WaveFunction::gaussian(S, 1.0, 3.0, 0.0));
  const auto w = WaveFunction::superposition({{Complex{2.0, 0.0}, a}, {Complex{0.0, 2.0}, b}});
  EXPECT_NEAR(w.total_charge(0.0), 1.0, 1e-10);
  EXPECT_NEAR(w.total_charge(2.0), 1.0, 1e-10);
  EXPECT_TRUE(w.is_analytic());
}

TEST(Superposition, RejectsMixedPrinciples) {
  auto a = std::make_shared<WaveFunction>(WaveFunction::gaussian(DynamicPrinciple::schroedinger(1.0), 1, 0, 0));
  auto b = std::make_shared<WaveFunction>(WaveFunction::gaussian(DynamicPrinciple::klein_gordon(1.0), 1, 0, 0));
  EXPECT_THROW(WaveFunction::superposition({{1.0, a}, {1.0, b}}), Error);
}

TEST(Grid, InterpolatesSmoothPacket) {
  const auto S = DynamicPrinciple::schroedinger(1.0);
  const auto w = WaveFunction::gaussian(S, 1.0, 0.0, 0.4);
  const auto g = sample_on_lattice(w, 0.0, -10.0, 0.02, 1001);
  EXPECT_FALSE(g.is_analytic());
  gen::Source src(4);
  for (int i = 0; i < 100; ++i) {
    const double x = src.uniform(-4, 4);
    EXPECT_NEAR(std::abs(g.value_at({0.0, x}) - w.value_at({0.0, x})), 0.0, 1e-6);
  }
}

TEST(Grid, EdgesAndMissingClosedForm) {
  const auto b = boxcar(DynamicPrinciple::schroedinger(1.0), 0.0, 2.0);
  EXPECT_EQ(code_of([&] { b.jet_at({0.0, 3.0}); }), ErrorCode::outside_packet);
  EXPECT_EQ(code_of([&] { b.jet_at({0.0, 0.0}); }), ErrorCode::insufficient_stencil);
  EXPECT_EQ(code_of([&] { b.analytic_partial(Event(home(), 0.0, 1.0), Axis::space); }), ErrorCode::no_analytic_form);
  EXPECT_NEAR(b.density_current_at({0.0, 1.0}).rho, 0.5, 1e-15);
  EXPECT_EQ(b.density_current_swept({0.0, 5.0}).rho, 0.0);
}

TEST(Evolution, SpectralPropagationMatchesClosedForm) {
  const auto S = DynamicPrinciple::schroedinger(1.0);
  const auto w = WaveFunction::gaussian(S, 1.0, 0.0, 0.5);
  const auto start = sample_on_lattice(w, 0.0, -40.0, 0.05, 1600);
  const auto later = evolve(start, 2.0, 16);
  gen::Source src(8);
  for (int i = 0; i < 50; ++i) {
    const double x = src.uniform(-4, 5);
    EXPECT_NEAR(std::abs(later.value_at({2.0, x}) - w.value_at({2.0, x})), 0.0, 2e-6);
  }
  EXPECT_NEAR(later.total_charge(2.0), 1.0, 1e-6);
}

TEST(Evolution, ZeroDurationIsIdentityAndBadInputsFail) {
  const auto S = DynamicPrinciple::schroedinger(1.0);
  const auto g = sample_on_lattice(WaveFunction::gaussian(S, 1, 0, 0), 0.0, -10.0, 0.1, 201);
  EXPECT_EQ(evolve(g, 0.0).value_at({0.0, 0.3}), g.value_at({0.0, 0.3}));
  EXPECT_THROW(evolve(WaveFunction::gaussian(S, 1, 0, 0), 1.0), Error);
  EXPECT_THROW(evolve(g, -1.0), Error);
}

// --- flow and fractions --------------------------------------------------------------

TEST(Flow, RestDensityAndGrid) {
  gen::Source src(31);
  for (int i = 0; i < 100; ++i) {
    const oracle::Gaussian g{1.0, src.uniform(0.8, 2.0), 0.0, src.uniform(-0.3, 0.3)};
    const auto w = WaveFunction::gaussian(DynamicPrinciple::schroedinger(1.0), g.s0, g.x0, g.k0);
    const double t = src.uniform(0, 2), x = g.center(t) + g.width(t) * src.uniform(-1, 1);
    const Event a(home(), t, x);
    const double rho = g.density(t, x), j = rho * g.velocity(t, x);
    EXPECT_NEAR(rest_density(w, a), std::sqrt(rho * rho - j * j), 1e-12);
    const LocalGrid grid = local_grid(w, a);
    EXPECT_NEAR(grid.t_hat.components().x / grid.t_hat.components().t, g.velocity(t, x), 1e-12);
    EXPECT_NEAR(metric_dot(a, grid.t_hat.components(), grid.x_hat.components()), 0.0, 1e-14);
  }
}

TEST(Flow, UndefinedWhereDensityVanishesOrCurrentIsSpacelike) {
  const auto w = WaveFunction::gaussian(DynamicPrinciple::schroedinger(1.0), 1.0, 0.0, 0.0);
  EXPECT_EQ(code_of([&] { flow_direction(w, Event(home(), 0.0, 50.0)); }), ErrorCode::vanishing_density);
  const auto fast = WaveFunction::gaussian(DynamicPrinciple::schroedinger(1.0), 1.0, 0.0, 2.0);
  EXPECT_EQ(code_of([&] { flow_direction(fast, Event(home(), 0.0, 0.0)); }), ErrorCode::spacelike_current);
  // Streamlines still exist there.
  EXPECT_NEAR(streamline_tangent(fast, Event(home(), 0.0, 0.0)).x, 2.0, 1e-14);
}

TEST(Fraction, MatchesErrorFunctionOracle) {
  gen::Source src(41);
  for (int i = 0; i < 60; ++i) {
    const oracle::Gaussian g{1.0, src.uniform(0.5, 2.0), src.uniform(-1, 1), src.uniform(-0.8, 0.8)};
    const auto w = WaveFunction::gaussian(DynamicPrinciple::schroedinger(1.0), g.s0, g.x0, g.k0);
    const double t = src.uniform(0, 3), x = g.center(t) + g.width(t) * src.uniform(-2.5, 2.5);
    EXPECT_NEAR(fraction_at(w, Event(home(), t, x)), g.cdf(t, x), 1e-11);
  }
}

TEST(Fraction, FrozenReferenceValues) {
  const auto w = WaveFunction::gaussian(DynamicPrinciple::schroedinger(1.0), 1.0, 0.0, 0.0);
  // Standard normal CDF at 1, and the same line two time units later.
  EXPECT_NEAR(fraction_at(w, Event(home(), 0.0, 1.0)), 0.841344746068543, 1e-12);
  EXPECT_NEAR(fraction_at(w, Event(home(), 2.0, std::sqrt(2.0))), 0.841344746068543, 1e-12);
  EXPECT_NEAR(fraction_at(w, Event(home(), 0.0, 0.0)), 0.5, 1e-14);
}

TEST(Fraction, PlaneWaveHasNone) {
  const auto p = WaveFunction::plane_wave(DynamicPrinciple::schroedinger(1.0), 0.3);
  EXPECT_EQ(code_of([&] { fraction_at(p, Event(home(), 0.0, 0.0)); }), ErrorCode::non_normalizable);
}

TEST(Fraction, KleinGordonPerpendicularCutsAreConsistent) {
  const auto w = WaveFunction::gaussian(DynamicPrinciple::klein_gordon(1.0), 1.5, 0.0, 0.4);
  // Probability between two points equals the difference of their fractions.
  const Event a(home(), 0.0, -0.7), b(home(), 0.0, 1.1);
  EXPECT_NEAR(fraction_between(w, a, b), fraction_at(w, b) - fraction_at(w, a), 1e-9);
  double last = 0.0;
  for (double x : {-3.0, -1.0, 0.0, 1.0, 3.0}) {
    const double f = fraction_at(w, Event(home(), 0.0, x));
    EXPECT_GT(f, last);
    EXPECT_LT(f, 1.0);
    last = f;
  }
}

// --- partition lines --------------------------------------------------------------------

TEST(Lines, FollowClosedFormStreamlines) {
  gen::Source src(51);
  for (int i = 0; i < 8; ++i) {
    const oracle::Gaussian g{1.0, src.uniform(0.7, 1.5), 0.0, src.uniform(-0.5, 0.5)};
    const auto w = WaveFunction::gaussian(DynamicPrinciple::schroedinger(1.0), g.s0, g.x0, g.k0);
    const double x_start = src.uniform(-2, 2);
    const auto line = trace_partition_line(w, Event(home(), 0.0, x_start), {0.0, 3.0}, 61);
    ASSERT_FALSE(line.truncated) << line.truncation_reason;
    for (const auto& e : line.samples) EXPECT_NEAR(e.point().x, g.streamline(x_start, e.point().t), 1e-8);
  }
}

TEST(Lines, SeedInsideRangeTracesBothWays) {
  const oracle::Gaussian g{1.0, 1.0, 0.0, 0.2};
  const auto w = WaveFunction::gaussian(DynamicPrinciple::schroedinger(1.0), 1.0, 0.0, 0.2);
  const auto line = trace_partition_line(w, Event(home(), 1.0, g.streamline(0.5, 1.0)), {0.0, 2.0}, 21);
  ASSERT_EQ(line.samples.size(), 21u);
  EXPECT_NEAR(line.samples.front().point().x, 0.5, 1e-8);
  EXPECT_NEAR(line.crossing(1.37).point().x, g.streamline(0.5, 1.37), 1e-6);
}

TEST(Lines, NeverCrossProperty) {
  gen::Source src(61);
  for (int trial = 0; trial < 5; ++trial) {
    const auto w = WaveFunction::gaussian(DynamicPrinciple::schroedinger(1.0), src.uniform(0.5, 1.5), 0.0,
                                          src.uniform(-0.5, 0.5));
    const auto fs = src.sorted(5, 0.05, 0.95, 0.01);
    std::vector<PartitionLine> lines;
    for (double f : fs) lines.push_back(trace_fraction_line(w, f, 0.0, {0.0, 2.0}, home(), 41));
    for (std::size_t k = 0; k < 41; ++k)
      for (std::size_t i = 0; i + 1 < lines.size(); ++i)
        EXPECT_LT(lines[i].samples[k].point().x, lines[i + 1].samples[k].point().x);
  }
}

TEST(Lines, ProbabilityBetweenLinesIsConserved) {
  gen::Source src(71);
  for (int trial = 0; trial < 4; ++trial) {
    const auto w = WaveFunction::gaussian(DynamicPrinciple::schroedinger(1.0), src.uniform(0.5, 1.5), 0.0,
                                          src.uniform(-0.5, 0.5));
    const double f1 = src.uniform(0.05, 0.45), f2 = src.uniform(0.55, 0.95);
    const auto l1 = trace_fraction_line(w, f1, 0.0, {0.0, 2.0}, home(), 41);
    const auto l2 = trace_fraction_line(w, f2, 0.0, {0.0, 2.0}, home(), 41);
    EXPECT_LT(fraction_conservation_check(w, l1, l2, {0.0, 0.5, 1.0, 1.5, 2.0}), 1e-8);
    EXPECT_NEAR(fraction_between(w, l1.crossing(1.2), l2.crossing(1.2)), f2 - f1, 1e-8);
  }
}

TEST(Lines, TruncationIsRecordedNotThrown) {
  const auto b = boxcar(DynamicPrinciple::schroedinger(1.0), 0.0, 2.0, 257, 0.0, 1.0);
  const auto line = trace_partition_line(b, Event(home(), 0.5, 1.0), {0.0, 3.0}, 31);
  EXPECT_TRUE(line.truncated);
  EXPECT_FALSE(line.truncation_reason.empty());
  EXPECT_FALSE(line.covers(2.5));
  EXPECT_EQ(code_of([&] { line.crossing(2.5); }), ErrorCode::line_truncated);
}

TEST(MinimalProbability, AlignsWithFlow) {
  gen::Source src(81);
  for (int i = 0; i < 5; ++i) {
    const auto w = WaveFunction::gaussian(DynamicPrinciple::schroedinger(1.0), 1.0, 0.0, src.uniform(-0.4, 0.4));
    const Event a(home(), src.uniform(0, 1), src.uniform(-1, 1));
    const auto m = min_probability_direction(w, a, 1e-4);
    EXPECT_FALSE(m.degenerate);
    EXPECT_NEAR(m.rapidity, rapidity_of(flow_direction(w, a)), 1e-2);
  }
}

// --- internal coordinates ----------------------------------------------------------------

TEST(InternalChart, SchroedingerNormalizationAndRoundTrip) {
  const oracle::Gaussian g{1.0, 1.0, 0.0, 0.5};
  const auto w = WaveFunction::gaussian(DynamicPrinciple::schroedinger(1.0), 1.0, 0.0, 0.5);
  const auto ic = build_internal_chart(w, Event(home(), 0.0, 0.0));
  EXPECT_TRUE(ic.galilean());
  EXPECT_NEAR(ic.total_normalization(), 1.0, 1e-10);
  const Event e = ic.event_at(1.0, 1.0);
  EXPECT_NEAR(e.point().x, g.streamline(1.0, 1.0), 1e-8);
  const auto [tau, sigma] = ic.coordinates(e);
  EXPECT_NEAR(tau, 1.0, 1e-8);
  EXPECT_NEAR(sigma, 1.0, 1e-8);
}

TEST(InternalChart, KleinGordonUsesProperTime) {
  const auto w = WaveFunction::plane_wave(DynamicPrinciple::klein_gordon(1.0), 0.75);
  const auto ic = build_internal_chart(w, Event(home(), 0.0, 0.0));
  EXPECT_FALSE(ic.galilean());
  // Velocity 0.6: one unit of proper time is 1.25 of chart time.
  const Event e = ic.event_at(1.0, 0.0);
  EXPECT_NEAR(e.point().t, 1.25, 1e-9);
  EXPECT_NEAR(e.point().x, 0.75, 1e-9);
  const auto [tau, sigma] = ic.coordinates(Event(home(), 2.0, 1.0));
  EXPECT_NEAR(tau, 1.75, 1e-8);
  EXPECT_NEAR(sigma, -0.25, 1e-8);

  const auto packet = WaveFunction::gaussian(DynamicPrinciple::klein_gordon(1.0), 2.0, 0.0, 0.3);
  EXPECT_NEAR(build_internal_chart(packet, Event(home(), 0.0, 0.0)).total_normalization(), 1.0, 1e-8);
}
