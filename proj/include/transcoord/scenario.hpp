#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "transcoord/chart.hpp"
#include "transcoord/error.hpp"
#include "transcoord/geometry.hpp"
#include "transcoord/numeric.hpp"
#include "transcoord/partition.hpp"
#include "transcoord/photon.hpp"
#include "transcoord/states.hpp"
#include "transcoord/wavepacket.hpp"

namespace transcoord {

enum class HostLabel { proton, electron };

// Decay of an excited atom into ground state plus photon, followed by a
// possible absorption at a distant detector. Atom and detector follow the
// partition lines of uniformly moving packets; the detector starts
// `detector_offset` to the right of the atom.
struct ScenarioSpec {
  double gamma{1.0};              // decay rate in the atom's proper time
  double transition_energy{1.0};  // photon energy on the atom's grid
  EmissionWeights emission{};     // left / right
  double band_width{1.0};         // extent of the photon band in light-line label
  double detector_rate{1.0};      // absorption hazard while the band overlaps
  double atom_beta{0.0};
  double detector_beta{0.0};
  double detector_offset{10.0};
  double horizon{1e6};  // last chart time on the detector line
  std::uint64_t seed{42};
  HostLabel host{HostLabel::proton};

  void validate() const {
    require(gamma > 0.0 && std::isfinite(gamma), ErrorCode::invalid_argument, "decay rate must be positive");
    require(transition_energy > 0.0, ErrorCode::invalid_argument, "transition energy must be positive");
    require(band_width > 0.0 && detector_rate >= 0.0, ErrorCode::invalid_argument, "bad band or detector rate");
    require(std::abs(atom_beta) < 1.0 && std::abs(detector_beta) < 1.0, ErrorCode::superluminal_boost,
            "lines must be timelike");
    require(detector_offset > 0.0, ErrorCode::invalid_argument, "detector must start to the right of the atom");
    require(atom_beta <= detector_beta, ErrorCode::invalid_argument,
            "atom must not overtake the detector (their events must stay spacelike)");
    emission.validate();
  }
};

struct TrialRecord {
  std::uint64_t trial{0};
  double jump_time{0.0};  // atom proper time of the jump
  Heading heading{Heading::right};
  Event emission;
  bool detected{false};
  std::optional<Event> detection;
  double detection_time{std::numeric_limits<double>::quiet_NaN()};  // chart time
  double e_emit{0.0};
  double e_detect{std::numeric_limits<double>::quiet_NaN()};
  double max_norm_deviation{0.0};
  std::vector<StateTuple> states;
  LocalGrid atom_grid;
  std::optional<LocalGrid> detector_grid;
};

struct ScenarioResult {
  std::vector<double> jump_times;
  std::vector<TrialRecord> trials;
  std::vector<double> detection_times;  // detected trials only
};

namespace detail {

// Per-trial seed: a mix of the master seed and the trial index.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  return splitmix64(splitmix64(master) + trial);
}

// Uniform in (0, 1) from the top 53 bits.
inline double open_uniform(std::mt19937_64& rng) {
  double u;
  do {
    u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  } while (u == 0.0);
  return u;
}

inline double exponential(std::mt19937_64& rng, double rate) { return -std::log(open_uniform(rng)) / rate; }

struct Worldline {
  double beta;
  double x0;
  double gamma() const { return 1.0 / std::sqrt(1.0 - beta * beta); }
  Vec2 at_proper(double tau) const { return {gamma() * tau, x0 + beta * gamma() * tau}; }
  Vec2 at_time(double t) const { return {t, x0 + beta * t}; }
};

}  // namespace detail

// Pre-jump amplitudes after atom proper time tau: excited e^{-G tau/2},
// decayed sqrt(1 - e^{-G tau}).
inline std::map<std::string, Complex> decay_amplitudes(double gamma, double tau) {
  const double s = std::exp(-0.5 * gamma * tau);
  return {{"excited", Complex{s, 0.0}}, {"decayed", Complex{std::sqrt(std::max(0.0, 1.0 - s * s)), 0.0}}};
}

class DecayScenario {
 public:
  explicit DecayScenario(ScenarioSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    const auto S = DynamicPrinciple::klein_gordon(1.0);
    atom_ = std::make_shared<WaveFunction>(
        WaveFunction::plane_wave(S, spec_.atom_beta / std::sqrt(1.0 - spec_.atom_beta * spec_.atom_beta)));
    detector_ = std::make_shared<WaveFunction>(
        WaveFunction::plane_wave(S, spec_.detector_beta / std::sqrt(1.0 - spec_.detector_beta * spec_.detector_beta)));
  }

  const ScenarioSpec& spec() const noexcept { return spec_; }

  TrialRecord run_trial(std::uint64_t trial) const {
    std::mt19937_64 rng(detail::trial_seed(spec_.seed, trial));
    const ChartPtr& chart = Chart::standard();
    const detail::Worldline atom{spec_.atom_beta, 0.0};
    const detail::Worldline det{spec_.detector_beta, spec_.detector_offset};

    const double jump = detail::exponential(rng, spec_.gamma);
    const double pick = detail::open_uniform(rng);
    const double hit = detail::exponential(rng, 1.0);
    const Event emission(chart, atom.at_proper(jump));
    TrialRecord rec{.trial = trial,
                    .jump_time = jump,
                    .heading = pick < spec_.emission.weight[1] ? Heading::right : Heading::left,
                    .emission = emission,
                    .detected = false,
                    .detection = std::nullopt,
                    .detection_time = std::numeric_limits<double>::quiet_NaN(),
                    .e_emit = 0.0,
                    .e_detect = std::numeric_limits<double>::quiet_NaN(),
                    .max_norm_deviation = 0.0,
                    .states = {},
                    .atom_grid = local_grid(*atom_, emission),
                    .detector_grid = std::nullopt};

    // Amplitude flow before the jump.
    for (int k = 0; k <= 16; ++k) {
      const auto amps = decay_amplitudes(spec_.gamma, rec.jump_time * k / 16.0);
      double n = 0.0;
      for (const auto& [l, a] : amps) n += std::norm(a);
      rec.max_norm_deviation = std::max(rec.max_norm_deviation, std::abs(n - 1.0));
    }

    const Vec2 pe = emission.point();
    const Vec2 d_then = det.at_time(pe.t);
    rec.states.push_back(make_state({{"atom", Event(chart, atom.at_time(0.0))}, {"detector", Event(chart, det.at_time(0.0))}},
                                    {{"excited", 1.0}}));
    rec.states.push_back(
        make_state({{"atom", rec.emission}, {"detector", Event(chart, d_then)}}, {{"decayed", 1.0}}));

    const PhotonPhaseField photon = emitted_photon(rec);
    rec.e_emit = grid_relative_kinematics(photon, rec.atom_grid, rec.emission).e_gamma;

    if (rec.heading == Heading::right) {
      // Detector meets the front light line of the band.
      const double t_enter = (det.x0 - pe.x + pe.t) / (1.0 - det.beta);
      const double overlap = spec_.band_width / (det.gamma() * (1.0 - det.beta));
      const double tau_hit = spec_.detector_rate > 0.0 ? hit / spec_.detector_rate
                                                       : std::numeric_limits<double>::infinity();
      const double t_hit = t_enter + det.gamma() * tau_hit;
      if (tau_hit <= overlap && t_hit <= spec_.horizon) {
        rec.detected = true;
        rec.detection_time = t_hit;
        rec.detection = Event(chart, det.at_time(t_hit));
        rec.detector_grid = local_grid(*detector_, *rec.detection);
        rec.e_detect = grid_relative_kinematics(photon, *rec.detector_grid, *rec.detection).e_gamma;
        rec.states.push_back(make_state({{"atom", Event(chart, atom.at_time(t_hit))}, {"detector", *rec.detection}},
                                        {{"absorbed", 1.0}}));
      }
    }
    return rec;
  }

  ScenarioResult run(std::uint64_t trials) const {
    require(trials >= 1, ErrorCode::invalid_argument, "need at least one trial");
    ScenarioResult out;
    out.trials.reserve(trials);
    for (std::uint64_t i = 0; i < trials; ++i) {
      out.trials.push_back(run_trial(i));
      out.jump_times.push_back(out.trials.back().jump_time);
      if (out.trials.back().detected) out.detection_times.push_back(out.trials.back().detection_time);
    }
    return out;
  }

  // Photon emitted at the jump: one phase component whose rate makes its
  // energy on the atom's grid equal the transition energy.
  PhotonPhaseField emitted_photon(const TrialRecord& rec) const {
    const double g = 1.0 / std::sqrt(1.0 - spec_.atom_beta * spec_.atom_beta);
    const double shift = rec.heading == Heading::right ? 1.0 - spec_.atom_beta : 1.0 + spec_.atom_beta;
    const double rate = spec_.transition_energy / (g * shift);
    const Vec2 p = rec.emission.point();
    const double u0 = rec.heading == Heading::right ? p.t - p.x : p.t + p.x;
    return PhotonPhaseField(rec.heading, {{Complex{1.0, 0.0}, 0.0, rate}}, {u0, u0 + spec_.band_width});
  }

 private:
  ScenarioSpec spec_;
  std::shared_ptr<WaveFunction> atom_;
  std::shared_ptr<WaveFunction> detector_;
};

inline ScenarioResult run_decay_detection(const ScenarioSpec& spec, std::uint64_t trials) {
  return DecayScenario(spec).run(trials);
}

struct EnergyBookkeeping {
  double e_emit;
  double e_detect;
  bool emission_site_conserved;
  bool detection_site_conserved;
  bool locally_conserved_at_each_site;
};

// Energy on each interaction site's own grid. The two sites are not
// reconciled with each other.
inline EnergyBookkeeping photon_energy_bookkeeping(const TrialRecord& rec, double transition_energy) {
  require(rec.detected, ErrorCode::no_detection_site, "photon was never detected");
  const bool emit_ok = std::abs(rec.e_emit - transition_energy) <= 1e-9 * transition_energy;
  const bool detect_ok = std::isfinite(rec.e_detect) && rec.e_detect > 0.0;
  return {rec.e_emit, rec.e_detect, emit_ok, detect_ok, emit_ok && detect_ok};
}

// Kolmogorov-Smirnov distance of a sample from Exp(rate).
inline double ks_distance_exponential(std::vector<double> xs, double rate) {
  require(!xs.empty(), ErrorCode::insufficient_points, "empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = 1.0 - std::exp(-rate * xs[i]);
    d = std::max({d, F - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - F});
  }
  return d;
}

}  // namespace transcoord
