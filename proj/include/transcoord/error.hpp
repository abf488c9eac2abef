#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace transcoord {

// Every failure the library reports carries one of these codes. The string
// form (see error_name) is what the CLI prints on the diagnostic stream.
enum class ErrorCode {
  invalid_argument,
  invalid_metric,
  chart_mismatch,
  no_unique_geodesic,
  scale_too_coarse,
  superluminal_boost,
  outside_packet,
  insufficient_stencil,
  unstable_evolution,
  no_analytic_form,
  vanishing_density,
  spacelike_current,
  non_normalizable,
  line_truncated,
  undefined_grid,
  cost_guard,
  insufficient_points,
  outside_band,
  direction_mismatch,
  grid_event_mismatch,
  requires_flat_region,
  not_reachable,
  not_normalized,
  not_spacelike,
  not_successor,
  particle_mismatch,
  unknown_component,
  unknown_trigger,
  no_detection_site,
  io_error,
};

constexpr std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::invalid_metric: return "invalid-metric";
    case ErrorCode::chart_mismatch: return "chart-mismatch";
    case ErrorCode::no_unique_geodesic: return "no-unique-geodesic";
    case ErrorCode::scale_too_coarse: return "scale-too-coarse";
    case ErrorCode::superluminal_boost: return "superluminal-boost";
    case ErrorCode::outside_packet: return "outside-packet";
    case ErrorCode::insufficient_stencil: return "insufficient-stencil";
    case ErrorCode::unstable_evolution: return "unstable-evolution";
    case ErrorCode::no_analytic_form: return "no-analytic-form";
    case ErrorCode::vanishing_density: return "vanishing-density";
    case ErrorCode::spacelike_current: return "spacelike-current";
    case ErrorCode::non_normalizable: return "non-normalizable";
    case ErrorCode::line_truncated: return "line-truncated";
    case ErrorCode::undefined_grid: return "undefined-grid";
    case ErrorCode::cost_guard: return "cost-guard";
    case ErrorCode::insufficient_points: return "insufficient-points";
    case ErrorCode::outside_band: return "outside-band";
    case ErrorCode::direction_mismatch: return "direction-mismatch";
    case ErrorCode::grid_event_mismatch: return "grid-event-mismatch";
    case ErrorCode::requires_flat_region: return "requires-flat-region";
    case ErrorCode::not_reachable: return "not-reachable";
    case ErrorCode::not_normalized: return "not-normalized";
    case ErrorCode::not_spacelike: return "not-spacelike";
    case ErrorCode::not_successor: return "not-successor";
    case ErrorCode::particle_mismatch: return "particle-mismatch";
    case ErrorCode::unknown_component: return "unknown-component";
    case ErrorCode::unknown_trigger: return "unknown-trigger";
    case ErrorCode::no_detection_site: return "no-detection-site";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) { throw Error(code, detail); }

inline void require(bool condition, ErrorCode code, const std::string& detail) {
  if (!condition) fail(code, detail);
}

}  // namespace transcoord
