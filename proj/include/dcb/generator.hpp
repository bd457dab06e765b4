#pragma once

#include <cstdint>
#include <optional>

#include "dcb/scenario.hpp"

namespace dcb {

struct GeneratorParams {
  int flights = 50;
  int sectors = 6;
  int target_hotspots = 8;
  int hotspot_tolerance = 2;
  Minutes max_delay_min = 20;
  Minutes max_delay_max = 40;
  Minutes horizon = 360;
  Minutes period_duration = 60;
  Minutes period_step = 30;
  int min_crossings = 1;
  int max_crossings = 3;
  Minutes min_crossing_duration = 8;
  Minutes max_crossing_duration = 25;
  /// Share of flights whose start falls in one of `peaks` windows of
  /// `peak_width` minutes; the rest start uniformly.
  double peak_fraction = 0.0;
  int peaks = 3;
  Minutes peak_width = 30;
  /// Probability that a flight is regulatable (commercial).
  double regulatable_fraction = 1.0;
  /// When set, every sector gets this capacity and the hotspot target is ignored.
  std::optional<int> fixed_capacity;
  /// Require a zero-hotspot assignment to be reachable by a greedy delay heuristic.
  bool require_solvable = true;
  int max_attempts = 200;

  void validate() const;
};

/// Random scenario with identity sector configuration. A pure function of
/// (params, seed). Throws Error(Generation) when no attempt meets the hotspot
/// target (and solvability check) within max_attempts.
Scenario generate_scenario(const GeneratorParams& params, std::uint64_t seed);

/// Greedy witness: repeatedly delays by one minute the participant of the first
/// hotspot that enters its sector last. Returns a zero-hotspot assignment or
/// nullopt when the heuristic gets stuck.
std::optional<DelayAssignment> greedy_resolution(const Scenario& s);

}  // namespace dcb
