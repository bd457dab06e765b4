#pragma once

#include <string>

#include "dcb/random.hpp"
#include "dcb/scenario.hpp"
#include "dcb/scenario_io.hpp"

namespace fx {

inline std::string data(const std::string& name) { return std::string(DCB_TEST_DATA) + "/" + name; }

/// One sector of capacity 2; f1 [10,20), f2 [15,25), f3 [50,59); max delay 10; period 60/60.
inline dcb::Scenario tiny3() {
  dcb::Scenario s;
  s.sectors = {{"S1", 2}};
  s.horizon = 120;
  s.period_duration = 60;
  s.period_step = 60;
  s.timeline = {dcb::identity_interval(s.sectors, s.horizon)};
  s.flights = {{"f1", {{"S1", 10, 20}}, 10},
               {"f2", {{"S1", 15, 25}}, 10},
               {"f3", {{"S1", 50, 59}}, 10}};
  return s;
}

inline dcb::DelayAssignment delays(std::initializer_list<dcb::Minutes> m) {
  return dcb::DelayAssignment(std::vector<dcb::Minutes>(m));
}

/// Small random scenario, optionally with a two-interval sector configuration
/// that remaps elementary sectors halfway through the horizon.
inline dcb::Scenario micro(std::uint64_t seed, bool split_timeline) {
  dcb::Rng rng({seed, 0xfeedULL});
  dcb::Scenario s;
  s.horizon = 180;
  s.period_duration = 60;
  s.period_step = rng.coin() ? 30 : 60;
  const int n_sectors = static_cast<int>(rng.uniform_int(1, 3));
  for (int r = 0; r < n_sectors; ++r)
    s.sectors.push_back({"R" + std::to_string(r), static_cast<int>(rng.uniform_int(0, 3))});
  if (split_timeline) {
    const auto cut = static_cast<dcb::Minutes>(rng.uniform_int(20, 160));
    dcb::ConfigurationInterval a{0, cut, {}}, b{cut, s.horizon, {}};
    for (int r = 0; r < n_sectors; ++r) {
      a.mapping["e" + std::to_string(r)] = s.sectors[static_cast<std::size_t>(r)].id;
      b.mapping["e" + std::to_string(r)] = s.sectors[static_cast<std::size_t>((r + 1) % n_sectors)].id;
    }
    s.timeline = {a, b};
  } else {
    s.timeline = {dcb::identity_interval(s.sectors, s.horizon)};
  }
  const int n_flights = static_cast<int>(rng.uniform_int(0, 7));
  for (int i = 0; i < n_flights; ++i) {
    dcb::FlightPlan f;
    f.id = "x" + std::to_string(i);
    f.max_delay = static_cast<dcb::Minutes>(rng.uniform_int(0, 15));
    dcb::Minutes t = static_cast<dcb::Minutes>(rng.uniform_int(0, 90));
    const int legs = static_cast<int>(rng.uniform_int(1, 3));
    for (int k = 0; k < legs; ++k) {
      const auto dur = static_cast<dcb::Minutes>(rng.uniform_int(1, 20));
      const int r = static_cast<int>(rng.uniform_int(0, n_sectors - 1));
      const std::string sec = split_timeline ? "e" + std::to_string(r) : s.sectors[static_cast<std::size_t>(r)].id;
      f.crossings.push_back({sec, t, t + dur});
      t += dur + static_cast<dcb::Minutes>(rng.uniform_int(0, 5));
    }
    s.flights.push_back(f);
  }
  return s;
}

inline dcb::DelayAssignment random_delays(const dcb::Scenario& s, dcb::Rng& rng) {
  dcb::DelayAssignment d(s.flights.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = static_cast<dcb::Minutes>(rng.uniform_int(0, s.flights[i].delay_limit()));
  return d;
}

}  // namespace fx
