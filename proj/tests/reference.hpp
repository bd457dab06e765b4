#pragma once

// Slow, definition-level reimplementations used as test oracles. They walk the
// timeline minute by minute and share no code with the library.

#include <algorithm>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "dcb/scenario.hpp"
#include "dcb/traffic.hpp"

namespace ref {

using dcb::DelayAssignment;
using dcb::Minutes;
using dcb::Scenario;

/// Open sector index occupied by flight f at minute t, or -1.
inline int sector_at(const Scenario& s, std::size_t f, Minutes delay, Minutes t) {
  for (const auto& c : s.flights[f].crossings) {
    if (t < c.entry + delay || t >= c.exit + delay) continue;
    for (const auto& ci : s.timeline) {
      if (t < ci.start || t >= ci.end) continue;
      auto it = ci.mapping.find(c.sector);
      if (it == ci.mapping.end()) return -1;
      for (std::size_t r = 0; r < s.sectors.size(); ++r)
        if (s.sectors[r].id == it->second) return static_cast<int>(r);
    }
  }
  return -1;
}

struct Period {
  Minutes start, end;
};

inline std::vector<Period> periods(const Scenario& s) {
  std::vector<Period> out;
  for (Minutes t = 0; t < s.horizon; t += s.period_step) out.push_back({t, t + s.period_duration});
  return out;
}

/// Flights present in sector r at some minute of [p.start, p.end).
inline std::set<int> present(const Scenario& s, const DelayAssignment& d, int r, Period p) {
  std::set<int> out;
  for (std::size_t f = 0; f < s.flights.size(); ++f)
    for (Minutes t = p.start; t < p.end; ++t)
      if (sector_at(s, f, d[f], t) == r) {
        out.insert(static_cast<int>(f));
        break;
      }
  return out;
}

/// demand[r][p]
inline std::vector<std::vector<int>> demand(const Scenario& s, const DelayAssignment& d) {
  const auto ps = periods(s);
  std::vector<std::vector<int>> out(s.sectors.size(), std::vector<int>(ps.size(), 0));
  for (std::size_t r = 0; r < s.sectors.size(); ++r)
    for (std::size_t p = 0; p < ps.size(); ++p)
      out[r][p] = static_cast<int>(present(s, d, static_cast<int>(r), ps[p]).size());
  return out;
}

struct HotCell {
  std::string sector;
  Minutes start, end;
  int demand, capacity;
  std::vector<int> participants;
};

/// Cells with demand above capacity, ordered by (sector id, period start).
inline std::vector<HotCell> hotspots(const Scenario& s, const DelayAssignment& d) {
  const auto ps = periods(s);
  std::vector<HotCell> out;
  for (std::size_t r = 0; r < s.sectors.size(); ++r)
    for (auto p : ps) {
      const auto who = present(s, d, static_cast<int>(r), p);
      if (static_cast<int>(who.size()) > s.sectors[r].capacity)
        out.push_back({s.sectors[r].id, p.start, p.end, static_cast<int>(who.size()), s.sectors[r].capacity,
                       std::vector<int>(who.begin(), who.end())});
    }
  std::stable_sort(out.begin(), out.end(), [](const HotCell& a, const HotCell& b) {
    return a.sector != b.sector ? a.sector < b.sector : a.start < b.start;
  });
  return out;
}

/// Minutes flight f spends in a sector during a minute covered by one of that sector's hot periods.
inline Minutes tdc(const Scenario& s, const DelayAssignment& d, std::size_t f) {
  const auto hot = hotspots(s, d);
  Minutes total = 0;
  for (Minutes t = 0; t < s.horizon; ++t) {
    const int r = sector_at(s, f, d[f], t);
    if (r < 0) continue;
    const bool congested = std::any_of(hot.begin(), hot.end(), [&](const HotCell& h) {
      return h.sector == s.sectors[static_cast<std::size_t>(r)].id && t >= h.start && t < h.end;
    });
    if (congested) ++total;
  }
  return total;
}

/// Linear-cost local reward written out directly.
inline double local_reward(Minutes tdc, Minutes delay, double rate_per_min, double lambda = 20.0,
                           double positive = 60.0, double hotspot_rate = 81.0) {
  const double hot = tdc > 0 ? -hotspot_rate * tdc : positive;
  return hot - lambda * rate_per_min * delay;
}

}  // namespace ref
