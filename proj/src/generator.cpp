#include "dcb/generator.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "dcb/error.hpp"
#include "dcb/random.hpp"
#include "dcb/traffic.hpp"

namespace dcb {

void GeneratorParams::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::Parameter, msg); };
  if (flights < 0) fail("flight count must be non-negative");
  if (sectors < 1) fail("need at least one sector");
  if (target_hotspots < 0 || hotspot_tolerance < 0) fail("hotspot target and tolerance must be non-negative");
  if (max_delay_min < 0 || max_delay_max < max_delay_min) fail("bad max_delay range");
  if (min_crossings < 1 || max_crossings < min_crossings) fail("bad crossings-per-flight range");
  if (min_crossing_duration < 1 || max_crossing_duration < min_crossing_duration)
    fail("bad crossing duration range");
  if (period_duration <= 0 || period_step <= 0 || period_step > period_duration ||
      period_duration > horizon)
    fail("bad counting parameters");
  if (max_crossings * max_crossing_duration + max_delay_max > horizon)
    fail("horizon too short for the longest flight plus max delay");
  if (regulatable_fraction < 0.0 || regulatable_fraction > 1.0) fail("regulatable fraction outside [0,1]");
  if (fixed_capacity && *fixed_capacity < 0) fail("fixed capacity must be non-negative");
  if (max_attempts < 1) fail("max_attempts must be positive");
  if (peak_fraction < 0.0 || peak_fraction > 1.0) fail("peak fraction outside [0,1]");
  if (peak_fraction > 0.0 && (peaks < 1 || peak_width < 0)) fail("bad peak parameters");
}

namespace {

constexpr std::array<const char*, 3> kClasses{"light", "medium", "heavy"};

Scenario draw_traffic(const GeneratorParams& p, Rng& rng) {
  Scenario s;
  s.horizon = p.horizon;
  s.period_duration = p.period_duration;
  s.period_step = p.period_step;
  for (int r = 0; r < p.sectors; ++r) s.sectors.push_back({"S" + std::to_string(r + 1), p.flights});
  s.timeline.push_back(identity_interval(s.sectors, s.horizon));

  // Peak centres are offsets into each flight's admissible start range.
  std::vector<double> centres;
  if (p.peak_fraction > 0.0)
    for (int k = 0; k < p.peaks; ++k) centres.push_back(rng.uniform());

  for (int i = 0; i < p.flights; ++i) {
    FlightPlan f;
    f.id = "F" + std::to_string(i + 1);
    f.max_delay = static_cast<Minutes>(rng.uniform_int(p.max_delay_min, p.max_delay_max));
    f.aircraft_class = kClasses[static_cast<std::size_t>(rng.uniform_int(0, 2))];
    f.regulatable = rng.uniform() < p.regulatable_fraction;

    const int legs = p.sectors == 1 ? 1 : static_cast<int>(rng.uniform_int(p.min_crossings, p.max_crossings));
    std::vector<std::pair<int, Minutes>> route;
    Minutes length = 0;
    int prev = -1;
    for (int k = 0; k < legs; ++k) {
      int sec;
      do {
        sec = static_cast<int>(rng.uniform_int(0, p.sectors - 1));
      } while (sec == prev);
      const auto dur = static_cast<Minutes>(rng.uniform_int(p.min_crossing_duration, p.max_crossing_duration));
      route.emplace_back(sec, dur);
      length += dur;
      prev = sec;
    }
    const Minutes latest = p.horizon - length - f.max_delay;
    Minutes t = 0;
    if (!centres.empty() && rng.uniform() < p.peak_fraction) {
      const double c = centres[static_cast<std::size_t>(rng.uniform_int(0, p.peaks - 1))];
      const auto mid = static_cast<Minutes>(c * latest);
      t = std::clamp(mid + static_cast<Minutes>(rng.uniform_int(-p.peak_width / 2, p.peak_width / 2)), 0, latest);
    } else {
      t = static_cast<Minutes>(rng.uniform_int(0, latest));
    }
    for (const auto& [sec, dur] : route) {
      f.crossings.push_back({s.sectors[static_cast<std::size_t>(sec)].id, t, t + dur});
      t += dur;
    }
    s.flights.push_back(std::move(f));
  }
  return s;
}

// Lowers sector capacities from their peak demand until the hotspot count
// reaches the target. Returns the resulting hotspot count.
int tune_capacities(Scenario& s, const GeneratorParams& p, Rng& rng) {
  const TrafficModel model(s);
  const auto table = model.demand(DelayAssignment(s.flights.size()));
  const std::size_t np = table.period_count();
  auto hot_at = [&](std::size_t r, int cap) {
    int n = 0;
    for (std::size_t q = 0; q < np; ++q) n += table.at(r, q) > cap;
    return n;
  };

  std::vector<int> caps(s.sectors.size());
  for (std::size_t r = 0; r < caps.size(); ++r) {
    int peak = 0;
    for (std::size_t q = 0; q < np; ++q) peak = std::max(peak, table.at(r, q));
    caps[r] = std::max(peak, 1);
  }
  int total = 0;
  const int ceiling = p.target_hotspots + p.hotspot_tolerance;
  while (total < p.target_hotspots) {
    std::vector<std::size_t> candidates;
    for (std::size_t r = 0; r < caps.size(); ++r) {
      if (caps[r] <= 1) continue;
      const int next = total - hot_at(r, caps[r]) + hot_at(r, caps[r] - 1);
      if (next <= ceiling) candidates.push_back(r);
    }
    if (candidates.empty()) break;
    const auto r = candidates[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(candidates.size()) - 1))];
    total += hot_at(r, caps[r] - 1) - hot_at(r, caps[r]);
    --caps[r];
  }
  for (std::size_t r = 0; r < caps.size(); ++r) s.sectors[r].capacity = caps[r];
  return total;
}

}  // namespace

Scenario generate_scenario(const GeneratorParams& params, std::uint64_t seed) {
  params.validate();
  int last_hotspots = -1;
  int unsolvable = 0;
  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    Rng rng({seed, static_cast<std::uint64_t>(attempt)});
    Scenario s = draw_traffic(params, rng);
    if (params.fixed_capacity) {
      for (auto& sec : s.sectors) sec.capacity = *params.fixed_capacity;
      return s;
    }
    last_hotspots = tune_capacities(s, params, rng);
    if (std::abs(last_hotspots - params.target_hotspots) > params.hotspot_tolerance) continue;
    if (params.require_solvable && last_hotspots > 0 && !greedy_resolution(s)) {
      ++unsolvable;
      continue;
    }
    return s;
  }
  throw Error(ErrorKind::Generation,
              "no scenario met the target of " + std::to_string(params.target_hotspots) + " +/- " +
                  std::to_string(params.hotspot_tolerance) + " hotspots in " +
                  std::to_string(params.max_attempts) + " attempts (last attempt: " +
                  std::to_string(last_hotspots) + " hotspots; " + std::to_string(unsolvable) +
                  " candidates rejected as unsolvable)");
}

std::optional<DelayAssignment> greedy_resolution(const Scenario& s) {
  const TrafficModel model(s);
  DelayAssignment d(s.flights.size());
  Minutes budget = 0;
  for (const auto& f : s.flights) budget += f.delay_limit();
  for (Minutes iter = 0; iter <= budget; ++iter) {
    const auto hotspots = model.hotspots(d);
    if (hotspots.empty()) return d;
    int pick = -1;
    for (const auto& h : hotspots) {
      Minutes latest = -1;
      for (int f : h.participants) {
        const auto fi = static_cast<std::size_t>(f);
        if (d[fi] >= model.delay_limit(fi)) continue;
        for (const auto& fr : model.fragments(fi, d[fi])) {
          if (fr.sector != h.sector) continue;
          if (fr.entry >= h.period.end || fr.exit <= h.period.start) continue;
          if (fr.entry >= latest) {
            latest = fr.entry;
            pick = f;
          }
        }
      }
      if (pick >= 0) break;
    }
    if (pick < 0) return std::nullopt;
    ++d[static_cast<std::size_t>(pick)];
  }
  return std::nullopt;
}

}  // namespace dcb
