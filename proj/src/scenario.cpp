#include "dcb/scenario.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "dcb/error.hpp"

namespace dcb {

std::optional<std::size_t> Scenario::sector_index(std::string_view id) const {
  for (std::size_t i = 0; i < sectors.size(); ++i)
    if (sectors[i].id == id) return i;
  return std::nullopt;
}

std::optional<std::size_t> Scenario::flight_index(std::string_view id) const {
  for (std::size_t i = 0; i < flights.size(); ++i)
    if (flights[i].id == id) return i;
  return std::nullopt;
}

Minutes Scenario::max_delay_limit() const noexcept {
  Minutes m = 0;
  for (const auto& f : flights) m = std::max(m, f.delay_limit());
  return m;
}

ConfigurationInterval identity_interval(const std::vector<Sector>& sectors, Minutes horizon) {
  ConfigurationInterval ci;
  ci.start = 0;
  ci.end = horizon;
  for (const auto& s : sectors) ci.mapping.emplace(s.id, s.id);
  return ci;
}

Minutes DelayAssignment::total() const noexcept {
  return std::accumulate(minutes.begin(), minutes.end(), Minutes{0});
}

int regulated_flights(const DelayAssignment& d) {
  return static_cast<int>(std::count_if(d.minutes.begin(), d.minutes.end(),
                                        [](Minutes m) { return m > kNoDelayThreshold; }));
}

Minutes regulated_delay(const DelayAssignment& d) {
  Minutes sum = 0;
  for (Minutes m : d.minutes)
    if (m > kNoDelayThreshold) sum += m;
  return sum;
}

double average_regulated_delay(const DelayAssignment& d) {
  if (d.size() == 0) return 0.0;
  return static_cast<double>(regulated_delay(d)) / static_cast<double>(d.size());
}

bool is_feasible(const Scenario& s, const DelayAssignment& d) {
  if (d.size() != s.flights.size()) return false;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d[i] < 0 || d[i] > s.flights[i].delay_limit()) return false;
  return true;
}

void require_feasible(const Scenario& s, const DelayAssignment& d) {
  if (d.size() != s.flights.size())
    throw Error(ErrorKind::Precondition,
                "delay assignment has " + std::to_string(d.size()) + " entries, scenario has " +
                    std::to_string(s.flights.size()) + " flights");
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] < 0 || d[i] > s.flights[i].delay_limit())
      throw Error(ErrorKind::Precondition,
                  "delay " + std::to_string(d[i]) + " of flight " + s.flights[i].id +
                      " outside [0, " + std::to_string(s.flights[i].delay_limit()) + "]");
  }
}

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.code == code; });
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) os << v.code << ": " << v.message << '\n';
  return os.str();
}

namespace {

std::vector<const ConfigurationInterval*> sorted_timeline(const Scenario& s) {
  std::vector<const ConfigurationInterval*> out;
  out.reserve(s.timeline.size());
  for (const auto& ci : s.timeline) out.push_back(&ci);
  std::stable_sort(out.begin(), out.end(),
                   [](const auto* a, const auto* b) { return a->start < b->start; });
  return out;
}

}  // namespace

ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport r;
  auto add = [&](std::string code, std::string msg) {
    r.violations.push_back({std::move(code), std::move(msg)});
  };

  if (s.horizon <= 0) add("bad-horizon", "horizon must be positive");
  if (s.period_duration <= 0 || s.period_step <= 0)
    add("bad-counting-parameters", "period duration and step must be positive");
  else if (s.period_step > s.period_duration)
    add("bad-counting-parameters", "period step exceeds period duration");
  else if (s.horizon > 0 && s.period_duration > s.horizon)
    add("bad-counting-parameters", "period duration exceeds horizon");

  std::set<std::string> sector_ids;
  for (const auto& sec : s.sectors) {
    if (sec.id.empty()) add("empty-id", "sector with empty id");
    if (!sector_ids.insert(sec.id).second)
      add("duplicate-sector", "duplicate sector id " + sec.id);
    if (sec.capacity < 0)
      add("negative-capacity", "sector " + sec.id + " has negative capacity");
  }

  // Timeline: non-empty intervals, mapped targets exist, contiguous cover of [0, horizon).
  const auto timeline = sorted_timeline(s);
  for (const auto* ci : timeline) {
    if (ci->start >= ci->end)
      add("empty-interval", "configuration interval [" + std::to_string(ci->start) + "," +
                                std::to_string(ci->end) + ") is empty");
    for (const auto& [elem, open] : ci->mapping) {
      if (!sector_ids.count(open))
        add("dangling-sector", "configuration maps " + elem + " to unknown open sector " + open);
    }
  }
  Minutes covered = 0;
  for (const auto* ci : timeline) {
    if (ci->start > covered)
      add("timeline-gap", "timeline gap over [" + std::to_string(covered) + "," +
                              std::to_string(ci->start) + ")");
    else if (ci->start < covered)
      add("timeline-overlap", "configuration intervals overlap at " + std::to_string(ci->start));
    covered = std::max(covered, ci->end);
  }
  if (covered < s.horizon)
    add("timeline-gap", "timeline gap over [" + std::to_string(covered) + "," +
                            std::to_string(s.horizon) + ")");

  std::set<std::string> flight_ids;
  for (const auto& f : s.flights) {
    if (f.id.empty()) add("empty-id", "flight with empty id");
    if (!flight_ids.insert(f.id).second) add("duplicate-flight", "duplicate flight id " + f.id);
    if (f.max_delay < 0) add("negative-max-delay", "flight " + f.id + " has negative max_delay");
    const Minutes slack = std::max(f.max_delay, 0);
    for (std::size_t k = 0; k < f.crossings.size(); ++k) {
      const auto& c = f.crossings[k];
      const std::string where = "flight " + f.id + " crossing " + std::to_string(k);
      if (c.entry >= c.exit)
        add("degenerate-crossing", "degenerate crossing in " + where + " (entry >= exit)");
      if (c.entry < 0) add("out-of-horizon", where + " starts before 0");
      if (c.exit + slack > s.horizon)
        add("out-of-horizon", where + " plus max_delay ends past the horizon");
      if (k > 0 && f.crossings[k - 1].exit > c.entry)
        add("unordered-crossings", "crossings of flight " + f.id + " overlap or are unordered at " +
                                       std::to_string(k));
      // The elementary sector must be mapped wherever the crossing can land.
      for (const auto* ci : timeline) {
        if (ci->end <= c.entry || ci->start >= c.exit + slack) continue;
        if (!ci->mapping.count(c.sector)) {
          add("dangling-sector", where + " uses sector " + c.sector +
                                     " which is unmapped in configuration starting at " +
                                     std::to_string(ci->start));
          break;
        }
      }
    }
  }
  return r;
}

void require_valid(const Scenario& s) {
  auto report = validate_scenario(s);
  if (!report.ok()) throw Error(ErrorKind::Validation, "invalid scenario:\n" + report.to_string());
}

std::vector<ResolvedCrossing> resolve_crossings(const FlightPlan& f, Minutes delay,
                                                const Scenario& s) {
  if (delay < 0 || delay > f.max_delay)
    throw Error(ErrorKind::Precondition, "delay " + std::to_string(delay) + " outside [0, " +
                                             std::to_string(f.max_delay) + "] for " + f.id);
  const auto timeline = sorted_timeline(s);
  std::vector<ResolvedCrossing> out;
  for (const auto& c : f.crossings) {
    const Minutes entry = c.entry + delay;
    const Minutes exit = c.exit + delay;
    if (exit > s.horizon)
      throw Error(ErrorKind::OutOfHorizon, "flight " + f.id + " delayed by " +
                                               std::to_string(delay) + " exits sector " + c.sector +
                                               " past the horizon");
    for (const auto* ci : timeline) {
      const Minutes lo = std::max(entry, ci->start);
      const Minutes hi = std::min(exit, ci->end);
      if (lo >= hi) continue;
      auto it = ci->mapping.find(c.sector);
      if (it == ci->mapping.end())
        throw Error(ErrorKind::Validation, "sector " + c.sector + " unmapped at minute " +
                                               std::to_string(lo));
      if (!out.empty() && out.back().sector == it->second && out.back().exit == lo)
        out.back().exit = hi;
      else
        out.push_back({it->second, lo, hi});
    }
  }
  return out;
}

Scenario apply_local_max_delay(const Scenario& s, const FlightSelector& selector, Minutes cap) {
  if (cap < 0) throw Error(ErrorKind::Parameter, "local max delay cap must be non-negative");
  Scenario out = s;
  for (auto& f : out.flights)
    if (selector(f)) f.max_delay = std::min(f.max_delay, cap);
  return out;
}

}  // namespace dcb
