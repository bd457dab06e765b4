#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dcb {

/// All times are integer minutes from scenario start.
using Minutes = int;

struct Sector {
  std::string id;
  int capacity = 0;  // max entries per counting-period duration
};

/// Maps elementary sectors onto the open sectors active during [start, end).
struct ConfigurationInterval {
  Minutes start = 0;
  Minutes end = 0;
  std::map<std::string, std::string> mapping;
};

/// Presence of a flight in an elementary sector over [entry, exit).
struct SectorCrossing {
  std::string sector;
  Minutes entry = 0;
  Minutes exit = 0;
};

struct FlightPlan {
  std::string id;
  std::vector<SectorCrossing> crossings;
  Minutes max_delay = 0;
  std::string aircraft_class = "medium";
  bool regulatable = true;

  /// Largest delay this flight may actually receive (0 when not regulatable).
  Minutes delay_limit() const noexcept { return regulatable ? max_delay : 0; }
};

struct Scenario {
  std::vector<Sector> sectors;  // open sectors, carrying capacities
  std::vector<ConfigurationInterval> timeline;
  std::vector<FlightPlan> flights;
  Minutes horizon = 0;
  Minutes period_duration = 60;
  Minutes period_step = 30;

  std::optional<std::size_t> sector_index(std::string_view id) const;
  std::optional<std::size_t> flight_index(std::string_view id) const;

  /// Largest delay_limit() over all flights.
  Minutes max_delay_limit() const noexcept;
};

/// A single interval covering [0, horizon) that maps every open sector to itself.
ConfigurationInterval identity_interval(const std::vector<Sector>& sectors, Minutes horizon);

/// Ground delay per flight, indexed in scenario flight order.
struct DelayAssignment {
  std::vector<Minutes> minutes;

  DelayAssignment() = default;
  explicit DelayAssignment(std::size_t flights) : minutes(flights, 0) {}
  explicit DelayAssignment(std::vector<Minutes> m) : minutes(std::move(m)) {}

  std::size_t size() const noexcept { return minutes.size(); }
  Minutes& operator[](std::size_t i) { return minutes[i]; }
  Minutes operator[](std::size_t i) const { return minutes[i]; }
  Minutes total() const noexcept;

  friend bool operator==(const DelayAssignment&, const DelayAssignment&) = default;
};

/// Delays of this many minutes or less count as "no delay" in the reported metrics.
inline constexpr Minutes kNoDelayThreshold = 4;

/// Flights whose delay exceeds kNoDelayThreshold.
int regulated_flights(const DelayAssignment& d);
/// Sum of delays above kNoDelayThreshold.
Minutes regulated_delay(const DelayAssignment& d);
/// regulated_delay / number of flights (0 for an empty assignment).
double average_regulated_delay(const DelayAssignment& d);

/// Throws Precondition unless every delay lies in [0, delay_limit()].
void require_feasible(const Scenario& s, const DelayAssignment& d);
bool is_feasible(const Scenario& s, const DelayAssignment& d);

struct Violation {
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool has(std::string_view code) const;
  std::string to_string() const;
};

ValidationReport validate_scenario(const Scenario& s);

/// Throws Error(Validation) carrying the report text when the scenario is malformed.
void require_valid(const Scenario& s);

struct ResolvedCrossing {
  std::string sector;  // open-sector id
  Minutes entry = 0;
  Minutes exit = 0;

  friend bool operator==(const ResolvedCrossing&, const ResolvedCrossing&) = default;
};

/// Shifts every crossing by `delay`, splits it at configuration boundaries and
/// maps each piece to its open sector. Abutting pieces in the same open sector
/// are merged. Throws OutOfHorizon when a shifted crossing ends past the horizon.
std::vector<ResolvedCrossing> resolve_crossings(const FlightPlan& f, Minutes delay,
                                                const Scenario& s);

using FlightSelector = std::function<bool(const FlightPlan&)>;

/// Copy of `s` where selected flights have max_delay capped at `cap`.
Scenario apply_local_max_delay(const Scenario& s, const FlightSelector& selector, Minutes cap);

}  // namespace dcb
