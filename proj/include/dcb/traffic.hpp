#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "dcb/scenario.hpp"

namespace dcb {

/// Half-open window [start, end) over which sector entries are counted.
struct CountingPeriod {
  int index = 0;
  Minutes start = 0;
  Minutes end = 0;

  friend bool operator==(const CountingPeriod&, const CountingPeriod&) = default;
};

/// Periods start at 0, step, 2*step, ... while start < horizon; each lasts `duration`.
std::vector<CountingPeriod> counting_periods(Minutes horizon, Minutes duration, Minutes step);

/// Overlap: a flight counts in (R, p) when its presence in R overlaps p.
/// Entry: it counts only when it enters R inside p (sensitivity runs).
enum class CountingRule { Overlap, Entry };

/// A resolved crossing with the open sector given by index into Scenario::sectors.
struct Fragment {
  int sector = 0;
  Minutes entry = 0;
  Minutes exit = 0;
};

class DemandTable {
 public:
  DemandTable() = default;
  DemandTable(std::size_t sectors, std::size_t periods)
      : sectors_(sectors), periods_(periods), counts_(sectors * periods, 0) {}

  int at(std::size_t sector, std::size_t period) const { return counts_[sector * periods_ + period]; }
  int& at(std::size_t sector, std::size_t period) { return counts_[sector * periods_ + period]; }

  std::size_t sector_count() const noexcept { return sectors_; }
  std::size_t period_count() const noexcept { return periods_; }

  friend bool operator==(const DemandTable&, const DemandTable&) = default;

 private:
  std::size_t sectors_ = 0;
  std::size_t periods_ = 0;
  std::vector<int> counts_;
};

struct Hotspot {
  int sector = 0;  // index into Scenario::sectors
  CountingPeriod period;
  int demand = 0;
  int capacity = 0;
  std::vector<int> participants;  // flight indices, ascending

  int excess() const noexcept { return demand - capacity; }
};

/// Undirected graph over flights; an edge joins two flights that share a hotspot.
class CoordinationGraph {
 public:
  CoordinationGraph() = default;
  explicit CoordinationGraph(std::size_t vertices) : adjacency_(vertices) {}

  static CoordinationGraph from_hotspots(std::span<const Hotspot> hotspots, std::size_t vertices);

  std::size_t vertex_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept;

  /// Neighbours excluding the vertex itself, ascending.
  std::span<const int> neighbours(std::size_t v) const { return adjacency_[v]; }
  /// |N(v)| counting v itself.
  std::size_t neighbourhood_size(std::size_t v) const { return adjacency_[v].size() + 1; }
  std::size_t degree(std::size_t v) const { return adjacency_[v].size(); }
  bool has_edge(std::size_t a, std::size_t b) const;

  /// Edges as (lower, higher) index pairs in lexicographic order.
  std::vector<std::pair<int, int>> edges() const;

 private:
  std::vector<std::vector<int>> adjacency_;
};

struct DegreeStats {
  std::size_t non_isolated = 0;
  std::size_t min = 0;
  std::size_t max = 0;
  double mean = 0.0;  // over non-isolated vertices
};

DegreeStats degree_stats(const CoordinationGraph& g);

/// Everything the environment needs to know about one delay assignment.
struct TrafficSnapshot {
  DemandTable demand;
  std::vector<Hotspot> hotspots;
  std::vector<int> hotspot_count;  // per flight
  std::vector<Minutes> congested;  // per flight TDC
  CoordinationGraph graph;
};

/// Scenario plus the crossings of every flight resolved for every admissible
/// delay, so demand evaluation is a table walk.
class TrafficModel {
 public:
  explicit TrafficModel(Scenario s, CountingRule rule = CountingRule::Overlap);

  const Scenario& scenario() const noexcept { return scenario_; }
  CountingRule rule() const noexcept { return rule_; }
  std::size_t flight_count() const noexcept { return scenario_.flights.size(); }
  std::size_t sector_count() const noexcept { return scenario_.sectors.size(); }
  const std::vector<CountingPeriod>& periods() const noexcept { return periods_; }

  Minutes delay_limit(std::size_t flight) const { return scenario_.flights[flight].delay_limit(); }
  std::span<const Fragment> fragments(std::size_t flight, Minutes delay) const;

  DemandTable demand(const DelayAssignment& d) const;
  std::vector<Hotspot> hotspots(const DelayAssignment& d) const;
  Minutes congested_duration(std::size_t flight, const DelayAssignment& d,
                             std::span<const Hotspot> hotspots) const;
  TrafficSnapshot snapshot(const DelayAssignment& d) const;

  /// Indices of the periods a fragment is counted in, as an inclusive range (lo > hi when none).
  std::pair<int, int> period_range(const Fragment& fr) const;

 private:
  std::vector<Hotspot> hotspots_from(const DelayAssignment& d, const DemandTable& table) const;

  Scenario scenario_;
  CountingRule rule_;
  std::vector<CountingPeriod> periods_;
  // fragments_[offsets_[flight] + delay] spans into storage_.
  std::vector<std::size_t> offsets_;
  std::vector<std::pair<std::size_t, std::size_t>> spans_;
  std::vector<Fragment> storage_;
};

DemandTable compute_demand(const Scenario& s, const DelayAssignment& d,
                           CountingRule rule = CountingRule::Overlap);
std::vector<Hotspot> detect_hotspots(const Scenario& s, const DelayAssignment& d);
Minutes congested_duration(std::string_view flight_id, const Scenario& s, const DelayAssignment& d);
CoordinationGraph build_graph(std::span<const Hotspot> hotspots, std::size_t flights);

/// CSV rows: sector,period_start,period_end,demand,capacity,excess (every cell).
void write_demand_csv(std::ostream& os, const TrafficModel& model, const DemandTable& table);
/// Same columns plus participants, hotspot cells only.
void write_hotspots_csv(std::ostream& os, const TrafficModel& model,
                        std::span<const Hotspot> hotspots);

}  // namespace dcb
