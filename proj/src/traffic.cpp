#include "dcb/traffic.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include "dcb/error.hpp"

namespace dcb {

namespace {

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
int ceil_div(int a, int b) { return -floor_div(-a, b); }

// Measure of the fragment covered by the union of its hot periods. Periods are
// visited in ascending start order, so a running cursor avoids double counting.
template <typename IsHot>
Minutes covered_minutes(const Fragment& fr, std::pair<int, int> range,
                        const std::vector<CountingPeriod>& periods, IsHot&& is_hot) {
  Minutes total = 0;
  Minutes cursor = fr.entry;
  for (int p = range.first; p <= range.second; ++p) {
    if (!is_hot(p)) continue;
    const Minutes lo = std::max(cursor, periods[p].start);
    const Minutes hi = std::min(fr.exit, periods[p].end);
    if (hi > lo) {
      total += hi - lo;
      cursor = hi;
    }
  }
  return total;
}

}  // namespace

std::vector<CountingPeriod> counting_periods(Minutes horizon, Minutes duration, Minutes step) {
  if (step <= 0 || duration <= 0)
    throw Error(ErrorKind::Parameter, "counting period duration and step must be positive");
  if (step > duration) throw Error(ErrorKind::Parameter, "counting step exceeds period duration");
  if (duration > horizon) throw Error(ErrorKind::Parameter, "counting period exceeds horizon");
  std::vector<CountingPeriod> out;
  for (Minutes start = 0; start < horizon; start += step)
    out.push_back({static_cast<int>(out.size()), start, start + duration});
  return out;
}

std::size_t CoordinationGraph::edge_count() const noexcept {
  std::size_t n = 0;
  for (const auto& a : adjacency_) n += a.size();
  return n / 2;
}

bool CoordinationGraph::has_edge(std::size_t a, std::size_t b) const {
  const auto& adj = adjacency_[a];
  return std::binary_search(adj.begin(), adj.end(), static_cast<int>(b));
}

std::vector<std::pair<int, int>> CoordinationGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (std::size_t v = 0; v < adjacency_.size(); ++v)
    for (int w : adjacency_[v])
      if (w > static_cast<int>(v)) out.emplace_back(static_cast<int>(v), w);
  return out;
}

CoordinationGraph CoordinationGraph::from_hotspots(std::span<const Hotspot> hotspots,
                                                   std::size_t vertices) {
  CoordinationGraph g(vertices);
  for (const auto& h : hotspots) {
    for (int a : h.participants)
      for (int b : h.participants)
        if (a != b) g.adjacency_[a].push_back(b);
  }
  for (auto& adj : g.adjacency_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
  }
  return g;
}

DegreeStats degree_stats(const CoordinationGraph& g) {
  DegreeStats st;
  std::size_t sum = 0;
  for (std::size_t v = 0; v < g.vertex_count(); ++v) {
    const auto deg = g.degree(v);
    if (deg == 0) continue;
    st.min = st.non_isolated == 0 ? deg : std::min(st.min, deg);
    st.max = std::max(st.max, deg);
    sum += deg;
    ++st.non_isolated;
  }
  if (st.non_isolated > 0) st.mean = static_cast<double>(sum) / static_cast<double>(st.non_isolated);
  return st;
}

TrafficModel::TrafficModel(Scenario s, CountingRule rule) : scenario_(std::move(s)), rule_(rule) {
  require_valid(scenario_);
  periods_ = counting_periods(scenario_.horizon, scenario_.period_duration, scenario_.period_step);
  offsets_.reserve(scenario_.flights.size());
  for (const auto& f : scenario_.flights) {
    offsets_.push_back(spans_.size());
    for (Minutes d = 0; d <= f.delay_limit(); ++d) {
      const auto begin = storage_.size();
      for (const auto& rc : resolve_crossings(f, d, scenario_))
        storage_.push_back({static_cast<int>(*scenario_.sector_index(rc.sector)), rc.entry, rc.exit});
      spans_.emplace_back(begin, storage_.size() - begin);
    }
  }
}

std::span<const Fragment> TrafficModel::fragments(std::size_t flight, Minutes delay) const {
  if (delay < 0 || delay > delay_limit(flight))
    throw Error(ErrorKind::Precondition, "delay " + std::to_string(delay) + " infeasible for flight " +
                                             scenario_.flights[flight].id);
  const auto [begin, count] = spans_[offsets_[flight] + static_cast<std::size_t>(delay)];
  return {storage_.data() + begin, count};
}

std::pair<int, int> TrafficModel::period_range(const Fragment& fr) const {
  const int step = scenario_.period_step;
  const int last = static_cast<int>(periods_.size()) - 1;
  const int lo = std::max(0, ceil_div(fr.entry - scenario_.period_duration + 1, step));
  const int hi_time = rule_ == CountingRule::Overlap ? fr.exit - 1 : fr.entry;
  const int hi = std::min(last, floor_div(hi_time, step));
  return {lo, hi};
}

DemandTable TrafficModel::demand(const DelayAssignment& d) const {
  require_feasible(scenario_, d);
  const std::size_t np = periods_.size();
  DemandTable table(sector_count(), np);
  std::vector<int> stamp(sector_count() * np, -1);
  for (std::size_t f = 0; f < flight_count(); ++f) {
    for (const auto& fr : fragments(f, d[f])) {
      const auto [lo, hi] = period_range(fr);
      for (int p = lo; p <= hi; ++p) {
        const auto cell = static_cast<std::size_t>(fr.sector) * np + static_cast<std::size_t>(p);
        if (stamp[cell] == static_cast<int>(f)) continue;
        stamp[cell] = static_cast<int>(f);
        ++table.at(static_cast<std::size_t>(fr.sector), static_cast<std::size_t>(p));
      }
    }
  }
  return table;
}

std::vector<Hotspot> TrafficModel::hotspots_from(const DelayAssignment& d,
                                                 const DemandTable& table) const {
  const std::size_t np = periods_.size();
  std::vector<Hotspot> out;
  std::vector<int> cell_hotspot(sector_count() * np, -1);
  std::vector<std::size_t> by_id(sector_count());
  std::iota(by_id.begin(), by_id.end(), std::size_t{0});
  std::sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) {
    return scenario_.sectors[a].id < scenario_.sectors[b].id;
  });
  for (std::size_t r : by_id) {
    const int cap = scenario_.sectors[r].capacity;
    for (std::size_t p = 0; p < np; ++p) {
      if (table.at(r, p) <= cap) continue;
      cell_hotspot[r * np + p] = static_cast<int>(out.size());
      Hotspot h;
      h.sector = static_cast<int>(r);
      h.period = periods_[p];
      h.demand = table.at(r, p);
      h.capacity = cap;
      h.participants.reserve(static_cast<std::size_t>(h.demand));
      out.push_back(std::move(h));
    }
  }
  if (out.empty()) return out;
  for (std::size_t f = 0; f < flight_count(); ++f) {
    for (const auto& fr : fragments(f, d[f])) {
      const auto [lo, hi] = period_range(fr);
      for (int p = lo; p <= hi; ++p) {
        const int h = cell_hotspot[static_cast<std::size_t>(fr.sector) * np + static_cast<std::size_t>(p)];
        if (h < 0) continue;
        auto& parts = out[static_cast<std::size_t>(h)].participants;
        if (parts.empty() || parts.back() != static_cast<int>(f)) parts.push_back(static_cast<int>(f));
      }
    }
  }
  return out;
}

std::vector<Hotspot> TrafficModel::hotspots(const DelayAssignment& d) const {
  return hotspots_from(d, demand(d));
}

Minutes TrafficModel::congested_duration(std::size_t flight, const DelayAssignment& d,
                                         std::span<const Hotspot> hotspots) const {
  require_feasible(scenario_, d);
  const std::size_t np = periods_.size();
  std::vector<char> hot(sector_count() * np, 0);
  for (const auto& h : hotspots)
    hot[static_cast<std::size_t>(h.sector) * np + static_cast<std::size_t>(h.period.index)] = 1;
  Minutes total = 0;
  for (const auto& fr : fragments(flight, d[flight])) {
    const auto base = static_cast<std::size_t>(fr.sector) * np;
    total += covered_minutes(fr, period_range(fr), periods_,
                             [&](int p) { return hot[base + static_cast<std::size_t>(p)] != 0; });
  }
  return total;
}

TrafficSnapshot TrafficModel::snapshot(const DelayAssignment& d) const {
  TrafficSnapshot snap;
  snap.demand = demand(d);
  snap.hotspots = hotspots_from(d, snap.demand);
  const std::size_t n = flight_count();
  snap.hotspot_count.assign(n, 0);
  snap.congested.assign(n, 0);
  if (!snap.hotspots.empty()) {
    const std::size_t np = periods_.size();
    std::vector<char> hot(sector_count() * np, 0);
    for (const auto& h : snap.hotspots) {
      hot[static_cast<std::size_t>(h.sector) * np + static_cast<std::size_t>(h.period.index)] = 1;
      for (int f : h.participants) ++snap.hotspot_count[static_cast<std::size_t>(f)];
    }
    for (std::size_t f = 0; f < n; ++f) {
      if (snap.hotspot_count[f] == 0) continue;
      for (const auto& fr : fragments(f, d[f])) {
        const auto base = static_cast<std::size_t>(fr.sector) * np;
        snap.congested[f] += covered_minutes(
            fr, period_range(fr), periods_,
            [&](int p) { return hot[base + static_cast<std::size_t>(p)] != 0; });
      }
    }
  }
  snap.graph = CoordinationGraph::from_hotspots(snap.hotspots, n);
  return snap;
}

DemandTable compute_demand(const Scenario& s, const DelayAssignment& d, CountingRule rule) {
  return TrafficModel(s, rule).demand(d);
}

std::vector<Hotspot> detect_hotspots(const Scenario& s, const DelayAssignment& d) {
  return TrafficModel(s).hotspots(d);
}

Minutes congested_duration(std::string_view flight_id, const Scenario& s, const DelayAssignment& d) {
  const auto idx = s.flight_index(flight_id);
  if (!idx) throw Error(ErrorKind::Precondition, "unknown flight " + std::string(flight_id));
  TrafficModel model(s);
  const auto hs = model.hotspots(d);
  return model.congested_duration(*idx, d, hs);
}

CoordinationGraph build_graph(std::span<const Hotspot> hotspots, std::size_t flights) {
  return CoordinationGraph::from_hotspots(hotspots, flights);
}

void write_demand_csv(std::ostream& os, const TrafficModel& model, const DemandTable& table) {
  const auto& s = model.scenario();
  os << "sector,period_start,period_end,demand,capacity,excess\n";
  for (std::size_t r = 0; r < table.sector_count(); ++r) {
    for (std::size_t p = 0; p < table.period_count(); ++p) {
      const auto& per = model.periods()[p];
      const int dem = table.at(r, p);
      const int cap = s.sectors[r].capacity;
      os << s.sectors[r].id << ',' << per.start << ',' << per.end << ',' << dem << ',' << cap << ','
         << std::max(0, dem - cap) << '\n';
    }
  }
}

void write_hotspots_csv(std::ostream& os, const TrafficModel& model,
                        std::span<const Hotspot> hotspots) {
  const auto& s = model.scenario();
  os << "sector,period_start,period_end,demand,capacity,excess,participants\n";
  for (const auto& h : hotspots) {
    os << s.sectors[static_cast<std::size_t>(h.sector)].id << ',' << h.period.start << ','
       << h.period.end << ',' << h.demand << ',' << h.capacity << ',' << h.excess() << ',';
    for (std::size_t k = 0; k < h.participants.size(); ++k)
      os << (k ? ";" : "") << s.flights[static_cast<std::size_t>(h.participants[k])].id;
    os << '\n';
  }
}

}  // namespace dcb
