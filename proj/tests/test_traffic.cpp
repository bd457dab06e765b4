#include <doctest.h>

#include <sstream>

#include "dcb/error.hpp"
#include "dcb/traffic.hpp"
#include "fixtures.hpp"

using namespace dcb;

namespace {

std::vector<std::pair<Minutes, Minutes>> bounds(const std::vector<CountingPeriod>& ps) {
  std::vector<std::pair<Minutes, Minutes>> out;
  for (const auto& p : ps) out.emplace_back(p.start, p.end);
  return out;
}

using Bounds = std::vector<std::pair<Minutes, Minutes>>;

}  // namespace

TEST_SUITE("traffic") {

TEST_CASE("counting periods") {
  CHECK(bounds(counting_periods(120, 60, 60)) == Bounds{{0, 60}, {60, 120}});
  CHECK(bounds(counting_periods(120, 60, 30)) == Bounds{{0, 60}, {30, 90}, {60, 120}, {90, 150}});
  CHECK(bounds(counting_periods(60, 60, 60)) == Bounds{{0, 60}});
  const auto ps = counting_periods(120, 60, 30);
  for (std::size_t k = 0; k < ps.size(); ++k) CHECK(ps[k].index == static_cast<int>(k));
  CHECK_THROWS_AS(counting_periods(120, 30, 60), Error);
  CHECK_THROWS_AS(counting_periods(120, 0, 0), Error);
}

TEST_CASE("tiny3 demand") {
  const auto s = fx::tiny3();
  auto d0 = compute_demand(s, fx::delays({0, 0, 0}));
  CHECK(d0.at(0, 0) == 3);
  CHECK(d0.at(0, 1) == 0);
  auto d10 = compute_demand(s, fx::delays({0, 0, 10}));
  CHECK(d10.at(0, 0) == 2);
  CHECK(d10.at(0, 1) == 1);
}

TEST_CASE("demand without flights is zero") {
  auto s = fx::tiny3();
  s.flights.clear();
  const auto d = compute_demand(s, DelayAssignment{});
  for (std::size_t p = 0; p < d.period_count(); ++p) CHECK(d.at(0, p) == 0);
}

TEST_CASE("entry counting rule counts entries only") {
  auto s = fx::tiny3();
  s.flights[2].crossings[0] = {"S1", 50, 70};
  const auto overlap = compute_demand(s, fx::delays({0, 0, 0}), CountingRule::Overlap);
  const auto entry = compute_demand(s, fx::delays({0, 0, 0}), CountingRule::Entry);
  CHECK(overlap.at(0, 1) == 1);
  CHECK(entry.at(0, 1) == 0);
  CHECK(entry.at(0, 0) == 3);
}

TEST_CASE("tiny3 hotspots") {
  const auto s = fx::tiny3();
  const auto h = detect_hotspots(s, fx::delays({0, 0, 0}));
  REQUIRE(h.size() == 1);
  CHECK(h[0].sector == 0);
  CHECK(h[0].period.start == 0);
  CHECK(h[0].period.end == 60);
  CHECK(h[0].demand == 3);
  CHECK(h[0].capacity == 2);
  CHECK(h[0].excess() == 1);
  CHECK(h[0].participants == std::vector<int>{0, 1, 2});
  CHECK(detect_hotspots(s, fx::delays({0, 0, 10})).empty());
}

TEST_CASE("zero capacity makes every demanded cell a hotspot") {
  auto s = fx::tiny3();
  s.sectors[0].capacity = 0;
  const auto h = detect_hotspots(s, fx::delays({0, 0, 10}));
  REQUIRE(h.size() == 2);
  CHECK(h[0].period.start == 0);
  CHECK(h[1].period.start == 60);
  CHECK(h[1].participants == std::vector<int>{2});
}

TEST_CASE("hotspots are ordered by sector id then period") {
  Scenario s;
  s.sectors = {{"Z", 0}, {"A", 0}};
  s.horizon = 120;
  s.period_step = 60;
  s.timeline = {identity_interval(s.sectors, s.horizon)};
  s.flights = {{"a", {{"Z", 10, 20}, {"A", 70, 80}}, 0}, {"b", {{"A", 5, 9}}, 0}};
  const auto h = detect_hotspots(s, fx::delays({0, 0}));
  REQUIRE(h.size() == 3);
  CHECK(s.sectors[static_cast<std::size_t>(h[0].sector)].id == "A");
  CHECK(h[0].period.start == 0);
  CHECK(s.sectors[static_cast<std::size_t>(h[1].sector)].id == "A");
  CHECK(h[1].period.start == 60);
  CHECK(s.sectors[static_cast<std::size_t>(h[2].sector)].id == "Z");
}

TEST_CASE("congested duration") {
  const auto s = fx::tiny3();
  CHECK(congested_duration("f3", s, fx::delays({0, 0, 0})) == 9);
  CHECK(congested_duration("f1", s, fx::delays({0, 0, 0})) == 10);
  for (const char* f : {"f1", "f2", "f3"}) CHECK(congested_duration(f, s, fx::delays({0, 0, 10})) == 0);
}

TEST_CASE("congested duration takes the union of overlapping hot periods") {
  Scenario s;
  s.sectors = {{"S1", 1}};
  s.horizon = 120;
  s.period_duration = 60;
  s.period_step = 30;
  s.timeline = {identity_interval(s.sectors, s.horizon)};
  s.flights = {{"g", {{"S1", 55, 65}}, 0}, {"h", {{"S1", 40, 50}}, 0}};
  const auto h = detect_hotspots(s, fx::delays({0, 0}));
  // [0,60) and [30,90) are congested, [60,120) is not.
  REQUIRE(h.size() == 2);
  CHECK(h[0].period.start == 0);
  CHECK(h[1].period.start == 30);
  CHECK(congested_duration("g", s, fx::delays({0, 0})) == 10);
}

TEST_CASE("coordination graph") {
  const auto s = fx::tiny3();
  const auto h = detect_hotspots(s, fx::delays({0, 0, 0}));
  const auto g = build_graph(h, 3);
  CHECK(g.edges() == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});
  CHECK(g.neighbourhood_size(0) == 3);
  CHECK(g.edge_count() == 3);
  const auto st = degree_stats(g);
  CHECK(st.min == 2);
  CHECK(st.max == 2);
  CHECK(st.mean == doctest::Approx(2.0));
  CHECK(st.non_isolated == 3);

  CHECK(build_graph({}, 3).edge_count() == 0);
  CHECK(build_graph({}, 3).neighbourhood_size(1) == 1);
}

TEST_CASE("disjoint hotspots give disjoint cliques") {
  std::vector<Hotspot> hs(2);
  hs[0].participants = {0, 1};
  hs[1].participants = {2, 3};
  const auto g = build_graph(hs, 5);
  CHECK(g.edges() == std::vector<std::pair<int, int>>{{0, 1}, {2, 3}});
  CHECK_FALSE(g.has_edge(0, 2));
  CHECK(g.degree(4) == 0);
  CHECK(degree_stats(g).non_isolated == 4);
}

TEST_CASE("snapshot agrees with the free functions") {
  const auto s = fx::tiny3();
  const TrafficModel model(s);
  const auto d = fx::delays({3, 0, 0});
  const auto snap = model.snapshot(d);
  CHECK(snap.demand == compute_demand(s, d));
  CHECK(snap.hotspots.size() == detect_hotspots(s, d).size());
  CHECK(snap.hotspot_count == std::vector<int>{1, 1, 1});
  CHECK(snap.congested == std::vector<Minutes>{10, 10, 9});
  CHECK(snap.graph.edge_count() == 3);
}

TEST_CASE("demand and hotspot csv") {
  const auto s = fx::tiny3();
  const TrafficModel model(s);
  const auto d = fx::delays({0, 0, 0});
  std::ostringstream demand, hot;
  write_demand_csv(demand, model, model.demand(d));
  write_hotspots_csv(hot, model, model.hotspots(d));
  CHECK(demand.str().find("S1,0,60,3,2,1") != std::string::npos);
  CHECK(hot.str().find("S1,0,60,3,2,1") != std::string::npos);
}

}  // TEST_SUITE
