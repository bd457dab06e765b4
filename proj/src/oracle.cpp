#include <limits>

#include "dcb/error.hpp"
#include "dcb/learners.hpp"

namespace dcb {

namespace {

bool hotspot_free(const TrafficModel& model, const DelayAssignment& d) {
  const auto table = model.demand(d);
  const auto& sectors = model.scenario().sectors;
  for (std::size_t r = 0; r < table.sector_count(); ++r)
    for (std::size_t p = 0; p < table.period_count(); ++p)
      if (table.at(r, p) > sectors[r].capacity) return false;
  return true;
}

}  // namespace

OracleResult brute_force_oracle(const TrafficModel& model, OracleObjective objective,
                                std::uint64_t budget, const RewardModel* rewards) {
  const std::size_t n = model.flight_count();
  std::vector<std::size_t> free_flights;
  std::uint64_t space = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const auto lim = static_cast<std::uint64_t>(model.delay_limit(i));
    if (lim == 0) continue;
    free_flights.push_back(i);
    const auto next = static_cast<unsigned __int128>(space) * (lim + 1);
    space = next > budget ? budget + 1 : static_cast<std::uint64_t>(next);
    if (space > budget) break;
  }
  if (space > budget)
    throw Error(ErrorKind::OracleTooLarge, "joint delay space exceeds the oracle budget of " +
                                               std::to_string(budget) + " assignments");

  std::optional<RewardModel> fallback;
  if (objective == OracleObjective::RewardCost && rewards == nullptr) {
    fallback.emplace(model.scenario());
    rewards = &*fallback;
  }
  auto score = [&](const DelayAssignment& d) {
    if (objective == OracleObjective::TotalDelay) return static_cast<double>(d.total());
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      cost += rewards->delay_penalty(i, d[i]) - rewards->params().positive_reward;
    return cost;
  };

  OracleResult res;
  res.objective = std::numeric_limits<double>::infinity();
  DelayAssignment d(n);
  // Odometer with the first free flight most significant: lexicographic order,
  // so the first optimum found is the lexicographically smallest.
  while (true) {
    ++res.evaluated;
    if (hotspot_free(model, d)) {
      const double v = score(d);
      if (v < res.objective) {
        res.objective = v;
        res.best = d;
        res.feasible = true;
      }
    }
    std::size_t k = free_flights.size();
    while (k > 0) {
      const auto f = free_flights[k - 1];
      if (d[f] < model.delay_limit(f)) {
        ++d[f];
        break;
      }
      d[f] = 0;
      --k;
    }
    if (k == 0) break;
  }
  if (!res.feasible) {
    res.best = DelayAssignment(n);
    res.objective = 0.0;
  }
  return res;
}

}  // namespace dcb
