#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dcb/scenario.hpp"
#include "dcb/traffic.hpp"

namespace dcb {

struct RewardParams {
  double lambda = 20.0;           // weight of the strategic delay cost
  double positive_reward = 60.0;  // paid when the agent is in no hotspot
  double hotspot_rate = 81.0;     // cost per congested minute

  void validate() const;
};

/// One piece of a piecewise-linear cost curve: `rate_per_min` applies up to
/// `up_to_min` (exclusive upper delay bound), or forever when unset.
struct CostSegment {
  std::optional<Minutes> up_to_min;
  double rate_per_min = 0.0;
};

class StrategicCostTable {
 public:
  StrategicCostTable() = default;
  explicit StrategicCostTable(std::map<std::string, std::vector<CostSegment>> curves);

  /// light/medium/heavy with flat rates 0.5, 1.0 and 2.0 per minute.
  static StrategicCostTable linear_default();

  double cost(Minutes delay, const std::string& aircraft_class) const;
  bool contains(const std::string& aircraft_class) const { return curves_.count(aircraft_class) > 0; }
  const std::map<std::string, std::vector<CostSegment>>& curves() const noexcept { return curves_; }

 private:
  std::map<std::string, std::vector<CostSegment>> curves_;
};

// Cost table file: {"medium": [{"up_to_min": 5, "rate_per_min": 1.0}, {"rate_per_min": 3.0}], ...}
StrategicCostTable cost_table_from_json(const nlohmann::json& j);
nlohmann::json cost_table_to_json(const StrategicCostTable& t);
StrategicCostTable load_cost_table(const std::filesystem::path& path);

double hotspot_cost(Minutes tdc, const RewardParams& params);
double delay_cost(Minutes delay, const std::string& aircraft_class, const StrategicCostTable& table);
double local_reward(Minutes delay, Minutes tdc, const std::string& aircraft_class,
                    const RewardParams& params, const StrategicCostTable& table);

/// Reward parameters and cost table bound to one scenario, with the delay
/// penalty λ·DC(d) tabulated per flight and admissible delay.
class RewardModel {
 public:
  RewardModel(const Scenario& s, RewardParams params = {},
              StrategicCostTable table = StrategicCostTable::linear_default());

  const RewardParams& params() const noexcept { return params_; }
  const StrategicCostTable& table() const noexcept { return table_; }

  double local(std::size_t flight, Minutes delay, Minutes tdc) const;
  double delay_penalty(std::size_t flight, Minutes delay) const;

  std::vector<double> local_rewards(const DelayAssignment& d, const TrafficSnapshot& snap) const;
  std::vector<double> local_rewards(const TrafficModel& model, const DelayAssignment& d) const;

 private:
  RewardParams params_;
  StrategicCostTable table_;
  std::vector<std::vector<double>> penalty_;  // [flight][delay]
};

double global_reward(std::span<const double> local_rewards);
double global_reward(const TrafficModel& model, const RewardModel& rewards, const DelayAssignment& d);

/// Two joint assignments; for factoredness they differ only in one agent's delay.
using AssignmentPair = std::pair<DelayAssignment, DelayAssignment>;
/// Produces the k-th sample.
using PairSampler = std::function<AssignmentPair(std::size_t k)>;
using StateSampler = std::function<DelayAssignment(std::size_t k)>;

/// Fraction of pairs where the agent's reward change and the global reward
/// change have the same strict sign (u[x] is 1 only for x > 0).
double estimate_factoredness(const TrafficModel& model, const RewardModel& rewards,
                             std::size_t agent, std::span<const AssignmentPair> pairs);
double estimate_factoredness(const TrafficModel& model, const RewardModel& rewards,
                             std::size_t agent, const PairSampler& sampler, std::size_t n_samples);

struct LearnabilityEstimate {
  double value = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;  // samples with a zero denominator
};

/// Mean point learnability of the agent's reward at `state` over alternative
/// states: own-component change over others-component change.
LearnabilityEstimate estimate_learnability(const TrafficModel& model, const RewardModel& rewards,
                                           std::size_t agent, const DelayAssignment& state,
                                           std::span<const DelayAssignment> alternatives);
LearnabilityEstimate estimate_learnability(const TrafficModel& model, const RewardModel& rewards,
                                           std::size_t agent, const DelayAssignment& state,
                                           const StateSampler& sampler, std::size_t n_samples);

/// All (s, s') pairs obtained by setting the agent's delay to every pair of admissible values.
std::vector<AssignmentPair> agent_delay_pairs(const TrafficModel& model, std::size_t agent,
                                              const DelayAssignment& base);
/// Uniformly random feasible pairs differing only in the agent's delay.
PairSampler random_pair_sampler(const TrafficModel& model, std::size_t agent, std::uint64_t seed);
/// Uniformly random feasible joint assignments.
StateSampler random_state_sampler(const TrafficModel& model, std::uint64_t seed);

}  // namespace dcb
