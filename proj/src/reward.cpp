#include "dcb/reward.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "dcb/error.hpp"
#include "dcb/random.hpp"

namespace dcb {

using nlohmann::json;

void RewardParams::validate() const {
  if (!(lambda >= 0.0)) throw Error(ErrorKind::Config, "lambda must be non-negative");
  if (!(positive_reward > 0.0)) throw Error(ErrorKind::Config, "positive reward must be positive");
  if (!(hotspot_rate > 0.0)) throw Error(ErrorKind::Config, "hotspot rate must be positive");
}

StrategicCostTable::StrategicCostTable(std::map<std::string, std::vector<CostSegment>> curves)
    : curves_(std::move(curves)) {
  for (const auto& [cls, segs] : curves_) {
    if (segs.empty()) throw Error(ErrorKind::Config, "cost curve for " + cls + " is empty");
    Minutes prev = 0;
    for (std::size_t k = 0; k < segs.size(); ++k) {
      if (!(segs[k].rate_per_min >= 0.0))
        throw Error(ErrorKind::Config, "cost curve for " + cls + " has a negative rate");
      if (segs[k].up_to_min) {
        if (*segs[k].up_to_min <= prev)
          throw Error(ErrorKind::Config, "cost curve for " + cls + " has non-increasing bounds");
        prev = *segs[k].up_to_min;
      } else if (k + 1 != segs.size()) {
        throw Error(ErrorKind::Config, "only the last segment of " + cls + " may be unbounded");
      }
    }
  }
}

StrategicCostTable StrategicCostTable::linear_default() {
  return StrategicCostTable({{"light", {{std::nullopt, 0.5}}},
                             {"medium", {{std::nullopt, 1.0}}},
                             {"heavy", {{std::nullopt, 2.0}}}});
}

double StrategicCostTable::cost(Minutes delay, const std::string& aircraft_class) const {
  auto it = curves_.find(aircraft_class);
  if (it == curves_.end())
    throw Error(ErrorKind::Config, "aircraft class " + aircraft_class + " missing from cost table");
  if (delay < 0) throw Error(ErrorKind::Precondition, "negative delay");
  double total = 0.0;
  Minutes done = 0;
  for (const auto& seg : it->second) {
    const Minutes upto = seg.up_to_min ? std::min(*seg.up_to_min, delay) : delay;
    if (upto > done) {
      total += (upto - done) * seg.rate_per_min;
      done = upto;
    }
    if (done >= delay) return total;
  }
  // Past the last bounded segment the final rate keeps applying.
  return total + (delay - done) * it->second.back().rate_per_min;
}

StrategicCostTable cost_table_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Config, "cost table must be a JSON object");
  std::map<std::string, std::vector<CostSegment>> curves;
  try {
    for (const auto& [cls, segs] : j.items()) {
      auto& out = curves[cls];
      for (const auto& js : segs) {
        CostSegment seg;
        if (js.contains("up_to_min") && !js.at("up_to_min").is_null())
          seg.up_to_min = js.at("up_to_min").get<Minutes>();
        seg.rate_per_min = js.at("rate_per_min").get<double>();
        out.push_back(seg);
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("malformed cost table: ") + e.what());
  }
  return StrategicCostTable(std::move(curves));
}

json cost_table_to_json(const StrategicCostTable& t) {
  json j = json::object();
  for (const auto& [cls, segs] : t.curves()) {
    json arr = json::array();
    for (const auto& seg : segs) {
      json js{{"rate_per_min", seg.rate_per_min}};
      if (seg.up_to_min) js["up_to_min"] = *seg.up_to_min;
      arr.push_back(js);
    }
    j[cls] = arr;
  }
  return j;
}

StrategicCostTable load_cost_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open cost table " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, path.string() + ": malformed JSON: " + e.what());
  }
  return cost_table_from_json(j);
}

double hotspot_cost(Minutes tdc, const RewardParams& params) {
  if (tdc < 0) throw Error(ErrorKind::Precondition, "negative congested duration");
  return tdc > 0 ? -static_cast<double>(tdc) * params.hotspot_rate : params.positive_reward;
}

double delay_cost(Minutes delay, const std::string& aircraft_class, const StrategicCostTable& table) {
  return table.cost(delay, aircraft_class);
}

double local_reward(Minutes delay, Minutes tdc, const std::string& aircraft_class,
                    const RewardParams& params, const StrategicCostTable& table) {
  return hotspot_cost(tdc, params) - params.lambda * delay_cost(delay, aircraft_class, table);
}

RewardModel::RewardModel(const Scenario& s, RewardParams params, StrategicCostTable table)
    : params_(params), table_(std::move(table)) {
  params_.validate();
  penalty_.reserve(s.flights.size());
  for (const auto& f : s.flights) {
    std::vector<double> row(static_cast<std::size_t>(f.delay_limit()) + 1);
    for (Minutes d = 0; d <= f.delay_limit(); ++d)
      row[static_cast<std::size_t>(d)] = params_.lambda * table_.cost(d, f.aircraft_class);
    penalty_.push_back(std::move(row));
  }
}

double RewardModel::delay_penalty(std::size_t flight, Minutes delay) const {
  return penalty_.at(flight).at(static_cast<std::size_t>(delay));
}

double RewardModel::local(std::size_t flight, Minutes delay, Minutes tdc) const {
  return hotspot_cost(tdc, params_) - delay_penalty(flight, delay);
}

std::vector<double> RewardModel::local_rewards(const DelayAssignment& d,
                                               const TrafficSnapshot& snap) const {
  std::vector<double> out(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = local(i, d[i], snap.congested[i]);
  return out;
}

std::vector<double> RewardModel::local_rewards(const TrafficModel& model,
                                               const DelayAssignment& d) const {
  return local_rewards(d, model.snapshot(d));
}

double global_reward(std::span<const double> local_rewards) {
  return std::accumulate(local_rewards.begin(), local_rewards.end(), 0.0);
}

double global_reward(const TrafficModel& model, const RewardModel& rewards, const DelayAssignment& d) {
  return global_reward(rewards.local_rewards(model, d));
}

namespace {

void require_only_agent_differs(const AssignmentPair& pair, std::size_t agent) {
  const auto& [a, b] = pair;
  if (a.size() != b.size())
    throw Error(ErrorKind::Precondition, "sample pair has mismatched assignment sizes");
  for (std::size_t k = 0; k < a.size(); ++k)
    if (k != agent && a[k] != b[k])
      throw Error(ErrorKind::Precondition,
                  "sample pair differs in the delay of agent " + std::to_string(k));
}

}  // namespace

double estimate_factoredness(const TrafficModel& model, const RewardModel& rewards,
                             std::size_t agent, std::span<const AssignmentPair> pairs) {
  if (pairs.empty()) throw Error(ErrorKind::UndefinedRatio, "factoredness needs at least one sample");
  std::size_t aligned = 0;
  for (const auto& pair : pairs) {
    require_only_agent_differs(pair, agent);
    const auto r = rewards.local_rewards(model, pair.first);
    const auto r2 = rewards.local_rewards(model, pair.second);
    const double local_change = r[agent] - r2[agent];
    const double global_change = global_reward(r) - global_reward(r2);
    if (local_change * global_change > 0.0) ++aligned;
  }
  return static_cast<double>(aligned) / static_cast<double>(pairs.size());
}

double estimate_factoredness(const TrafficModel& model, const RewardModel& rewards,
                             std::size_t agent, const PairSampler& sampler, std::size_t n_samples) {
  std::vector<AssignmentPair> pairs;
  pairs.reserve(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) pairs.push_back(sampler(k));
  return estimate_factoredness(model, rewards, agent, pairs);
}

LearnabilityEstimate estimate_learnability(const TrafficModel& model, const RewardModel& rewards,
                                           std::size_t agent, const DelayAssignment& state,
                                           std::span<const DelayAssignment> alternatives) {
  auto reward_of = [&](const DelayAssignment& d) { return rewards.local_rewards(model, d)[agent]; };
  const double base = reward_of(state);
  LearnabilityEstimate est;
  double sum = 0.0;
  for (const auto& alt : alternatives) {
    DelayAssignment own_changed = state;  // s - s_i + s'_i
    own_changed[agent] = alt[agent];
    DelayAssignment others_changed = alt;  // s' - s'_i + s_i
    others_changed[agent] = state[agent];
    const double denom = std::abs(base - reward_of(others_changed));
    if (denom == 0.0) {
      ++est.excluded;
      continue;
    }
    sum += std::abs(base - reward_of(own_changed)) / denom;
    ++est.used;
  }
  if (est.used == 0)
    throw Error(ErrorKind::UndefinedRatio,
                "learnability undefined: every sample left the agent's reward unchanged by others");
  est.value = sum / static_cast<double>(est.used);
  return est;
}

LearnabilityEstimate estimate_learnability(const TrafficModel& model, const RewardModel& rewards,
                                           std::size_t agent, const DelayAssignment& state,
                                           const StateSampler& sampler, std::size_t n_samples) {
  std::vector<DelayAssignment> alts;
  alts.reserve(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) alts.push_back(sampler(k));
  return estimate_learnability(model, rewards, agent, state, alts);
}

std::vector<AssignmentPair> agent_delay_pairs(const TrafficModel& model, std::size_t agent,
                                              const DelayAssignment& base) {
  std::vector<AssignmentPair> out;
  const Minutes lim = model.delay_limit(agent);
  for (Minutes a = 0; a <= lim; ++a) {
    for (Minutes b = 0; b <= lim; ++b) {
      AssignmentPair p{base, base};
      p.first[agent] = a;
      p.second[agent] = b;
      out.push_back(std::move(p));
    }
  }
  return out;
}

namespace {

DelayAssignment random_assignment(const TrafficModel& model, Rng& rng) {
  DelayAssignment d(model.flight_count());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = static_cast<Minutes>(rng.uniform_int(0, model.delay_limit(i)));
  return d;
}

}  // namespace

PairSampler random_pair_sampler(const TrafficModel& model, std::size_t agent, std::uint64_t seed) {
  return [&model, agent, seed](std::size_t k) {
    Rng rng({seed, static_cast<std::uint64_t>(k)});
    AssignmentPair p;
    p.first = random_assignment(model, rng);
    p.second = p.first;
    p.second[agent] = static_cast<Minutes>(rng.uniform_int(0, model.delay_limit(agent)));
    return p;
  };
}

StateSampler random_state_sampler(const TrafficModel& model, std::uint64_t seed) {
  return [&model, seed](std::size_t k) {
    Rng rng({seed, static_cast<std::uint64_t>(k)});
    return random_assignment(model, rng);
  };
}

}  // namespace dcb
