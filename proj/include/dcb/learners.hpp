#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <absl/container/flat_hash_map.h>

#include "dcb/random.hpp"
#include "dcb/reward.hpp"
#include "dcb/scenario.hpp"
#include "dcb/traffic.hpp"

namespace dcb {

enum class Action : std::uint8_t { Hold = 0, Increment = 1 };
inline constexpr std::array<Action, 2> kActions{Action::Hold, Action::Increment};

enum class Method { IRL, EdMARL };
const char* to_string(Method m) noexcept;
Method method_from_string(const std::string& name);

struct LocalState {
  Minutes delay = 0;
  int hotspot_count = 0;

  friend bool operator==(const LocalState&, const LocalState&) = default;
};

struct EpsilonSchedule {
  double start = 0.9;
  double decrement = 0.01;
  int interval = 120;         // episodes between decrements
  int floor_episode = 10800;  // pure exploitation from here on
};

struct LearnerConfig {
  double alpha = 0.01;
  double gamma = 0.99;
  int episodes = 15000;
  EpsilonSchedule epsilon;
  int hotspot_cap = 10;
  std::uint64_t seed = 1;

  void validate() const;
};

double epsilon_at(int episode, const LearnerConfig& cfg);

/// Independent learner table over (delay, clamped hotspot count, action); unseen entries are 0.
class AgentQTable {
 public:
  AgentQTable() = default;
  AgentQTable(Minutes max_delay, int hotspot_cap);

  Minutes max_delay() const noexcept { return max_delay_; }
  int hotspot_cap() const noexcept { return cap_; }

  double value(LocalState s, Action a) const { return q_[index(s, a)]; }
  double& at(LocalState s, Action a) { return q_[index(s, a)]; }
  /// max over actions legal at s (Increment is illegal at max delay).
  double best_value(LocalState s) const;
  const std::vector<double>& raw() const noexcept { return q_; }

 private:
  std::size_t index(LocalState s, Action a) const;

  Minutes max_delay_ = 0;
  int cap_ = 0;
  std::vector<double> q_;
};

/// Per-edge tables Q_ij over joint local states and joint actions. Edges are
/// keyed with the lower flight index first.
class EdgeQTable {
 public:
  using Values = std::array<double, 4>;  // [a_low * 2 + a_high]

  EdgeQTable() = default;
  EdgeQTable(std::vector<Minutes> max_delays, int hotspot_cap);

  double value(int i, int j, LocalState si, LocalState sj, Action ai, Action aj) const;
  void set(int i, int j, LocalState si, LocalState sj, Action ai, Action aj, double v);
  /// max over legal joint actions at (si, sj).
  double best_value(int i, int j, LocalState si, LocalState sj) const;
  /// For each action of agent i, the best value over j's legal actions.
  std::array<double, 2> best_replies(int i, int j, LocalState si, LocalState sj) const;
  /// Mutable entry for edge (i, j) with i < j, created as zeros when missing.
  Values& slot(int i, int j, LocalState si, LocalState sj);

  Minutes max_delay(int agent) const { return max_delays_[static_cast<std::size_t>(agent)]; }
  int hotspot_cap() const noexcept { return cap_; }
  /// Edges with at least one stored entry.
  std::size_t edge_count() const;
  std::size_t entry_count() const noexcept { return table_.size(); }

  /// Every stored entry, sorted by (i, j, joint state), for serialization.
  struct Entry {
    int i, j;
    LocalState si, sj;
    Values values;
  };
  std::vector<Entry> entries() const;

  static constexpr std::size_t kMaxAgents = 1 << 16;
  static constexpr Minutes kMaxDelay = (1 << 10) - 1;
  static constexpr int kMaxCount = (1 << 6) - 1;

 private:
  static std::uint64_t key(int lo, int hi, LocalState slo, LocalState shi);
  const Values* find(int i, int j, LocalState si, LocalState sj) const;

  std::vector<Minutes> max_delays_;
  int cap_ = 0;
  absl::flat_hash_map<std::uint64_t, Values> table_;
};

struct QStore {
  Method method = Method::IRL;
  std::vector<AgentQTable> agents;  // IRL
  EdgeQTable edges;                 // Ed-MARL

  static QStore empty_for(Method m, const Scenario& s, int hotspot_cap);
};

// ---------------------------------------------------------------------------
// Environment

struct EnvState {
  DelayAssignment delays;
  std::vector<LocalState> states;
  TrafficSnapshot traffic;
  std::vector<double> rewards;  // local reward of each agent under `delays`
};

/// One transition: apply the joint action, recompute demand, hotspots, graph,
/// local states and rewards. Throws ContractViolation on an illegal Increment.
EnvState env_step(const TrafficModel& model, const RewardModel& rewards, int hotspot_cap,
                  const DelayAssignment& current, std::span<const Action> actions);
EnvState env_observe(const TrafficModel& model, const RewardModel& rewards, int hotspot_cap,
                     DelayAssignment delays);

/// Whether the agent must HOLD regardless of its policy: not regulatable,
/// at its max delay, or without neighbours in the coordination graph.
bool forced_hold(const TrafficModel& model, const EnvState& st, std::size_t agent);
bool has_neighbours(const EnvState& st, std::size_t agent);

// ---------------------------------------------------------------------------
// Action selection and updates

/// ε-greedy over legal actions; greedy ties go to Hold.
Action irl_select(const AgentQTable& q, LocalState s, double epsilon, Rng& rng);

void irl_update(AgentQTable& q, LocalState s, Action a, double reward, LocalState next,
                const LearnerConfig& cfg, bool terminal);

/// Value of each own action: sum over neighbours of the best legal neighbour reply.
std::array<double, 2> edmarl_agent_value(int agent, std::span<const LocalState> states,
                                         std::span<const int> neighbours, const EdgeQTable& q);

Action edmarl_select(int agent, std::span<const LocalState> states, std::span<const int> neighbours,
                     const EdgeQTable& q, double epsilon, Rng& rng);

/// Reward-shared edge update; neighbourhood sizes include the agent itself.
void edmarl_update(EdgeQTable& q, int i, int j, LocalState si, LocalState sj, Action ai, Action aj,
                   double ri, double rj, std::size_t ni, std::size_t nj, LocalState next_i,
                   LocalState next_j, const LearnerConfig& cfg, bool terminal);

/// ½·Σ_i Σ_{j∈N(i)} Q_ij, i.e. every edge counted once.
double edmarl_global_value(const EdgeQTable& q, const CoordinationGraph& g,
                           std::span<const LocalState> states, std::span<const Action> actions);

// ---------------------------------------------------------------------------
// Episodes and training

/// Policy plus learning rule over a shared QStore.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual Method method() const noexcept = 0;
  /// Actions for every agent; forced holds are applied by the caller.
  virtual void choose(const TrafficModel& model, const EnvState& st, double epsilon, Rng& rng,
                      std::vector<Action>& out) = 0;
  virtual void update(const TrafficModel& model, const EnvState& before,
                      std::span<const Action> actions, const EnvState& after,
                      const LearnerConfig& cfg, bool terminal) = 0;
  virtual QStore& store() noexcept = 0;
  virtual const QStore& store() const noexcept = 0;
};

std::unique_ptr<Learner> make_learner(QStore store);
std::unique_ptr<Learner> make_learner(Method m, const Scenario& s, int hotspot_cap);

struct EpisodeResult {
  DelayAssignment delays;
  int hotspots = 0;
  std::vector<double> returns;  // undiscounted per-agent sum of rewards
  int steps = 0;
  double global_reward = 0.0;   // of the final assignment
};

EpisodeResult run_episode(const TrafficModel& model, const RewardModel& rewards, Learner& learner,
                          const LearnerConfig& cfg, int episode);

struct CurvePoint {
  int episode = 0;
  double epsilon = 0.0;
  int hotspots = 0;
  double avg_delay = 0.0;  // minutes per flight, delays of 4 minutes or less ignored
  double global_reward = 0.0;
};

struct TrainResult {
  DelayAssignment solution;  // assignment of the final (greedy) episode
  std::vector<CurvePoint> curve;
  QStore store;
  bool solved = false;  // solution has zero hotspots
  int remaining_hotspots = 0;
};

TrainResult train(const TrafficModel& model, const RewardModel& rewards, Method method,
                  const LearnerConfig& cfg, std::optional<QStore> initial = std::nullopt);

// ---------------------------------------------------------------------------
// Exhaustive oracle

enum class OracleObjective {
  TotalDelay,  // Σ delay
  RewardCost,  // Σ λ·DC(delay) − Σ PositiveReward (negated global reward at zero hotspots)
};

struct OracleResult {
  bool feasible = false;
  DelayAssignment best;
  double objective = 0.0;
  std::uint64_t evaluated = 0;
};

/// Enumerates every joint assignment of regulatable flights and returns the
/// lexicographically first optimum among hotspot-free ones. Throws
/// OracleTooLarge when the joint space exceeds `budget`.
OracleResult brute_force_oracle(const TrafficModel& model, OracleObjective objective = OracleObjective::TotalDelay,
                                std::uint64_t budget = 10'000'000,
                                const RewardModel* rewards = nullptr);

}  // namespace dcb
