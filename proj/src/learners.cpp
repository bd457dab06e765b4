#include "dcb/learners.hpp"

#include <algorithm>
#include <cmath>

#include "dcb/error.hpp"

namespace dcb {

const char* to_string(Method m) noexcept { return m == Method::IRL ? "irl" : "edmarl"; }

Method method_from_string(const std::string& name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "irl") return Method::IRL;
  if (lower == "edmarl" || lower == "ed-marl") return Method::EdMARL;
  throw Error(ErrorKind::Config, "unknown method " + name + " (expected irl or edmarl)");
}

void LearnerConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorKind::Config, "alpha must lie in (0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error(ErrorKind::Config, "gamma must lie in [0, 1]");
  if (episodes < 0) throw Error(ErrorKind::Config, "episodes must be non-negative");
  if (hotspot_cap < 0) throw Error(ErrorKind::Config, "hotspot cap must be non-negative");
  if (epsilon.interval <= 0) throw Error(ErrorKind::Config, "epsilon interval must be positive");
}

double epsilon_at(int episode, const LearnerConfig& cfg) {
  const auto& e = cfg.epsilon;
  if (episode >= e.floor_episode) return 0.0;
  return std::max(e.start - e.decrement * static_cast<double>(episode / e.interval), 0.0);
}

// ---------------------------------------------------------------------------

AgentQTable::AgentQTable(Minutes max_delay, int hotspot_cap)
    : max_delay_(max_delay),
      cap_(hotspot_cap),
      q_(static_cast<std::size_t>(max_delay + 1) * static_cast<std::size_t>(hotspot_cap + 1) * 2, 0.0) {}

std::size_t AgentQTable::index(LocalState s, Action a) const {
  if (s.delay < 0 || s.delay > max_delay_ || s.hotspot_count < 0 || s.hotspot_count > cap_)
    throw Error(ErrorKind::Precondition, "local state outside the Q-table range");
  return (static_cast<std::size_t>(s.delay) * static_cast<std::size_t>(cap_ + 1) +
          static_cast<std::size_t>(s.hotspot_count)) * 2 + static_cast<std::size_t>(a);
}

double AgentQTable::best_value(LocalState s) const {
  const double hold = value(s, Action::Hold);
  return s.delay < max_delay_ ? std::max(hold, value(s, Action::Increment)) : hold;
}

EdgeQTable::EdgeQTable(std::vector<Minutes> max_delays, int hotspot_cap)
    : max_delays_(std::move(max_delays)), cap_(hotspot_cap) {
  if (max_delays_.size() > kMaxAgents)
    throw Error(ErrorKind::Parameter, "too many agents for the edge Q-table key");
  for (Minutes m : max_delays_)
    if (m > kMaxDelay) throw Error(ErrorKind::Parameter, "max delay too large for the edge Q-table key");
  if (cap_ > kMaxCount) throw Error(ErrorKind::Parameter, "hotspot cap too large for the edge Q-table key");
}

// Layout, high to low bits: lo agent (16), hi agent (16), lo delay (10), lo count (6),
// hi delay (10), hi count (6). Sorting keys sorts by edge, then by joint state.
std::uint64_t EdgeQTable::key(int lo, int hi, LocalState slo, LocalState shi) {
  return (static_cast<std::uint64_t>(lo) << 48) | (static_cast<std::uint64_t>(hi) << 32) |
         (static_cast<std::uint64_t>(slo.delay) << 22) | (static_cast<std::uint64_t>(slo.hotspot_count) << 16) |
         (static_cast<std::uint64_t>(shi.delay) << 6) | static_cast<std::uint64_t>(shi.hotspot_count);
}

const EdgeQTable::Values* EdgeQTable::find(int i, int j, LocalState si, LocalState sj) const {
  auto it = table_.find(key(i, j, si, sj));
  return it == table_.end() ? nullptr : &it->second;
}

double EdgeQTable::value(int i, int j, LocalState si, LocalState sj, Action ai, Action aj) const {
  if (i > j) return value(j, i, sj, si, aj, ai);
  const auto* v = find(i, j, si, sj);
  return v ? (*v)[static_cast<std::size_t>(ai) * 2 + static_cast<std::size_t>(aj)] : 0.0;
}

void EdgeQTable::set(int i, int j, LocalState si, LocalState sj, Action ai, Action aj, double v) {
  if (i == j) throw Error(ErrorKind::Precondition, "edge tables need two distinct agents");
  if (i > j) return set(j, i, sj, si, aj, ai, v);
  slot(i, j, si, sj)[static_cast<std::size_t>(ai) * 2 + static_cast<std::size_t>(aj)] = v;
}

double EdgeQTable::best_value(int i, int j, LocalState si, LocalState sj) const {
  if (i > j) return best_value(j, i, sj, si);
  const auto* v = find(i, j, si, sj);
  if (!v) return 0.0;
  const bool inc_i = si.delay < max_delay(i);
  const bool inc_j = sj.delay < max_delay(j);
  double best = (*v)[0];
  if (inc_j) best = std::max(best, (*v)[1]);
  if (inc_i) best = std::max(best, (*v)[2]);
  if (inc_i && inc_j) best = std::max(best, (*v)[3]);
  return best;
}

std::array<double, 2> EdgeQTable::best_replies(int i, int j, LocalState si, LocalState sj) const {
  const bool j_can_increment = sj.delay < max_delay(j);
  const bool flip = i > j;
  const auto* v = flip ? find(j, i, sj, si) : find(i, j, si, sj);
  if (!v) return {0.0, 0.0};
  // Index of the joint action (own, other) in the stored orientation.
  auto at = [&](std::size_t own, std::size_t other) { return flip ? (*v)[other * 2 + own] : (*v)[own * 2 + other]; };
  std::array<double, 2> out{};
  for (std::size_t a = 0; a < 2; ++a) out[a] = j_can_increment ? std::max(at(a, 0), at(a, 1)) : at(a, 0);
  return out;
}

EdgeQTable::Values& EdgeQTable::slot(int i, int j, LocalState si, LocalState sj) {
  if (i >= j) throw Error(ErrorKind::Precondition, "edge slots are addressed with the lower index first");
  if (si.delay < 0 || si.delay > max_delay(i) || sj.delay < 0 || sj.delay > max_delay(j) ||
      si.hotspot_count < 0 || si.hotspot_count > cap_ || sj.hotspot_count < 0 || sj.hotspot_count > cap_)
    throw Error(ErrorKind::Precondition, "joint state outside the edge Q-table range");
  return table_.try_emplace(key(i, j, si, sj), Values{0, 0, 0, 0}).first->second;
}

std::size_t EdgeQTable::edge_count() const {
  std::vector<std::uint64_t> edges;
  edges.reserve(table_.size());
  for (const auto& [k, v] : table_) edges.push_back(k >> 32);
  std::sort(edges.begin(), edges.end());
  return static_cast<std::size_t>(std::unique(edges.begin(), edges.end()) - edges.begin());
}

std::vector<EdgeQTable::Entry> EdgeQTable::entries() const {
  std::vector<std::pair<std::uint64_t, const Values*>> keyed;
  keyed.reserve(table_.size());
  for (const auto& [k, v] : table_) keyed.emplace_back(k, &v);
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  auto field = [](std::uint64_t k, int shift, int bits) {
    return static_cast<int>((k >> shift) & ((std::uint64_t{1} << bits) - 1));
  };
  std::vector<Entry> out;
  out.reserve(keyed.size());
  for (const auto& [k, v] : keyed) {
    out.push_back({field(k, 48, 16), field(k, 32, 16), {field(k, 22, 10), field(k, 16, 6)},
                   {field(k, 6, 10), field(k, 0, 6)}, *v});
  }
  return out;
}

QStore QStore::empty_for(Method m, const Scenario& s, int hotspot_cap) {
  QStore q;
  q.method = m;
  std::vector<Minutes> limits;
  for (const auto& f : s.flights) limits.push_back(f.delay_limit());
  if (m == Method::IRL) {
    for (Minutes lim : limits) q.agents.emplace_back(lim, hotspot_cap);
  }
  q.edges = EdgeQTable(std::move(limits), hotspot_cap);
  return q;
}

// ---------------------------------------------------------------------------

EnvState env_observe(const TrafficModel& model, const RewardModel& rewards, int hotspot_cap,
                     DelayAssignment delays) {
  EnvState st;
  st.traffic = model.snapshot(delays);
  st.rewards = rewards.local_rewards(delays, st.traffic);
  st.states.resize(delays.size());
  for (std::size_t i = 0; i < delays.size(); ++i)
    st.states[i] = {delays[i], std::min(st.traffic.hotspot_count[i], hotspot_cap)};
  st.delays = std::move(delays);
  return st;
}

EnvState env_step(const TrafficModel& model, const RewardModel& rewards, int hotspot_cap,
                  const DelayAssignment& current, std::span<const Action> actions) {
  if (actions.size() != current.size())
    throw Error(ErrorKind::Precondition, "one action per agent required");
  DelayAssignment next = current;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] != Action::Increment) continue;
    if (current[i] >= model.delay_limit(i))
      throw Error(ErrorKind::ContractViolation,
                  "INCREMENT for flight " + model.scenario().flights[i].id + " at its max delay");
    ++next[i];
  }
  return env_observe(model, rewards, hotspot_cap, std::move(next));
}

bool has_neighbours(const EnvState& st, std::size_t agent) {
  return st.traffic.graph.degree(agent) > 0;
}

bool forced_hold(const TrafficModel& model, const EnvState& st, std::size_t agent) {
  return st.delays[agent] >= model.delay_limit(agent) || !has_neighbours(st, agent);
}

// ---------------------------------------------------------------------------

namespace {

Action explore_or(Action greedy, bool increment_legal, double epsilon, Rng& rng) {
  if (rng.uniform() < epsilon) {
    if (!increment_legal) return Action::Hold;
    return rng.coin() ? Action::Increment : Action::Hold;
  }
  return greedy;
}

}  // namespace

Action irl_select(const AgentQTable& q, LocalState s, double epsilon, Rng& rng) {
  const bool inc_legal = s.delay < q.max_delay();
  const Action greedy = inc_legal && q.value(s, Action::Increment) > q.value(s, Action::Hold)
                            ? Action::Increment
                            : Action::Hold;
  return explore_or(greedy, inc_legal, epsilon, rng);
}

void irl_update(AgentQTable& q, LocalState s, Action a, double reward, LocalState next,
                const LearnerConfig& cfg, bool terminal) {
  const double bootstrap = terminal ? 0.0 : cfg.gamma * q.best_value(next);
  double& v = q.at(s, a);
  v += cfg.alpha * (reward + bootstrap - v);
}

std::array<double, 2> edmarl_agent_value(int agent, std::span<const LocalState> states,
                                         std::span<const int> neighbours, const EdgeQTable& q) {
  if (neighbours.empty())
    throw Error(ErrorKind::NotApplicable, "agent has no neighbours in the coordination graph");
  std::array<double, 2> out{0.0, 0.0};
  const LocalState si = states[static_cast<std::size_t>(agent)];
  for (int j : neighbours) {
    const auto r = q.best_replies(agent, j, si, states[static_cast<std::size_t>(j)]);
    out[0] += r[0];
    out[1] += r[1];
  }
  return out;
}

Action edmarl_select(int agent, std::span<const LocalState> states, std::span<const int> neighbours,
                     const EdgeQTable& q, double epsilon, Rng& rng) {
  const auto values = edmarl_agent_value(agent, states, neighbours, q);
  const bool inc_legal = states[static_cast<std::size_t>(agent)].delay < q.max_delay(agent);
  const Action greedy = inc_legal && values[1] > values[0] ? Action::Increment : Action::Hold;
  return explore_or(greedy, inc_legal, epsilon, rng);
}

void edmarl_update(EdgeQTable& q, int i, int j, LocalState si, LocalState sj, Action ai, Action aj,
                   double ri, double rj, std::size_t ni, std::size_t nj, LocalState next_i,
                   LocalState next_j, const LearnerConfig& cfg, bool terminal) {
  if (ni == 0 || nj == 0) throw Error(ErrorKind::Precondition, "neighbourhood sizes include the agent itself");
  if (i > j) {
    edmarl_update(q, j, i, sj, si, aj, ai, rj, ri, nj, ni, next_j, next_i, cfg, terminal);
    return;
  }
  const double bootstrap = terminal ? 0.0 : cfg.gamma * q.best_value(i, j, next_i, next_j);
  const double target = ri / static_cast<double>(ni) + rj / static_cast<double>(nj) + bootstrap;
  double& v = q.slot(i, j, si, sj)[static_cast<std::size_t>(ai) * 2 + static_cast<std::size_t>(aj)];
  v = (1.0 - cfg.alpha) * v + cfg.alpha * target;
}

double edmarl_global_value(const EdgeQTable& q, const CoordinationGraph& g,
                           std::span<const LocalState> states, std::span<const Action> actions) {
  double sum = 0.0;
  for (std::size_t i = 0; i < g.vertex_count(); ++i) {
    for (int j : g.neighbours(i)) {
      const auto ju = static_cast<std::size_t>(j);
      sum += q.value(static_cast<int>(i), j, states[i], states[ju], actions[i], actions[ju]);
    }
  }
  return 0.5 * sum;
}

// ---------------------------------------------------------------------------

namespace {

class IrlLearner final : public Learner {
 public:
  explicit IrlLearner(QStore store) : store_(std::move(store)) {}

  Method method() const noexcept override { return Method::IRL; }

  void choose(const TrafficModel& model, const EnvState& st, double epsilon, Rng& rng,
              std::vector<Action>& out) override {
    out.assign(st.delays.size(), Action::Hold);
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (forced_hold(model, st, i)) continue;
      out[i] = irl_select(store_.agents[i], st.states[i], epsilon, rng);
    }
  }

  void update(const TrafficModel& model, const EnvState& before, std::span<const Action> actions,
              const EnvState& after, const LearnerConfig& cfg, bool terminal) override {
    for (std::size_t i = 0; i < actions.size(); ++i) {
      if (!has_neighbours(before, i) || model.delay_limit(i) == 0) continue;
      irl_update(store_.agents[i], before.states[i], actions[i], after.rewards[i], after.states[i], cfg,
                 terminal);
    }
  }

  QStore& store() noexcept override { return store_; }
  const QStore& store() const noexcept override { return store_; }

 private:
  QStore store_;
};

class EdMarlLearner final : public Learner {
 public:
  explicit EdMarlLearner(QStore store) : store_(std::move(store)) {}

  Method method() const noexcept override { return Method::EdMARL; }

  void choose(const TrafficModel& model, const EnvState& st, double epsilon, Rng& rng,
              std::vector<Action>& out) override {
    out.assign(st.delays.size(), Action::Hold);
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (forced_hold(model, st, i)) continue;
      out[i] = edmarl_select(static_cast<int>(i), st.states, st.traffic.graph.neighbours(i),
                             store_.edges, epsilon, rng);
    }
  }

  void update(const TrafficModel&, const EnvState& before, std::span<const Action> actions,
              const EnvState& after, const LearnerConfig& cfg, bool terminal) override {
    const auto& g = before.traffic.graph;
    for (const auto& [i, j] : g.edges()) {
      const auto iu = static_cast<std::size_t>(i);
      const auto ju = static_cast<std::size_t>(j);
      edmarl_update(store_.edges, i, j, before.states[iu], before.states[ju], actions[iu], actions[ju],
                    after.rewards[iu], after.rewards[ju], g.neighbourhood_size(iu),
                    g.neighbourhood_size(ju), after.states[iu], after.states[ju], cfg, terminal);
    }
  }

  QStore& store() noexcept override { return store_; }
  const QStore& store() const noexcept override { return store_; }

 private:
  QStore store_;
};

}  // namespace

std::unique_ptr<Learner> make_learner(QStore store) {
  if (store.method == Method::IRL) return std::make_unique<IrlLearner>(std::move(store));
  return std::make_unique<EdMarlLearner>(std::move(store));
}

std::unique_ptr<Learner> make_learner(Method m, const Scenario& s, int hotspot_cap) {
  return make_learner(QStore::empty_for(m, s, hotspot_cap));
}

EpisodeResult run_episode(const TrafficModel& model, const RewardModel& rewards, Learner& learner,
                          const LearnerConfig& cfg, int episode) {
  const std::size_t n = model.flight_count();
  EnvState st = env_observe(model, rewards, cfg.hotspot_cap, DelayAssignment(n));
  Rng rng({cfg.seed, static_cast<std::uint64_t>(episode)});
  const double epsilon = epsilon_at(episode, cfg);
  const Minutes budget = model.scenario().max_delay_limit();

  EpisodeResult res;
  res.returns.assign(n, 0.0);
  std::vector<Action> actions;
  while (res.steps < budget) {
    learner.choose(model, st, epsilon, rng, actions);
    for (std::size_t i = 0; i < n; ++i)
      if (forced_hold(model, st, i)) actions[i] = Action::Hold;
    EnvState next = env_step(model, rewards, cfg.hotspot_cap, st.delays, actions);
    ++res.steps;
    const bool all_hold = std::all_of(actions.begin(), actions.end(),
                                      [](Action a) { return a == Action::Hold; });
    // Only a hotspot-free successor ends the return; the all-HOLD fixed point
    // and the step budget truncate it.
    const bool terminal = next.traffic.hotspots.empty();
    learner.update(model, st, actions, next, cfg, terminal);
    for (std::size_t i = 0; i < n; ++i) res.returns[i] += next.rewards[i];
    st = std::move(next);
    if (all_hold) break;
  }
  res.hotspots = static_cast<int>(st.traffic.hotspots.size());
  res.global_reward = global_reward(st.rewards);
  res.delays = std::move(st.delays);
  return res;
}

TrainResult train(const TrafficModel& model, const RewardModel& rewards, Method method,
                  const LearnerConfig& cfg, std::optional<QStore> initial) {
  cfg.validate();
  if (initial && initial->method != method)
    throw Error(ErrorKind::Config, "initial Q-store was trained with a different method");
  auto learner = initial ? make_learner(std::move(*initial))
                         : make_learner(method, model.scenario(), cfg.hotspot_cap);

  TrainResult out;
  out.curve.reserve(static_cast<std::size_t>(cfg.episodes));
  EpisodeResult last;
  last.delays = DelayAssignment(model.flight_count());
  last.hotspots = static_cast<int>(model.hotspots(last.delays).size());
  for (int e = 0; e < cfg.episodes; ++e) {
    last = run_episode(model, rewards, *learner, cfg, e);
    out.curve.push_back({e, epsilon_at(e, cfg), last.hotspots, average_regulated_delay(last.delays),
                         last.global_reward});
  }
  out.solution = std::move(last.delays);
  out.remaining_hotspots = last.hotspots;
  out.solved = last.hotspots == 0;
  out.store = std::move(learner->store());
  return out;
}

}  // namespace dcb
