// Acceptance checks. Prints one PASS/FAIL line per criterion, with details on
// the lines before it, and exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dcb/experiments.hpp"
#include "dcb/generator.hpp"
#include "dcb/learners.hpp"
#include "dcb/reward.hpp"
#include "dcb/scenario_io.hpp"
#include "fixtures.hpp"
#include "reference.hpp"

using namespace dcb;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string summary;
};

void note(const std::string& line) { std::cout << "  " << line << std::endl; }

std::string fmt(double v, int digits = 3) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

// 1 ---------------------------------------------------------------------------

Outcome tiny3_oracle_equivalence() {
  const auto s = fx::tiny3();
  const TrafficModel model(s);
  const RewardModel rewards(s);
  const auto oracle = brute_force_oracle(model);
  const Minutes optimum = oracle.best.total();
  LearnerConfig cfg;

  bool pass = oracle.feasible && optimum == 10;
  std::string summary;
  for (Method m : {Method::EdMARL, Method::IRL}) {
    const auto t0 = Clock::now();
    const auto res = experiment(model, rewards, m, cfg, 20);
    const double secs = seconds_since(t0);
    int good = 0;
    std::ostringstream totals;
    for (const auto& r : res.runs) {
      const bool solved = model.hotspots(r.result.solution).empty();
      const Minutes total = r.result.solution.total();
      totals << (solved ? "" : "!") << total << ' ';
      if (m == Method::EdMARL ? (solved && total == optimum) : (solved && total >= optimum)) ++good;
    }
    note(std::string(to_string(m)) + ": " + std::to_string(good) + "/20 runs meet the target, " +
         std::to_string(res.solved_runs) + "/20 hotspot-free, " + fmt(secs, 1) + " s; totals (! = unsolved): " +
         totals.str());
    pass = pass && good >= 19 && secs < 60.0;
    summary += std::string(to_string(m)) + " " + std::to_string(good) + "/20 ";
  }
  return {pass, "tiny3 vs oracle optimum " + std::to_string(optimum) + ": " + summary};
}

// 2 ---------------------------------------------------------------------------

Outcome random_small_oracle_suite() {
  GeneratorParams gp;
  gp.flights = 5;
  gp.sectors = 2;
  gp.target_hotspots = 1;
  gp.hotspot_tolerance = 1;
  gp.max_delay_min = 2;
  gp.max_delay_max = 6;
  gp.min_crossing_duration = 10;
  gp.max_crossing_duration = 30;
  gp.horizon = 150;
  gp.require_solvable = false;

  int violations = 0, solved = 0, produced = 0, feasible = 0;
  const auto t0 = Clock::now();
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto s = generate_scenario(gp, seed);
    const TrafficModel model(s);
    const RewardModel rewards(s);
    const auto oracle = brute_force_oracle(model);
    feasible += oracle.feasible;
    for (Method m : {Method::IRL, Method::EdMARL}) {
      LearnerConfig cfg;
      cfg.seed = seed;
      const auto res = train(model, rewards, m, cfg);
      ++produced;
      if (!detect_hotspots(s, res.solution).empty()) continue;
      ++solved;
      const bool confirmed = ref::hotspots(s, res.solution).empty();
      if (!oracle.feasible || res.solution.total() < oracle.best.total() || !confirmed) {
        ++violations;
        note("violation on scenario " + std::to_string(seed) + " (" + to_string(m) + ")");
      }
    }
  }
  note(std::to_string(feasible) + "/25 scenarios feasible; " + std::to_string(solved) + "/" +
       std::to_string(produced) + " trained solutions hotspot-free; " + fmt(seconds_since(t0), 1) + " s");
  return {violations == 0, std::to_string(violations) + " solutions below the oracle optimum or with hotspots"};
}

// 3 ---------------------------------------------------------------------------

GeneratorParams desk_scale_params() {
  GeneratorParams gp;
  gp.flights = 60;
  gp.sectors = 6;
  gp.target_hotspots = 8;
  gp.hotspot_tolerance = 2;
  gp.max_delay_min = 30;
  gp.max_delay_max = 60;
  gp.horizon = 720;
  return gp;
}

Outcome desk_scale_suite() {
  const auto gp = desk_scale_params();
  const int runs = 20;
  const int allowed_failures = runs - 18;
  bool all_solved = true, within_budget = true;
  int trend_hits = 0;
  for (std::uint64_t sc = 1; sc <= 5; ++sc) {
    const auto s = generate_scenario(gp, sc);
    const TrafficModel model(s);
    const RewardModel rewards(s);
    const auto initial = model.hotspots(DelayAssignment(s.flights.size())).size();
    std::map<Method, double> mean_avg;
    for (Method m : {Method::IRL, Method::EdMARL}) {
      const auto t0 = Clock::now();
      int solved = 0, failed = 0, done = 0;
      double sum_avg = 0.0;
      for (int k = 0; k < runs && failed <= allowed_failures; ++k) {
        LearnerConfig cfg;
        cfg.seed = 1 + static_cast<std::uint64_t>(k);
        const auto res = train(model, rewards, m, cfg);
        const auto metrics = run_metrics(model, res.solution);
        ++done;
        sum_avg += metrics.avg_delay;
        if (metrics.remaining_hotspots == 0)
          ++solved;
        else
          ++failed;
      }
      const double secs = seconds_since(t0);
      mean_avg[m] = sum_avg / done;
      const bool ok = failed <= allowed_failures;
      all_solved = all_solved && ok;
      within_budget = within_budget && secs <= 600.0;
      note("scenario " + std::to_string(sc) + " (" + std::to_string(initial) + " hotspots) " + to_string(m) +
           ": " + std::to_string(solved) + "/" + std::to_string(done) + " solved" +
           (done < runs ? " (stopped early, target unreachable)" : "") + ", mean avg delay " +
           fmt(mean_avg[m]) + ", " + fmt(secs, 0) + " s");
    }
    if (mean_avg[Method::EdMARL] <= mean_avg[Method::IRL]) ++trend_hits;
  }
  note("ed-marl mean avg delay <= irl on " + std::to_string(trend_hits) + "/5 scenarios");
  const bool pass = all_solved && within_budget && trend_hits >= 4;
  return {pass, std::string("solve rate ") + (all_solved ? "met" : "missed") + ", trend " +
                    std::to_string(trend_hits) + "/5, budget " + (within_budget ? "met" : "missed")};
}

// 4 ---------------------------------------------------------------------------

Outcome schedule_arithmetic() {
  const LearnerConfig cfg;
  bool ok = epsilon_at(0, cfg) == 0.9 && epsilon_at(120, cfg) == 0.89 && epsilon_at(10800, cfg) == 0.0;
  for (int e = 0; e < 10800; ++e) ok = ok && epsilon_at(e, cfg) == 0.9 - 0.01 * (e / 120);
  for (int e = 10800; e < 20000; ++e) ok = ok && epsilon_at(e, cfg) == 0.0;
  return {ok, "epsilon schedule exact over episodes 0..19999"};
}

// 5 ---------------------------------------------------------------------------

Outcome difficulty_arithmetic() {
  struct Case {
    const char* id;
    double avg;
    double with_delay;
    double in_hotspots;
  };
  const std::vector<Case> cases{{"Aug4", 0.383, 146, 853},
                                {"Aug13", 1.152, 415, 1460},
                                {"Jul2", 1.663, 498, 778},
                                {"Jul12", 0.95, 254, 820},
                                {"Sep3", 0.732, 280, 783}};
  std::map<std::string, double> score;
  std::string hardest;
  for (const auto& c : cases) {
    score[c.id] = degree_of_difficulty(c.avg, c.with_delay, c.in_hotspots);
    if (hardest.empty() || score[c.id] > score[hardest]) hardest = c.id;
  }
  const bool ok = std::abs(score["Jul2"] - 1.0645) <= 0.001 && std::abs(score["Aug4"] - 0.0656) <= 0.001 &&
                  hardest == "Jul2";
  return {ok, "Jul2 " + fmt(score["Jul2"], 4) + ", Aug4 " + fmt(score["Aug4"], 4) + ", hardest " + hardest};
}

// 6 ---------------------------------------------------------------------------

Outcome reward_units() {
  const RewardParams p;
  bool ok = hotspot_cost(9, p) == -729.0;
  const auto table = StrategicCostTable::linear_default();
  Rng rng(6);
  int bad = 0;
  const std::vector<std::string> classes{"light", "medium", "heavy"};
  for (int k = 0; k < 1000; ++k) {
    const auto& cls = classes[static_cast<std::size_t>(rng.uniform_int(0, 2))];
    const auto d = static_cast<Minutes>(rng.uniform_int(0, 120));
    const auto t1 = static_cast<Minutes>(rng.uniform_int(1, 240));
    const auto t2 = t1 + static_cast<Minutes>(rng.uniform_int(1, 60));
    const double r0 = local_reward(d, 0, cls, p, table);
    const double r1 = local_reward(d, t1, cls, p, table);
    if (!(r1 < 0.0)) ++bad;
    if (!(r1 > local_reward(d, t2, cls, p, table))) ++bad;
    if (!(local_reward(d + 1, t1, cls, p, table) <= r1)) ++bad;
    if (!(local_reward(d + 1, 0, cls, p, table) <= r0)) ++bad;
    if ((r0 > 0.0) != (p.positive_reward > p.lambda * table.cost(d, cls))) ++bad;
  }
  ok = ok && bad == 0;
  return {ok, "hotspot_cost(9) = " + fmt(hotspot_cost(9, p), 1) + ", " + std::to_string(bad) +
                  " sign/monotonicity violations in 1000 samples"};
}

// 7 ---------------------------------------------------------------------------

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

Outcome update_algebra() {
  Rng rng(77);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    LearnerConfig cfg;
    cfg.alpha = 0.001 + rng.uniform() * 0.999;
    cfg.gamma = rng.uniform();
    const double r = rng.uniform() * 2000 - 1000, rj = rng.uniform() * 2000 - 1000;
    const double q0 = rng.uniform() * 200 - 100;
    const LocalState s{1, 2}, n{2, 2};

    AgentQTable q(4, 3);
    q.at(s, Action::Hold) = q0;
    const double nh = rng.uniform() * 100 - 50, ni = rng.uniform() * 100 - 50;
    q.at(n, Action::Hold) = nh;
    q.at(n, Action::Increment) = ni;
    irl_update(q, s, Action::Hold, r, n, cfg, false);
    worst = std::max(worst, rel_err(q.value(s, Action::Hold),
                                     q0 + cfg.alpha * (r + cfg.gamma * std::max(nh, ni) - q0)));

    const auto si = static_cast<std::size_t>(rng.uniform_int(2, 8));
    const auto sj = static_cast<std::size_t>(rng.uniform_int(2, 8));
    EdgeQTable e({4, 4}, 3);
    e.set(0, 1, s, s, Action::Increment, Action::Hold, q0);
    double best = -1e300;
    for (auto a : kActions)
      for (auto b : kActions) {
        const double v = rng.uniform() * 100 - 50;
        e.set(0, 1, n, n, a, b, v);
        best = std::max(best, v);
      }
    edmarl_update(e, 0, 1, s, s, Action::Increment, Action::Hold, r, rj, si, sj, n, n, cfg, false);
    const double target = r / static_cast<double>(si) + rj / static_cast<double>(sj) + cfg.gamma * best;
    worst = std::max(worst, rel_err(e.value(0, 1, s, s, Action::Increment, Action::Hold),
                                    (1 - cfg.alpha) * q0 + cfg.alpha * target));
  }

  // Shares inside a real learner step: on tiny3 every agent has two neighbours, so |N| = 3.
  const auto s = fx::tiny3();
  const TrafficModel model(s);
  const RewardModel rewards(s);
  LearnerConfig cfg;
  auto learner = make_learner(Method::EdMARL, s, cfg.hotspot_cap);
  const auto before = env_observe(model, rewards, cfg.hotspot_cap, DelayAssignment(3));
  const std::vector<Action> acts{Action::Hold, Action::Hold, Action::Increment};
  const auto after = env_step(model, rewards, cfg.hotspot_cap, before.delays, acts);
  learner->update(model, before, acts, after, cfg, false);
  const auto& q = learner->store().edges;
  const double got = q.value(0, 2, before.states[0], before.states[2], Action::Hold, Action::Increment);
  const double want = cfg.alpha * (after.rewards[0] / 3.0 + after.rewards[2] / 3.0);
  const bool shares = rel_err(got, want) <= 1e-12;
  note("worst relative error " + std::to_string(worst) + "; tiny3 edge (f1,f3) value " + fmt(got, 4) +
       " vs " + fmt(want, 4) + " with |N| = 3");
  return {worst <= 1e-12 && shares, "100 random tuples within 1e-12, |N| includes self"};
}

// 8 ---------------------------------------------------------------------------

Outcome demand_hotspot_oracle() {
  int demand_mismatch = 0, hotspot_mismatch = 0;
  for (std::uint64_t seed = 1000; seed < 1100; ++seed) {
    const auto s = fx::micro(seed, seed % 2 == 0);
    Rng rng({seed, 8});
    const auto d = fx::random_delays(s, rng);
    const auto table = compute_demand(s, d);
    const auto want = ref::demand(s, d);
    for (std::size_t r = 0; r < s.sectors.size(); ++r)
      for (std::size_t p = 0; p < table.period_count(); ++p)
        if (table.at(r, p) != want[r][p]) ++demand_mismatch;

    // Definitional filter: every cell whose demand exceeds capacity.
    const auto hs = detect_hotspots(s, d);
    const auto ref_hs = ref::hotspots(s, d);
    std::size_t cells = 0;
    for (std::size_t r = 0; r < s.sectors.size(); ++r)
      for (std::size_t p = 0; p < table.period_count(); ++p) cells += table.at(r, p) > s.sectors[r].capacity;
    if (hs.size() != ref_hs.size() || hs.size() != cells) {
      ++hotspot_mismatch;
      continue;
    }
    for (std::size_t k = 0; k < hs.size(); ++k)
      if (s.sectors[static_cast<std::size_t>(hs[k].sector)].id != ref_hs[k].sector ||
          hs[k].period.start != ref_hs[k].start || hs[k].demand != ref_hs[k].demand ||
          hs[k].participants != ref_hs[k].participants)
        ++hotspot_mismatch;
  }
  return {demand_mismatch == 0 && hotspot_mismatch == 0,
          std::to_string(demand_mismatch) + " demand and " + std::to_string(hotspot_mismatch) +
              " hotspot mismatches over 100 micro-scenarios"};
}

// 9 ---------------------------------------------------------------------------

Outcome cap_sweep_behaviour() {
  const auto s = fx::tiny3();
  const auto select_f3 = [](const FlightPlan& f) { return f.id == "f3"; };
  const std::vector<Minutes> caps{5, 10};
  const auto o5 = brute_force_oracle(TrafficModel(apply_local_max_delay(s, select_f3, 5)));
  const auto o10 = brute_force_oracle(TrafficModel(apply_local_max_delay(s, select_f3, 10)));
  note(std::string("oracle: cap 5 ") + (o5.feasible ? "feasible" : "infeasible") + ", cap 10 " +
       (o10.feasible ? "optimum " + std::to_string(o10.best.total()) : "infeasible"));
  bool pass = !o5.feasible && o10.feasible && o10.best.total() == 10;
  std::string summary;
  for (Method m : {Method::IRL, Method::EdMARL}) {
    const auto res = cap_sweep(s, select_f3, caps, m, LearnerConfig{}, 20);
    const auto& r5 = res.rows[0];
    const auto& r10 = res.rows[1];
    note(std::string(to_string(m)) + ": cap 5 solved " + std::to_string(r5.solved_runs) + "/20 (mean remaining " +
         fmt(r5.mean_remaining_hotspots, 2) + "), cap 10 solved " + std::to_string(r10.solved_runs) +
         "/20 (mean total delay " + fmt(r10.mean_raw_total_delay, 2) + ")");
    pass = pass && r5.solved_runs == 0 && r10.all_resolved;
    summary += std::string(to_string(m)) + " cap5 " + std::to_string(r5.solved_runs) + "/20 cap10 " +
               std::to_string(r10.solved_runs) + "/20; ";
  }
  return {pass, summary};
}

// 10 --------------------------------------------------------------------------

std::string artifacts(const TrafficModel& model, const TrainResult& r) {
  std::ostringstream os;
  write_solution_csv(os, model.scenario(), r.solution);
  write_curve_csv(os, r.curve);
  return os.str();
}

Outcome determinism() {
  GeneratorParams gp;
  gp.flights = 20;
  gp.sectors = 3;
  gp.target_hotspots = 3;
  gp.max_delay_min = 10;
  gp.max_delay_max = 20;
  gp.horizon = 300;
  const std::vector<Scenario> scenarios{fx::tiny3(), generate_scenario(gp, 5)};
  int pairs = 0, same = 0;
  for (const auto& s : scenarios) {
    const TrafficModel model(s);
    const RewardModel rewards(s);
    for (Method m : {Method::IRL, Method::EdMARL})
      for (std::uint64_t seed : {1u, 2u}) {
        LearnerConfig cfg;
        cfg.seed = seed;
        if (s.flights.size() > 3) cfg.episodes = 3000;
        const auto a = artifacts(model, train(model, rewards, m, cfg));
        const auto b = artifacts(model, train(model, rewards, m, cfg));
        ++pairs;
        same += a == b;
      }
  }
  return {same == pairs, std::to_string(same) + "/" + std::to_string(pairs) +
                             " (scenario, method, seed) pairs byte-identical"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"tiny3 oracle equivalence", tiny3_oracle_equivalence},
      {"random-small oracle suite", random_small_oracle_suite},
      {"desk-scale solve and trend", desk_scale_suite},
      {"schedule arithmetic", schedule_arithmetic},
      {"difficulty arithmetic", difficulty_arithmetic},
      {"reward unit checks", reward_units},
      {"update algebra", update_algebra},
      {"demand and hotspot oracle", demand_hotspot_oracle},
      {"cap sweep behaviour", cap_sweep_behaviour},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto& [name, check] = criteria[k];
    std::cout << "criterion " << k + 1 << " (" << name << ")" << std::endl;
    Outcome out;
    try {
      out = check();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    failures += !out.pass;
    std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << k + 1 << ": " << name << ": " << out.summary
              << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
            << " criteria pass" << std::endl;
  return failures == 0 ? 0 : 1;
}
