#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dcb/error.hpp"
#include "dcb/experiments.hpp"
#include "dcb/generator.hpp"
#include "dcb/learners.hpp"
#include "dcb/qstore_io.hpp"
#include "dcb/reward.hpp"
#include "dcb/scenario_io.hpp"
#include "dcb/traffic.hpp"

namespace fs = std::filesystem;
using namespace dcb;

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kValidation = 2, kInfeasible = 3, kIo = 4, kOther = 5 };

struct Options {
  std::string scenario;
  std::string method = "edmarl";
  int episodes = 15000;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  double alpha = 0.01;
  double gamma = 0.99;
  RewardParams reward;
  std::string cost_table;
  std::optional<Minutes> period_duration;
  std::optional<Minutes> period_step;
  std::string out;
  std::string solution;
  std::string resume;
  int runs = 20;
  std::vector<Minutes> caps;
  std::vector<std::string> flights;
  bool entry_rule = false;
};

void add_scenario(CLI::App* cmd, Options& o) {
  cmd->add_option("scenario", o.scenario, "Scenario JSON file")->required();
  cmd->add_option("--period-duration", o.period_duration, "Counting period length (min)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--period-step", o.period_step, "Counting period step (min)")->check(CLI::PositiveNumber);
  cmd->add_flag("--entry-count", o.entry_rule, "Count entries instead of overlaps");
}

void add_reward(CLI::App* cmd, Options& o) {
  cmd->add_option("--lambda", o.reward.lambda, "Weight of the strategic delay cost")->capture_default_str();
  cmd->add_option("--positive-reward", o.reward.positive_reward, "Reward outside hotspots")
      ->capture_default_str();
  cmd->add_option("--hotspot-rate", o.reward.hotspot_rate, "Cost per congested minute")
      ->capture_default_str();
  cmd->add_option("--cost-table", o.cost_table, "Strategic delay cost table (JSON)")
      ;
}

void add_learning(CLI::App* cmd, Options& o) {
  add_reward(cmd, o);
  cmd->add_option("--method", o.method, "irl or edmarl")
      ->check(CLI::IsMember({"irl", "edmarl", "ed-marl"}))
      ->capture_default_str();
  cmd->add_option("--episodes", o.episodes, "Training episodes")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--seed", o.seed, "Base seed")->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "Learning rate")->capture_default_str();
  cmd->add_option("--gamma", o.gamma, "Discount factor")->capture_default_str();
}

Scenario scenario_of(const Options& o) {
  Scenario s = load_scenario(o.scenario);
  if (o.period_duration) s.period_duration = *o.period_duration;
  if (o.period_step) s.period_step = *o.period_step;
  return s;
}

StrategicCostTable table_of(const Options& o) {
  return o.cost_table.empty() ? StrategicCostTable::linear_default() : load_cost_table(o.cost_table);
}

LearnerConfig config_of(const Options& o) {
  LearnerConfig cfg;
  cfg.alpha = o.alpha;
  cfg.gamma = o.gamma;
  cfg.episodes = o.episodes;
  cfg.seed = o.seed;
  cfg.validate();
  return cfg;
}

CountingRule rule_of(const Options& o) { return o.entry_rule ? CountingRule::Entry : CountingRule::Overlap; }

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
  return out;
}

fs::path out_dir(const Options& o) {
  fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  fs::create_directories(dir);
  return dir;
}

void print_metrics(const RunMetrics& m) {
  std::cout << "remaining hotspots " << m.remaining_hotspots << '\n'
            << "regulated flights " << m.regulated_flights << '\n'
            << "average delay " << m.avg_delay << '\n'
            << "total delay " << m.raw_total_delay << '\n';
}

int cmd_generate(const GeneratorParams& params, const Options& o) {
  const Scenario s = generate_scenario(params, o.seed);
  if (o.out.empty()) {
    std::cout << scenario_to_json(s).dump(2) << '\n';
  } else {
    save_scenario(s, o.out);
    const TrafficModel model(s);
    spdlog::info("wrote {} ({} flights, {} hotspots)", o.out, s.flights.size(),
                 model.hotspots(DelayAssignment(s.flights.size())).size());
  }
  return kOk;
}

int cmd_validate(const Options& o) {
  const Scenario s = scenario_of(o);
  const auto report = validate_scenario(s);
  if (!report.ok()) {
    std::cout << report.to_string();
    return kValidation;
  }
  std::cout << "ok: " << s.sectors.size() << " sectors, " << s.flights.size() << " flights\n";
  return kOk;
}

int cmd_inspect(const Options& o) {
  const Scenario s = scenario_of(o);
  require_valid(s);
  const TrafficModel model(s, rule_of(o));
  DelayAssignment d(s.flights.size());
  if (!o.solution.empty()) {
    d = load_solution(o.solution, s);
    require_feasible(s, d);
  }
  const auto snap = model.snapshot(d);
  const auto deg = degree_stats(snap.graph);
  const int in_hotspots = flights_in_hotspots(snap.hotspots, s.flights.size());

  std::cout << "flights " << s.flights.size() << '\n'
            << "sectors " << s.sectors.size() << '\n'
            << "counting periods " << model.periods().size() << '\n'
            << "hotspots " << snap.hotspots.size() << '\n'
            << "flights in hotspots " << in_hotspots << '\n'
            << "graph edges " << snap.graph.edge_count() << '\n';
  if (deg.non_isolated > 0)
    std::cout << "degree min " << deg.min << " max " << deg.max << " avg " << deg.mean
              << " over " << deg.non_isolated << " non-isolated flights\n";
  else
    std::cout << "degree n/a (no edges)\n";
  for (const auto& h : snap.hotspots) {
    const auto& p = h.period;
    std::cout << "hotspot " << s.sectors[h.sector].id << " [" << p.start << "," << p.end << ") demand "
              << h.demand << " capacity " << h.capacity << '\n';
  }

  if (!o.solution.empty()) {
    const auto m = run_metrics(model, d);
    print_metrics(m);
    const auto initial = model.hotspots(DelayAssignment(s.flights.size()));
    const int initial_in = flights_in_hotspots(initial, s.flights.size());
    if (initial_in > 0)
      std::cout << "difficulty " << degree_of_difficulty(m.avg_delay, m.regulated_flights, initial_in) << '\n';
    else
      std::cout << "difficulty n/a (no flights in hotspots)\n";
  }

  if (!o.out.empty()) {
    const fs::path dir = out_dir(o);
    auto demand = open_out(dir / "demand.csv");
    write_demand_csv(demand, model, snap.demand);
    auto hs = open_out(dir / "hotspots.csv");
    write_hotspots_csv(hs, model, snap.hotspots);
  }
  return kOk;
}

int cmd_train(const Options& o) {
  const Scenario s = scenario_of(o);
  const TrafficModel model(s, rule_of(o));
  const RewardModel rewards(s, o.reward, table_of(o));
  const Method method = method_from_string(o.method);
  const LearnerConfig cfg = config_of(o);

  std::optional<QStore> initial;
  if (!o.resume.empty()) {
    initial = load_qstore(o.resume, s);
    if (initial->method != method)
      throw Error(ErrorKind::Parameter, "Q-store was trained with a different method");
  }

  spdlog::info("training {} on {} flights for {} episodes (seed {})", to_string(method), s.flights.size(),
               cfg.episodes, cfg.seed);
  const auto res = train(model, rewards, method, cfg, std::move(initial));
  const auto m = run_metrics(model, res.solution);

  const fs::path dir = out_dir(o);
  const auto tag = std::to_string(cfg.seed);
  save_solution(dir / ("solution_" + tag + ".csv"), s, res.solution);
  {
    auto curve = open_out(dir / ("curve_" + tag + ".csv"));
    write_curve_csv(curve, res.curve);
    auto hist = open_out(dir / ("histogram_" + tag + ".csv"));
    write_histogram_csv(hist, m.histogram);
  }
  save_qstore(res.store, s, dir / ("qstore_" + tag + ".json"));

  print_metrics(m);
  return kOk;
}

int cmd_evaluate(const Options& o) {
  const Scenario s = scenario_of(o);
  const TrafficModel model(s, rule_of(o));
  const DelayAssignment d = load_solution(o.solution, s);
  const auto m = run_metrics(model, d);
  print_metrics(m);
  if (!o.out.empty()) {
    auto hist = open_out(out_dir(o) / "histogram.csv");
    write_histogram_csv(hist, m.histogram);
  }
  return kOk;
}

int cmd_oracle(const Options& o, const std::string& objective, std::uint64_t budget) {
  const Scenario s = scenario_of(o);
  const TrafficModel model(s, rule_of(o));
  const RewardModel rewards(s, o.reward, table_of(o));
  const auto obj = objective == "reward" ? OracleObjective::RewardCost : OracleObjective::TotalDelay;
  const auto res = brute_force_oracle(model, obj, budget, &rewards);
  std::cout << "evaluated " << res.evaluated << " assignments\n";
  if (!res.feasible) {
    std::cout << "no hotspot-free assignment exists\n";
    return kInfeasible;
  }
  std::cout << "optimal total delay " << res.best.total() << '\n';
  if (obj == OracleObjective::RewardCost) std::cout << "objective " << res.objective << '\n';
  write_solution_csv(std::cout, s, res.best);
  if (!o.out.empty()) save_solution(out_dir(o) / "oracle_solution.csv", s, res.best);
  return kOk;
}

int cmd_experiment(const Options& o) {
  const Scenario s = scenario_of(o);
  const TrafficModel model(s, rule_of(o));
  const RewardModel rewards(s, o.reward, table_of(o));
  const Method method = method_from_string(o.method);
  const auto res = experiment(model, rewards, method, config_of(o), o.runs, o.jobs);
  write_experiment_artifacts(out_dir(o), model, res);
  std::cout << "solved runs " << res.solved_runs << "/" << res.runs.size() << '\n'
            << "average delay mean " << res.avg_delay.mean << " std " << res.avg_delay.std << " median "
            << res.avg_delay.median << '\n'
            << "regulated flights mean " << res.regulated_flights.mean << " std "
            << res.regulated_flights.std << " median " << res.regulated_flights.median << '\n';
  if (res.avg_delay.ks_p_value) std::cout << "average delay K-S p-value " << *res.avg_delay.ks_p_value << '\n';
  return kOk;
}

int cmd_sweep(const Options& o) {
  const Scenario s = scenario_of(o);
  for (const auto& id : o.flights)
    if (!s.flight_index(id)) throw Error(ErrorKind::Parameter, "unknown flight " + id);
  const std::set<std::string> chosen(o.flights.begin(), o.flights.end());
  const FlightSelector selector = [&](const FlightPlan& f) { return chosen.empty() || chosen.count(f.id) > 0; };

  const auto res = cap_sweep(s, selector, o.caps, method_from_string(o.method), config_of(o), o.runs, o.reward,
                             table_of(o), o.jobs);
  const fs::path dir = out_dir(o);
  {
    auto csv = open_out(dir / "sweep.csv");
    write_sweep_csv(csv, res.rows);
  }
  write_sweep_csv(std::cout, res.rows);
  for (std::size_t k = 0; k < res.rows.size(); ++k) {
    const Scenario capped = apply_local_max_delay(s, selector, res.rows[k].cap);
    write_experiment_artifacts(dir / ("cap_" + std::to_string(res.rows[k].cap)), TrafficModel(capped, rule_of(o)),
                               res.experiments[k]);
  }
  return kOk;
}

int cmd_diagnose(const Options& o, std::size_t samples) {
  const Scenario s = scenario_of(o);
  const TrafficModel model(s, rule_of(o));
  const RewardModel rewards(s, o.reward, table_of(o));
  std::set<std::string> chosen(o.flights.begin(), o.flights.end());
  for (const auto& id : chosen)
    if (!s.flight_index(id)) throw Error(ErrorKind::Parameter, "unknown flight " + id);

  std::cout << "flight,factoredness,learnability,learnability_samples,excluded_samples\n";
  const auto states = random_state_sampler(model, o.seed);
  for (std::size_t i = 0; i < s.flights.size(); ++i) {
    if (!chosen.empty() && !chosen.count(s.flights[i].id)) continue;
    std::cout << s.flights[i].id << ',';
    if (model.delay_limit(i) == 0) {
      std::cout << "n/a,n/a,0,0\n";
      continue;
    }
    const double fac =
        estimate_factoredness(model, rewards, i, random_pair_sampler(model, i, o.seed + i), samples);
    std::cout << fac << ',';
    try {
      const auto lrn = estimate_learnability(model, rewards, i, states(0), states, samples);
      std::cout << lrn.value << ',' << lrn.used << ',' << lrn.excluded << '\n';
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UndefinedRatio) throw;
      std::cout << "n/a,0," << samples << '\n';
    }
  }
  return kOk;
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Validation:
    case ErrorKind::OutOfHorizon:
    case ErrorKind::Config:
      return kValidation;
    case ErrorKind::Precondition:
    case ErrorKind::Generation:
      return kInfeasible;
    case ErrorKind::Io:
      return kIo;
    case ErrorKind::Parameter:
      return kUsage;
    default:
      return kOther;
  }
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("dcb_marl");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("DCB_MARL_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Ground-delay demand-capacity balancing with multiagent reinforcement learning"};
  app.require_subcommand(1);
  Options o;

  GeneratorParams gen;
  auto* generate = app.add_subcommand("generate", "Generate a random scenario");
  generate->add_option("--seed", o.seed, "Generator seed")->capture_default_str();
  generate->add_option("--flights", gen.flights)->capture_default_str();
  generate->add_option("--sectors", gen.sectors)->capture_default_str();
  generate->add_option("--hotspots", gen.target_hotspots, "Target initial hotspots")->capture_default_str();
  generate->add_option("--tolerance", gen.hotspot_tolerance)->capture_default_str();
  generate->add_option("--max-delay-min", gen.max_delay_min)->capture_default_str();
  generate->add_option("--max-delay-max", gen.max_delay_max)->capture_default_str();
  generate->add_option("--horizon", gen.horizon)->capture_default_str();
  generate->add_option("--period-duration", gen.period_duration)->capture_default_str();
  generate->add_option("--period-step", gen.period_step)->capture_default_str();
  generate->add_option("--peak-fraction", gen.peak_fraction, "Share of flights starting in peak windows")
      ->capture_default_str();
  generate->add_option("--peaks", gen.peaks)->capture_default_str();
  generate->add_option("--peak-width", gen.peak_width)->capture_default_str();
  generate->add_option("--regulatable-fraction", gen.regulatable_fraction)->capture_default_str();
  generate->add_option("--capacity", gen.fixed_capacity, "Fixed capacity for every sector");
  generate->add_option("--out", o.out, "Output scenario file (stdout when omitted)");

  auto* validate = app.add_subcommand("validate", "Validate a scenario file");
  add_scenario(validate, o);

  auto* inspect = app.add_subcommand("inspect", "Demand, hotspots and coordination graph");
  add_scenario(inspect, o);
  inspect->add_option("--solution", o.solution, "Solution CSV to apply");
  inspect->add_option("--out", o.out, "Directory for demand.csv and hotspots.csv");

  auto* train_cmd = app.add_subcommand("train", "Train one run");
  add_scenario(train_cmd, o);
  add_learning(train_cmd, o);
  train_cmd->add_option("--resume", o.resume, "Q-store snapshot to continue from");
  train_cmd->add_option("--out", o.out, "Output directory")->capture_default_str();

  auto* evaluate = app.add_subcommand("evaluate", "Report metrics of a solution file");
  add_scenario(evaluate, o);
  evaluate->add_option("--solution", o.solution, "Solution CSV")->required();
  evaluate->add_option("--out", o.out, "Directory for histogram.csv");

  std::string objective = "delay";
  std::uint64_t budget = 10'000'000;
  auto* oracle = app.add_subcommand("oracle", "Exhaustive optimum on small scenarios");
  add_scenario(oracle, o);
  add_reward(oracle, o);
  oracle->add_option("--objective", objective, "delay or reward")
      ->check(CLI::IsMember({"delay", "reward"}))
      ->capture_default_str();
  oracle->add_option("--budget", budget, "Maximum joint assignments")->capture_default_str();
  oracle->add_option("--out", o.out, "Directory for oracle_solution.csv");

  auto* exp = app.add_subcommand("experiment", "Independent seeded runs with aggregate statistics");
  add_scenario(exp, o);
  add_learning(exp, o);
  exp->add_option("--runs", o.runs)->check(CLI::PositiveNumber)->capture_default_str();
  exp->add_option("--jobs", o.jobs, "Concurrent runs (0 = all cores)")->capture_default_str();
  exp->add_option("--out", o.out, "Output directory")->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Local max-delay cap sweep");
  add_scenario(sweep, o);
  add_learning(sweep, o);
  sweep->add_option("--caps", o.caps, "Caps in minutes")->required()->delimiter(',');
  sweep->add_option("--flights", o.flights, "Flights to cap (all when omitted)")->delimiter(',');
  sweep->add_option("--runs", o.runs)->check(CLI::PositiveNumber)->capture_default_str();
  sweep->add_option("--jobs", o.jobs, "Concurrent runs (0 = all cores)")->capture_default_str();
  sweep->add_option("--out", o.out, "Output directory")->capture_default_str();

  std::size_t samples = 1000;
  auto* diagnose = app.add_subcommand("diagnose-reward", "Factoredness and learnability estimates");
  add_scenario(diagnose, o);
  add_reward(diagnose, o);
  diagnose->add_option("--seed", o.seed)->capture_default_str();
  diagnose->add_option("--samples", samples)->check(CLI::PositiveNumber)->capture_default_str();
  diagnose->add_option("--flights", o.flights, "Flights to diagnose (all when omitted)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    o.reward.validate();
    if (*generate) return cmd_generate(gen, o);
    if (*validate) return cmd_validate(o);
    if (*inspect) return cmd_inspect(o);
    if (*train_cmd) return cmd_train(o);
    if (*evaluate) return cmd_evaluate(o);
    if (*oracle) return cmd_oracle(o, objective, budget);
    if (*exp) return cmd_experiment(o);
    if (*sweep) return cmd_sweep(o);
    if (*diagnose) return cmd_diagnose(o, samples);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
  return kUsage;
}
