#include "dcb/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <thread>

#include "dcb/error.hpp"
#include "dcb/scenario_io.hpp"

namespace dcb {

using nlohmann::json;

std::vector<HistogramBin> delay_histogram(const DelayAssignment& d, Minutes max_delay) {
  std::vector<HistogramBin> bins{{5, 9, 0}, {10, 29, 0}, {30, 59, 0}};
  for (Minutes lo = 60; lo <= max_delay; lo += 30) bins.push_back({lo, lo + 29, 0});
  for (Minutes m : d.minutes) {
    if (m <= kNoDelayThreshold) continue;
    auto it = std::find_if(bins.begin(), bins.end(),
                           [m](const HistogramBin& b) { return m >= b.lo && m <= b.hi; });
    if (it == bins.end()) {
      // Delay beyond the scenario maximum; extend so the bins stay complete.
      while (bins.back().hi < m) bins.push_back({bins.back().hi + 1, bins.back().hi + 30, 0});
      it = std::prev(bins.end());
    }
    ++it->count;
  }
  return bins;
}

RunMetrics run_metrics(const TrafficModel& model, const DelayAssignment& solution) {
  require_feasible(model.scenario(), solution);
  RunMetrics m;
  m.regulated_flights = regulated_flights(solution);
  m.total_delay = regulated_delay(solution);
  m.avg_delay = average_regulated_delay(solution);
  m.raw_total_delay = solution.total();
  m.remaining_hotspots = static_cast<int>(model.hotspots(solution).size());
  m.histogram = delay_histogram(solution, model.scenario().max_delay_limit());
  return m;
}

double degree_of_difficulty(double avg_delay, double flights_with_delay, double flights_in_hotspots) {
  if (flights_in_hotspots == 0.0)
    throw Error(ErrorKind::UndefinedRatio, "difficulty undefined without flights in hotspots");
  return avg_delay * flights_with_delay / flights_in_hotspots;
}

int flights_in_hotspots(std::span<const Hotspot> hotspots, std::size_t flights) {
  std::vector<char> in(flights, 0);
  for (const auto& h : hotspots)
    for (int f : h.participants) in[static_cast<std::size_t>(f)] = 1;
  return static_cast<int>(std::count(in.begin(), in.end(), 1));
}

AggregateStats aggregate(std::span<const RunMetrics> runs, const MetricSelector& metric) {
  std::vector<double> v;
  v.reserve(runs.size());
  for (const auto& r : runs) v.push_back(metric(r));
  return aggregate(std::span<const double>(v));
}

namespace {

AggregateStats summarize(const std::vector<RunRecord>& runs, const MetricSelector& metric) {
  std::vector<RunMetrics> ms;
  for (const auto& r : runs) ms.push_back(r.metrics);
  if (ms.size() >= 2) return aggregate(std::span<const RunMetrics>(ms), metric);
  AggregateStats st;
  st.n = ms.size();
  if (!ms.empty()) st.mean = st.median = metric(ms.front());
  return st;
}

json stats_json(const AggregateStats& st) {
  json j{{"n", st.n}, {"mean", st.mean}, {"std", st.std}, {"median", st.median}};
  j["ks_statistic"] = st.ks_statistic ? json(*st.ks_statistic) : json(nullptr);
  j["ks_p_value"] = st.ks_p_value ? json(*st.ks_p_value) : json(nullptr);
  return j;
}

template <typename Fn>
void parallel_for(int n, unsigned jobs, Fn&& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max(n, 1)));
  if (jobs <= 1) {
    for (int k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (int k = next++; k < n; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  workers.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

ExperimentResult experiment(const TrafficModel& model, const RewardModel& rewards, Method method,
                            const LearnerConfig& cfg, int n_runs, unsigned jobs) {
  if (n_runs < 1) throw Error(ErrorKind::Parameter, "an experiment needs at least one run");
  ExperimentResult res;
  res.method = method;
  res.runs.resize(static_cast<std::size_t>(n_runs));
  parallel_for(n_runs, jobs, [&](int k) {
    LearnerConfig run_cfg = cfg;
    run_cfg.seed = cfg.seed + static_cast<std::uint64_t>(k);
    auto& rec = res.runs[static_cast<std::size_t>(k)];
    rec.seed = run_cfg.seed;
    rec.result = train(model, rewards, method, run_cfg);
    rec.metrics = run_metrics(model, rec.result.solution);
  });
  res.avg_delay = summarize(res.runs, [](const RunMetrics& m) { return m.avg_delay; });
  res.regulated_flights =
      summarize(res.runs, [](const RunMetrics& m) { return static_cast<double>(m.regulated_flights); });
  res.remaining_hotspots =
      summarize(res.runs, [](const RunMetrics& m) { return static_cast<double>(m.remaining_hotspots); });
  res.raw_total_delay =
      summarize(res.runs, [](const RunMetrics& m) { return static_cast<double>(m.raw_total_delay); });
  res.solved_runs = static_cast<int>(std::count_if(
      res.runs.begin(), res.runs.end(), [](const RunRecord& r) { return r.metrics.remaining_hotspots == 0; }));
  return res;
}

json experiment_summary_json(const ExperimentResult& res) {
  json j;
  j["method"] = to_string(res.method);
  j["runs"] = res.runs.size();
  j["solved_runs"] = res.solved_runs;
  j["avg_delay"] = stats_json(res.avg_delay);
  j["regulated_flights"] = stats_json(res.regulated_flights);
  j["remaining_hotspots"] = stats_json(res.remaining_hotspots);
  j["total_delay"] = stats_json(res.raw_total_delay);
  j["per_run"] = json::array();
  for (const auto& r : res.runs) {
    j["per_run"].push_back({{"seed", r.seed},
                            {"avg_delay", r.metrics.avg_delay},
                            {"regulated_flights", r.metrics.regulated_flights},
                            {"remaining_hotspots", r.metrics.remaining_hotspots},
                            {"total_delay", r.metrics.raw_total_delay}});
  }
  return j;
}

void write_curve_csv(std::ostream& os, std::span<const CurvePoint> curve) {
  os << "episode,epsilon,hotspot_count,avg_delay,global_reward\n";
  os << std::setprecision(10);
  for (const auto& p : curve)
    os << p.episode << ',' << p.epsilon << ',' << p.hotspots << ',' << p.avg_delay << ','
       << p.global_reward << '\n';
}

void write_histogram_csv(std::ostream& os, std::span<const HistogramBin> bins) {
  os << "bin_lo,bin_hi,count\n";
  for (const auto& b : bins) os << b.lo << ',' << b.hi << ',' << b.count << '\n';
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
  return out;
}

}  // namespace

void write_experiment_artifacts(const std::filesystem::path& dir, const TrafficModel& model,
                                const ExperimentResult& res) {
  std::filesystem::create_directories(dir);
  {
    auto out = open_out(dir / "metrics.json");
    out << experiment_summary_json(res).dump(2) << '\n';
  }
  for (const auto& r : res.runs) {
    const auto tag = std::to_string(r.seed);
    auto curve = open_out(dir / ("curve_" + tag + ".csv"));
    write_curve_csv(curve, r.result.curve);
    auto sol = open_out(dir / ("solution_" + tag + ".csv"));
    write_solution_csv(sol, model.scenario(), r.result.solution);
    auto hist = open_out(dir / ("histogram_" + tag + ".csv"));
    write_histogram_csv(hist, r.metrics.histogram);
  }
}

SweepResult cap_sweep(const Scenario& scenario, const FlightSelector& selector,
                      std::span<const Minutes> caps, Method method, const LearnerConfig& cfg,
                      int n_runs, const RewardParams& params, const StrategicCostTable& table,
                      unsigned jobs) {
  if (caps.empty()) throw Error(ErrorKind::Parameter, "cap sweep needs at least one cap");
  SweepResult out;
  for (Minutes cap : caps) {
    const Scenario capped = apply_local_max_delay(scenario, selector, cap);
    const TrafficModel model(capped);
    const RewardModel rewards(capped, params, table);
    auto res = experiment(model, rewards, method, cfg, n_runs, jobs);

    SweepRow row;
    row.cap = cap;
    row.capped_flights = static_cast<std::size_t>(
        std::count_if(scenario.flights.begin(), scenario.flights.end(), selector));
    row.runs = static_cast<int>(res.runs.size());
    row.solved_runs = res.solved_runs;
    row.all_resolved = res.solved_runs == row.runs;
    row.mean_remaining_hotspots = res.remaining_hotspots.mean;
    row.mean_avg_delay = res.avg_delay.mean;
    row.mean_regulated_flights = res.regulated_flights.mean;
    row.mean_raw_total_delay = res.raw_total_delay.mean;
    out.rows.push_back(row);
    out.experiments.push_back(std::move(res));
  }
  return out;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
  os << "cap,mean_remaining_hotspots,mean_avg_delay,mean_regulated_flights,mean_total_delay,solved_runs,runs\n";
  os << std::setprecision(10);
  for (const auto& r : rows)
    os << r.cap << ',' << r.mean_remaining_hotspots << ',' << r.mean_avg_delay << ','
       << r.mean_regulated_flights << ',' << r.mean_raw_total_delay << ',' << r.solved_runs << ','
       << r.runs << '\n';
}

}  // namespace dcb
