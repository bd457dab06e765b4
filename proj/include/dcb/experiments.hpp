#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "dcb/learners.hpp"
#include "dcb/reward.hpp"
#include "dcb/stats.hpp"
#include "dcb/traffic.hpp"

namespace dcb {

/// Delay histogram bin over [lo, hi] minutes (inclusive).
struct HistogramBin {
  Minutes lo = 0;
  Minutes hi = 0;
  int count = 0;
};

/// Bins [5,9], [10,29], [30,59], then 30-minute bins while they start at or below `max_delay`.
std::vector<HistogramBin> delay_histogram(const DelayAssignment& d, Minutes max_delay);

struct RunMetrics {
  double avg_delay = 0.0;        // regulated delay per flight (delays of 4 min or less ignored)
  int regulated_flights = 0;     // flights with delay above 4 min
  int remaining_hotspots = 0;
  Minutes total_delay = 0;       // regulated delay sum, so total_delay == avg_delay * flights
  Minutes raw_total_delay = 0;   // every minute of delay
  std::vector<HistogramBin> histogram;
};

RunMetrics run_metrics(const TrafficModel& model, const DelayAssignment& solution);

/// avg_delay × flights_with_delay / flights_in_hotspots; throws UndefinedRatio on a zero denominator.
double degree_of_difficulty(double avg_delay, double flights_with_delay, double flights_in_hotspots);

/// Flights participating in at least one hotspot.
int flights_in_hotspots(std::span<const Hotspot> hotspots, std::size_t flights);

using MetricSelector = std::function<double(const RunMetrics&)>;
AggregateStats aggregate(std::span<const RunMetrics> runs, const MetricSelector& metric);

struct RunRecord {
  std::uint64_t seed = 0;
  TrainResult result;
  RunMetrics metrics;
};

struct ExperimentResult {
  Method method = Method::IRL;
  std::vector<RunRecord> runs;  // in seed order
  AggregateStats avg_delay;
  AggregateStats regulated_flights;
  AggregateStats remaining_hotspots;
  AggregateStats raw_total_delay;
  int solved_runs = 0;
};

/// Trains `n_runs` times with seeds cfg.seed + k. `jobs` bounds the number of
/// concurrent runs (0 means hardware concurrency). Results do not depend on `jobs`.
ExperimentResult experiment(const TrafficModel& model, const RewardModel& rewards, Method method,
                            const LearnerConfig& cfg, int n_runs, unsigned jobs = 1);

/// metrics.json plus curve_<seed>.csv, solution_<seed>.csv, histogram_<seed>.csv per run.
void write_experiment_artifacts(const std::filesystem::path& dir, const TrafficModel& model,
                                const ExperimentResult& res);
nlohmann::json experiment_summary_json(const ExperimentResult& res);

void write_curve_csv(std::ostream& os, std::span<const CurvePoint> curve);
void write_histogram_csv(std::ostream& os, std::span<const HistogramBin> bins);

struct SweepRow {
  Minutes cap = 0;
  std::size_t capped_flights = 0;
  double mean_remaining_hotspots = 0.0;
  double mean_avg_delay = 0.0;
  double mean_regulated_flights = 0.0;
  double mean_raw_total_delay = 0.0;
  int solved_runs = 0;
  int runs = 0;
  bool all_resolved = false;  // every run ended with zero hotspots
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<ExperimentResult> experiments;  // one per cap
};

/// For each cap: cap the selected flights' max delay, then run the experiment.
SweepResult cap_sweep(const Scenario& scenario, const FlightSelector& selector,
                      std::span<const Minutes> caps, Method method, const LearnerConfig& cfg,
                      int n_runs, const RewardParams& params = {},
                      const StrategicCostTable& table = StrategicCostTable::linear_default(),
                      unsigned jobs = 1);

/// Rows: cap,mean_remaining_hotspots,mean_avg_delay,mean_regulated_flights.
void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows);

}  // namespace dcb
