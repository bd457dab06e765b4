#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dcb/error.hpp"
#include "dcb/experiments.hpp"
#include "dcb/learners.hpp"
#include "dcb/reward.hpp"
#include "dcb/scenario_io.hpp"
#include "dcb/traffic.hpp"

namespace py = pybind11;
using namespace dcb;

namespace {

Scenario scenario_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Validation, std::string("malformed JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

DelayAssignment as_delays(const std::vector<Minutes>& m) { return DelayAssignment(m); }

py::dict hotspot_dict(const Scenario& s, const Hotspot& h) {
  py::dict d;
  d["sector"] = s.sectors[static_cast<std::size_t>(h.sector)].id;
  d["start"] = h.period.start;
  d["end"] = h.period.end;
  d["demand"] = h.demand;
  d["capacity"] = h.capacity;
  py::list who;
  for (int f : h.participants) who.append(s.flights[static_cast<std::size_t>(f)].id);
  d["participants"] = who;
  return d;
}

py::dict metrics_dict(const RunMetrics& m) {
  py::dict d;
  d["avg_delay"] = m.avg_delay;
  d["regulated_flights"] = m.regulated_flights;
  d["remaining_hotspots"] = m.remaining_hotspots;
  d["total_delay"] = m.raw_total_delay;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Demand-capacity balancing simulator with independent and edge-based learners";

  py::register_exception<Error>(m, "DcbError");

  py::enum_<Method>(m, "Method").value("IRL", Method::IRL).value("EDMARL", Method::EdMARL);

  py::class_<LearnerConfig>(m, "LearnerConfig")
      .def(py::init<>())
      .def_readwrite("alpha", &LearnerConfig::alpha)
      .def_readwrite("gamma", &LearnerConfig::gamma)
      .def_readwrite("episodes", &LearnerConfig::episodes)
      .def_readwrite("hotspot_cap", &LearnerConfig::hotspot_cap)
      .def_readwrite("seed", &LearnerConfig::seed);

  py::class_<RewardParams>(m, "RewardParams")
      .def(py::init<>())
      .def_readwrite("lambda_", &RewardParams::lambda)
      .def_readwrite("positive_reward", &RewardParams::positive_reward)
      .def_readwrite("hotspot_rate", &RewardParams::hotspot_rate);

  py::class_<Scenario>(m, "Scenario")
      .def_static("load", &load_scenario, py::arg("path"))
      .def_static("from_json", &scenario_from_string, py::arg("text"))
      .def("to_json", [](const Scenario& s) { return scenario_to_json(s).dump(); })
      .def("validate",
           [](const Scenario& s) {
             std::vector<std::string> codes;
             for (const auto& v : validate_scenario(s).violations) codes.push_back(v.code);
             return codes;
           })
      .def_property_readonly("flight_ids",
                             [](const Scenario& s) {
                               std::vector<std::string> ids;
                               for (const auto& f : s.flights) ids.push_back(f.id);
                               return ids;
                             })
      .def_property_readonly("sector_ids", [](const Scenario& s) {
        std::vector<std::string> ids;
        for (const auto& r : s.sectors) ids.push_back(r.id);
        return ids;
      });

  py::class_<TrafficModel>(m, "TrafficModel")
      .def(py::init<Scenario>(), py::arg("scenario"))
      .def("demand",
           [](const TrafficModel& t, const std::vector<Minutes>& d) {
             const auto table = t.demand(as_delays(d));
             std::vector<std::vector<int>> out(table.sector_count(), std::vector<int>(table.period_count()));
             for (std::size_t r = 0; r < table.sector_count(); ++r)
               for (std::size_t p = 0; p < table.period_count(); ++p) out[r][p] = table.at(r, p);
             return out;
           })
      .def("hotspots",
           [](const TrafficModel& t, const std::vector<Minutes>& d) {
             py::list out;
             for (const auto& h : t.hotspots(as_delays(d))) out.append(hotspot_dict(t.scenario(), h));
             return out;
           })
      .def("congested_durations", [](const TrafficModel& t, const std::vector<Minutes>& d) {
        return t.snapshot(as_delays(d)).congested;
      });

  m.def(
      "global_reward",
      [](const TrafficModel& t, const std::vector<Minutes>& d, const RewardParams& p) {
        const RewardModel r(t.scenario(), p);
        return global_reward(t, r, as_delays(d));
      },
      py::arg("model"), py::arg("delays"), py::arg("params") = RewardParams{});

  m.def("hotspot_cost", [](Minutes tdc, const RewardParams& p) { return hotspot_cost(tdc, p); }, py::arg("tdc"),
        py::arg("params") = RewardParams{});
  m.def("epsilon_at", [](int e, const LearnerConfig& c) { return epsilon_at(e, c); }, py::arg("episode"),
        py::arg("config") = LearnerConfig{});
  m.def("degree_of_difficulty", &degree_of_difficulty, py::arg("avg_delay"), py::arg("flights_with_delay"),
        py::arg("flights_in_hotspots"));

  m.def(
      "oracle",
      [](const TrafficModel& t, std::uint64_t budget) -> py::object {
        const auto res = brute_force_oracle(t, OracleObjective::TotalDelay, budget);
        if (!res.feasible) return py::none();
        return py::cast(res.best.minutes);
      },
      py::arg("model"), py::arg("budget") = 10'000'000,
      "Minimum total delay hotspot-free assignment, or None when none exists.");

  m.def(
      "train",
      [](const TrafficModel& t, Method method, const LearnerConfig& cfg, const RewardParams& p) {
        const RewardModel r(t.scenario(), p);
        TrainResult res;
        {
          py::gil_scoped_release release;
          res = train(t, r, method, cfg);
        }
        py::dict out;
        out["solution"] = res.solution.minutes;
        out["solved"] = res.solved;
        out["metrics"] = metrics_dict(run_metrics(t, res.solution));
        std::vector<int> curve;
        for (const auto& c : res.curve) curve.push_back(c.hotspots);
        out["hotspot_curve"] = curve;
        return out;
      },
      py::arg("model"), py::arg("method"), py::arg("config") = LearnerConfig{},
      py::arg("params") = RewardParams{});

  m.def(
      "run_metrics", [](const TrafficModel& t, const std::vector<Minutes>& d) { return metrics_dict(run_metrics(t, as_delays(d))); },
      py::arg("model"), py::arg("delays"));
}
