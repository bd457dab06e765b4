#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "dcb/scenario.hpp"

namespace dcb {

// Scenario file layout (integer minutes throughout):
//
//   {
//     "sectors":  [{"id": "S1", "capacity": 2}, ...],
//     "timeline": [{"start": 0, "end": 120, "mapping": {"e1": "S1"}}, ...],
//     "flights":  [{"id": "f1", "max_delay": 10, "aircraft_class": "medium",
//                   "regulatable": true,
//                   "crossings": [{"sector": "e1", "entry": 10, "exit": 20}]}, ...],
//     "horizon_min": 120, "period_duration_min": 60, "period_step_min": 30
//   }
//
// An absent or empty "timeline" means the identity configuration over the
// whole horizon. Parsing does not validate; call validate_scenario.

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

/// Solution CSV: header `flight_id,delay_min`, one row per flight in scenario order.
void write_solution_csv(std::ostream& os, const Scenario& s, const DelayAssignment& d);
DelayAssignment read_solution_csv(std::istream& is, const Scenario& s);
DelayAssignment load_solution(const std::filesystem::path& path, const Scenario& s);
void save_solution(const std::filesystem::path& path, const Scenario& s, const DelayAssignment& d);

}  // namespace dcb
