#include "dcb/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include "dcb/error.hpp"

namespace dcb {

using nlohmann::json;

namespace {

template <typename T>
T field(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorKind::Validation, where + ": missing key \"" + key + "\"");
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Validation, where + ": bad value for \"" + key + "\": " + e.what());
  }
}

template <typename T>
T field_or(const json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? field<T>(j, key, where) : fallback;
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Validation, "scenario document must be a JSON object");
  Scenario s;
  s.horizon = field<Minutes>(j, "horizon_min", "scenario");
  s.period_duration = field_or<Minutes>(j, "period_duration_min", 60, "scenario");
  s.period_step = field_or<Minutes>(j, "period_step_min", 30, "scenario");

  for (const auto& js : field<json>(j, "sectors", "scenario")) {
    s.sectors.push_back({field<std::string>(js, "id", "sector"), field<int>(js, "capacity", "sector")});
  }
  if (j.contains("timeline")) {
    for (const auto& jt : j.at("timeline")) {
      ConfigurationInterval ci;
      ci.start = field<Minutes>(jt, "start", "timeline");
      ci.end = field<Minutes>(jt, "end", "timeline");
      ci.mapping = field<std::map<std::string, std::string>>(jt, "mapping", "timeline");
      s.timeline.push_back(std::move(ci));
    }
  }
  if (s.timeline.empty()) s.timeline.push_back(identity_interval(s.sectors, s.horizon));

  for (const auto& jf : field<json>(j, "flights", "scenario")) {
    FlightPlan f;
    f.id = field<std::string>(jf, "id", "flight");
    const std::string where = "flight " + f.id;
    f.max_delay = field<Minutes>(jf, "max_delay", where);
    f.aircraft_class = field_or<std::string>(jf, "aircraft_class", "medium", where);
    f.regulatable = field_or<bool>(jf, "regulatable", true, where);
    for (const auto& jc : field<json>(jf, "crossings", where)) {
      f.crossings.push_back({field<std::string>(jc, "sector", where),
                             field<Minutes>(jc, "entry", where), field<Minutes>(jc, "exit", where)});
    }
    s.flights.push_back(std::move(f));
  }
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["horizon_min"] = s.horizon;
  j["period_duration_min"] = s.period_duration;
  j["period_step_min"] = s.period_step;
  j["sectors"] = json::array();
  for (const auto& sec : s.sectors) j["sectors"].push_back({{"id", sec.id}, {"capacity", sec.capacity}});
  j["timeline"] = json::array();
  for (const auto& ci : s.timeline)
    j["timeline"].push_back({{"start", ci.start}, {"end", ci.end}, {"mapping", ci.mapping}});
  j["flights"] = json::array();
  for (const auto& f : s.flights) {
    json jf{{"id", f.id},
            {"max_delay", f.max_delay},
            {"aircraft_class", f.aircraft_class},
            {"regulatable", f.regulatable},
            {"crossings", json::array()}};
    for (const auto& c : f.crossings)
      jf["crossings"].push_back({{"sector", c.sector}, {"entry", c.entry}, {"exit", c.exit}});
    j["flights"].push_back(std::move(jf));
  }
  return j;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open scenario file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Validation, path.string() + ": malformed JSON: " + e.what());
  }
  return scenario_from_json(j);
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write scenario file " + path.string());
  out << scenario_to_json(s).dump(2) << '\n';
}

void write_solution_csv(std::ostream& os, const Scenario& s, const DelayAssignment& d) {
  os << "flight_id,delay_min\n";
  for (std::size_t i = 0; i < s.flights.size(); ++i) os << s.flights[i].id << ',' << d[i] << '\n';
}

DelayAssignment read_solution_csv(std::istream& is, const Scenario& s) {
  // Flights absent from the file keep a zero delay.
  DelayAssignment d(s.flights.size());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (lineno == 1 && line.rfind("flight_id", 0) == 0)) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw Error(ErrorKind::Validation, "solution line " + std::to_string(lineno) + ": expected flight_id,delay_min");
    const auto id = line.substr(0, comma);
    auto idx = s.flight_index(id);
    if (!idx) throw Error(ErrorKind::Validation, "solution references unknown flight " + id);
    try {
      d[*idx] = std::stoi(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw Error(ErrorKind::Validation, "solution line " + std::to_string(lineno) + ": bad delay");
    }
  }
  return d;
}

DelayAssignment load_solution(const std::filesystem::path& path, const Scenario& s) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open solution file " + path.string());
  return read_solution_csv(in, s);
}

void save_solution(const std::filesystem::path& path, const Scenario& s, const DelayAssignment& d) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write solution file " + path.string());
  write_solution_csv(out, s, d);
}

}  // namespace dcb
