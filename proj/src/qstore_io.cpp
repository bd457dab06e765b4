#include "dcb/qstore_io.hpp"

#include <fstream>

#include "dcb/error.hpp"

namespace dcb {

using nlohmann::json;

json qstore_to_json(const QStore& q, const Scenario& s) {
  json j;
  j["format"] = "dcb-marl-qstore";
  j["version"] = kQStoreVersion;
  j["method"] = to_string(q.method);
  j["hotspot_cap"] = q.method == Method::IRL && !q.agents.empty() ? q.agents.front().hotspot_cap()
                                                                  : q.edges.hotspot_cap();
  j["flights"] = json::array();
  for (const auto& f : s.flights) j["flights"].push_back(f.id);

  if (q.method == Method::IRL) {
    j["agents"] = json::array();
    for (std::size_t i = 0; i < q.agents.size(); ++i) {
      const auto& t = q.agents[i];
      json entries = json::array();
      for (Minutes d = 0; d <= t.max_delay(); ++d)
        for (int c = 0; c <= t.hotspot_cap(); ++c)
          for (Action a : kActions) {
            const double v = t.value({d, c}, a);
            if (v != 0.0) entries.push_back({d, c, static_cast<int>(a), v});
          }
      if (!entries.empty()) j["agents"].push_back({{"flight", s.flights[i].id}, {"entries", entries}});
    }
  } else {
    j["edges"] = json::array();
    json* current = nullptr;
    int ci = -1, cj = -1;
    for (const auto& e : q.edges.entries()) {
      if (e.i != ci || e.j != cj) {
        j["edges"].push_back({{"i", s.flights[static_cast<std::size_t>(e.i)].id},
                              {"j", s.flights[static_cast<std::size_t>(e.j)].id},
                              {"entries", json::array()}});
        current = &j["edges"].back()["entries"];
        ci = e.i;
        cj = e.j;
      }
      for (Action ai : kActions)
        for (Action aj : kActions) {
          const double v = e.values[static_cast<std::size_t>(ai) * 2 + static_cast<std::size_t>(aj)];
          if (v != 0.0)
            current->push_back({e.si.delay, e.si.hotspot_count, e.sj.delay, e.sj.hotspot_count,
                                static_cast<int>(ai), static_cast<int>(aj), v});
        }
    }
  }
  return j;
}

QStore qstore_from_json(const json& j, const Scenario& s) {
  try {
    if (j.value("format", "") != "dcb-marl-qstore")
      throw Error(ErrorKind::Validation, "not a Q-store snapshot");
    if (j.at("version").get<int>() != kQStoreVersion)
      throw Error(ErrorKind::Validation, "unsupported Q-store version " + j.at("version").dump());
    const auto flights = j.at("flights").get<std::vector<std::string>>();
    if (flights.size() != s.flights.size())
      throw Error(ErrorKind::Validation, "Q-store flight list does not match the scenario");
    for (std::size_t i = 0; i < flights.size(); ++i)
      if (flights[i] != s.flights[i].id)
        throw Error(ErrorKind::Validation, "Q-store flight list does not match the scenario");

    const Method m = method_from_string(j.at("method").get<std::string>());
    const int cap = j.at("hotspot_cap").get<int>();
    QStore q = QStore::empty_for(m, s, cap);
    auto flight = [&](const json& id) {
      auto idx = s.flight_index(id.get<std::string>());
      if (!idx) throw Error(ErrorKind::Validation, "Q-store references unknown flight " + id.dump());
      return *idx;
    };
    auto action = [](const json& a) { return a.get<int>() ? Action::Increment : Action::Hold; };
    if (m == Method::IRL) {
      for (const auto& ja : j.at("agents")) {
        auto& t = q.agents[flight(ja.at("flight"))];
        for (const auto& e : ja.at("entries"))
          t.at({e.at(0).get<Minutes>(), e.at(1).get<int>()}, action(e.at(2))) = e.at(3).get<double>();
      }
    } else {
      for (const auto& je : j.at("edges")) {
        const int i = static_cast<int>(flight(je.at("i")));
        const int k = static_cast<int>(flight(je.at("j")));
        for (const auto& e : je.at("entries"))
          q.edges.set(i, k, {e.at(0).get<Minutes>(), e.at(1).get<int>()},
                      {e.at(2).get<Minutes>(), e.at(3).get<int>()}, action(e.at(4)), action(e.at(5)),
                      e.at(6).get<double>());
      }
    }
    return q;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Validation, std::string("malformed Q-store: ") + e.what());
  }
}

void save_qstore(const QStore& q, const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write Q-store " + path.string());
  out << qstore_to_json(q, s).dump() << '\n';
}

QStore load_qstore(const std::filesystem::path& path, const Scenario& s) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open Q-store " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Validation, path.string() + ": malformed JSON: " + e.what());
  }
  return qstore_from_json(j, s);
}

}  // namespace dcb
