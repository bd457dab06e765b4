#pragma once

#include <filesystem>

#include <json.hpp>

#include "dcb/learners.hpp"

namespace dcb {

// Q-store snapshot, format "dcb-marl-qstore" version 1:
//
//   {"format": "dcb-marl-qstore", "version": 1, "method": "irl" | "edmarl",
//    "hotspot_cap": 10, "flights": ["F1", ...],
//    "agents": [{"flight": "F1", "entries": [[delay, count, action, value], ...]}],   // irl
//    "edges":  [{"i": "F1", "j": "F2",
//                "entries": [[delay_i, count_i, delay_j, count_j, a_i, a_j, value], ...]}]}  // edmarl
//
// Only non-zero values are written; actions are 0 = HOLD, 1 = INCREMENT.
// Values are written with round-trip precision.
inline constexpr int kQStoreVersion = 1;

nlohmann::json qstore_to_json(const QStore& q, const Scenario& s);
QStore qstore_from_json(const nlohmann::json& j, const Scenario& s);

void save_qstore(const QStore& q, const Scenario& s, const std::filesystem::path& path);
QStore load_qstore(const std::filesystem::path& path, const Scenario& s);

}  // namespace dcb
