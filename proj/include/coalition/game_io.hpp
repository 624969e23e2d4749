#pragma once

// JSON loader for characteristic-function game files:
//   {"players": ["A","B","C"], "worth": {"": 0, "A": 100, "A,B": 400, ...}}
// Coalition keys are player names comma-joined in player-list order; all 2^n
// coalitions must be present, the empty coalition under the key "".

#include <cstdint>
#include <fstream>
#include <istream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "coalition/error.hpp"
#include "coalition/game.hpp"

namespace coalition {

// Canonical key for a coalition: member names joined by ',' in list order.
inline std::string coalition_key(const std::vector<std::string>& players, CoalitionMask mask) {
  std::string key;
  for (std::size_t i = 0; i < players.size(); ++i) {
    if (!(mask >> i & 1)) continue;
    if (!key.empty()) key += ',';
    key += players[i];
  }
  return key;
}

inline CoalitionGame load_game(std::istream& in, const std::string& origin = "<stream>") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    raise(errc::parse, origin + ": " + e.what());
  }

  if (!doc.is_object()) raise(errc::schema_mismatch, origin + ": top level must be an object");
  for (const auto& item : doc.items()) {
    if (item.key() != "players" && item.key() != "worth") {
      raise(errc::schema_mismatch, origin + ": unknown top-level key \"" + item.key() + "\"");
    }
  }
  if (!doc.contains("players") || !doc["players"].is_array()) {
    raise(errc::schema_mismatch, origin + ": missing \"players\" array");
  }
  if (!doc.contains("worth") || !doc["worth"].is_object()) {
    raise(errc::schema_mismatch, origin + ": missing \"worth\" object");
  }

  std::vector<std::string> players;
  std::unordered_set<std::string> seen;
  for (const auto& entry : doc["players"]) {
    if (!entry.is_string()) raise(errc::schema_mismatch, origin + ": player names must be strings");
    std::string name = entry.get<std::string>();
    if (name.empty()) raise(errc::validation, origin + ": player names must be non-empty");
    if (name.find(',') != std::string::npos) {
      raise(errc::validation, origin + ": player name \"" + name +
                                  "\" contains ',' which the coalition-key grammar reserves");
    }
    if (!seen.insert(name).second) {
      raise(errc::validation, origin + ": duplicate player name \"" + name + "\"");
    }
    players.push_back(std::move(name));
  }
  if (players.empty()) raise(errc::validation, origin + ": game needs at least one player");
  if (players.size() > static_cast<std::size_t>(CoalitionGame::kMaxPlayers)) {
    raise(errc::size_limit, origin + ": dense games support at most " +
                                std::to_string(CoalitionGame::kMaxPlayers) + " players");
  }

  const auto& worth = doc["worth"];
  std::unordered_map<std::string, CoalitionMask> key_to_mask;
  const CoalitionMask table_size = CoalitionMask{1} << players.size();
  for (CoalitionMask mask = 0; mask < table_size; ++mask) {
    key_to_mask.emplace(coalition_key(players, mask), mask);
  }
  for (const auto& item : worth.items()) {
    if (key_to_mask.find(item.key()) == key_to_mask.end()) {
      raise(errc::validation, origin + ": unknown coalition key \"" + item.key() + "\"");
    }
    if (!item.value().is_number()) {
      raise(errc::schema_mismatch,
            origin + ": worth of \"" + item.key() + "\" must be a number");
    }
  }

  std::vector<double> table(table_size);
  std::vector<std::string> missing;
  for (CoalitionMask mask = 0; mask < table_size; ++mask) {
    const std::string key = coalition_key(players, mask);
    const auto it = worth.find(key);
    if (it == worth.end()) {
      missing.push_back('"' + key + '"');
      continue;
    }
    table[mask] = it->get<double>();
  }
  if (!missing.empty()) {
    constexpr std::size_t kListed = 8;
    std::string listed;
    for (std::size_t i = 0; i < missing.size() && i < kListed; ++i) {
      if (i > 0) listed += ", ";
      listed += missing[i];
    }
    if (missing.size() > kListed) {
      listed += " and " + std::to_string(missing.size() - kListed) + " more";
    }
    raise(errc::validation, origin + ": worth table is missing " +
                                std::to_string(missing.size()) + " coalition(s): " + listed);
  }

  return CoalitionGame(std::move(players), std::move(table));
}

inline CoalitionGame load_game_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(errc::io, "cannot open game file '" + path + "'");
  return load_game(in, path);
}

}  // namespace coalition
