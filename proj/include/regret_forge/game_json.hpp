#pragma once

// Game description files.
//
//   {
//     "name": "my-game",                     (optional)
//     "nodes": [                              node 0 is the root
//       {"type": "decision", "player": 1, "infoset": "P1:",
//        "actions": [{"name": "l", "child": 1}, {"name": "r", "child": 2}]},
//       {"type": "chance", "actions": [{"name": "h", "child": 3}, ...],
//        "probs": [0.5, 0.5]},
//       {"type": "terminal", "payoff_p1": 1.5, "payoff_p2": -1.5}
//     ]
//   }
//
// "player" is 1 or 2. "child" is an index into "nodes". "payoff_p2" defaults
// to -payoff_p1. Structural problems are reported by validate_game.

#include <fstream>
#include <string>

#include <json.hpp>

#include "regret_forge/errors.hpp"
#include "regret_forge/game.hpp"

namespace regret_forge {

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(where + ": missing key '" + key + "'");
    return *it;
}

}  // namespace detail

inline Game game_from_json(const nlohmann::json& doc) {
    using nlohmann::json;
    if (!doc.is_object()) throw ConfigError("game description must be a JSON object");
    const auto& nodes = detail::require(doc, "nodes", "game");
    if (!nodes.is_array() || nodes.empty()) throw ConfigError("game: 'nodes' must be a non-empty array");

    GameBuilder b;
    std::vector<std::vector<NodeId>> pending(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        const std::string where = "nodes[" + std::to_string(i) + "]";
        if (!n.is_object()) throw ConfigError(where + ": expected object");
        const auto type = detail::require(n, "type", where).get<std::string>();
        try {
            if (type == "terminal") {
                const double u1 = detail::require(n, "payoff_p1", where).get<double>();
                const double u2 = n.contains("payoff_p2") ? n.at("payoff_p2").get<double>() : -u1;
                b.add_terminal(u1, u2);
                continue;
            }
            std::vector<std::string> names;
            for (const auto& a : detail::require(n, "actions", where)) {
                names.push_back(detail::require(a, "name", where).get<std::string>());
                pending[i].push_back(detail::require(a, "child", where).get<NodeId>());
            }
            if (type == "chance") {
                b.add_chance(std::move(names), detail::require(n, "probs", where).get<std::vector<double>>());
            } else if (type == "decision") {
                const int player = detail::require(n, "player", where).get<int>();
                if (player != 1 && player != 2) throw ConfigError(where + ": player must be 1 or 2");
                b.add_decision(player == 1 ? PlayerId::p1 : PlayerId::p2,
                               detail::require(n, "infoset", where).get<std::string>(), std::move(names));
            } else {
                throw ConfigError(where + ": unknown node type '" + type + "'");
            }
        } catch (const json::type_error& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
    for (std::size_t i = 0; i < pending.size(); ++i) {
        for (std::size_t a = 0; a < pending[i].size(); ++a) b.set_child(static_cast<NodeId>(i), a, pending[i][a]);
    }
    return std::move(b).build(doc.value("name", std::string("custom")));
}

inline Game load_game_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open game file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("game file '" + path + "': " + e.what());
    }
    return game_from_json(doc);
}

}  // namespace regret_forge
