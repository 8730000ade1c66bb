#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "regret_forge/cfr.hpp"
#include "regret_forge/errors.hpp"
#include "regret_forge/game.hpp"
#include "regret_forge/game_json.hpp"
#include "regret_forge/games.hpp"
#include "regret_forge/mccfr.hpp"

namespace regret_forge::bench {

inline constexpr std::int64_t kDefaultIterations = 8192;

/// One solve run as requested on the command line or in a config file.
/// Discount parameters left unset by the user are filled from the preset.
struct RunConfig {
    std::string game = "kuhn";
    std::string alg = "dcfr";
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> gamma;
    std::optional<std::string> minimizer;
    bool optimistic = false;
    std::int64_t iters = kDefaultIterations;
    EvalSchedule eval;
    std::uint64_t seed = 0;
    int seeds = 1;
    std::int64_t period_nodes = 100'000;
    std::int64_t max_nodes = 10'000'000;
    UpdateMode updates = UpdateMode::alternating;
    std::string out;
    std::optional<double> big_blind;
    bool track_pure_switch = false;
};

/// A sweep: the RunConfig fields plus the algorithms to compare.
struct SweepConfig {
    RunConfig base;
    std::vector<std::string> algs;
    std::string out_dir = ".";
};

enum class EngineKind { cfr, mccfr };

struct EngineConfig {
    EngineKind kind = EngineKind::cfr;
    SolveConfig cfr;
    MccfrConfig mccfr;
};

inline bool is_mccfr(std::string_view alg) { return parse_mccfr_variant(alg).has_value(); }

inline bool is_known_alg(std::string_view alg) {
    return is_mccfr(alg) || std::find(kCfrPresets.begin(), kCfrPresets.end(), alg) != kCfrPresets.end();
}

inline std::string known_algs() {
    std::string out;
    for (auto a : kCfrPresets) out += std::string(out.empty() ? "" : ", ") + std::string(a);
    for (auto a : kMccfrPresets) out += ", " + std::string(a);
    return out;
}

inline constexpr std::string_view kGameNames = "kuhn, leduc, goofspiel5, matrix:<path>, bandit:<payoffs>, json:<path>";

inline void check_game_name(const std::string& name) {
    if (name == "kuhn" || name == "leduc" || name == "goofspiel5") return;
    for (std::string_view prefix : {"matrix:", "bandit:", "json:"}) {
        if (name.starts_with(prefix) && name.size() > prefix.size()) return;
    }
    throw ConfigError("unknown game '" + name + "' (valid: " + std::string(kGameNames) + ")");
}

inline Game make_game(const std::string& name) {
    check_game_name(name);
    if (name == "kuhn") return build_kuhn();
    if (name == "leduc") return build_leduc();
    if (name == "goofspiel5") return build_goofspiel5();
    if (name.starts_with("matrix:")) return build_matrix_game(read_matrix_file(name.substr(7)));
    if (name.starts_with("bandit:")) return build_bandit(parse_bandit_payoffs(name.substr(7)));
    return load_game_file(name.substr(5));
}

/// Accepts a number or "inf" / "+inf" / "-inf".
inline double parse_extended_real(const std::string& text, const std::string& key) {
    if (text == "inf" || text == "+inf" || text == "infinity") return kInf;
    if (text == "-inf" || text == "-infinity") return -kInf;
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size() && !std::isnan(v)) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("key '" + key + "': expected a number or \"inf\"/\"-inf\", got \"" + text + "\"");
}

inline EvalSchedule parse_eval_every(const std::string& text) {
    if (text == "pow2") return {};
    try {
        std::size_t used = 0;
        const long long n = std::stoll(text, &used);
        if (used == text.size() && n >= 1) return {EvalSchedule::Kind::every, n};
    } catch (const std::exception&) {
    }
    throw ConfigError("key 'eval_every': expected \"pow2\" or a positive integer, got \"" + text + "\"");
}

inline UpdateMode parse_updates(const std::string& text) {
    if (text == "alternating") return UpdateMode::alternating;
    if (text == "simultaneous") return UpdateMode::simultaneous;
    throw ConfigError("key 'updates': expected \"alternating\" or \"simultaneous\", got \"" + text + "\"");
}

/// Fills preset defaults and checks every cross-field rule.
inline void finalize(RunConfig& c) {
    check_game_name(c.game);
    if (!is_known_alg(c.alg)) throw ConfigError("unknown algorithm '" + c.alg + "' (valid: " + known_algs() + ")");
    if (c.iters < 1) throw ConfigError("key 'iters': must be >= 1");
    if (c.seeds < 1) throw ConfigError("key 'seeds': must be >= 1");
    if (c.period_nodes < 1) throw ConfigError("key 'period_nodes': must be >= 1");
    if (c.max_nodes < 1) throw ConfigError("key 'max_nodes': must be >= 1");
    if (c.big_blind && !(*c.big_blind > 0.0)) throw ConfigError("key 'big_blind': must be positive");

    if (is_mccfr(c.alg)) {
        if (c.alpha || c.beta || c.gamma || c.minimizer || c.optimistic) {
            throw ConfigError("algorithm '" + c.alg +
                              "' runs plain regret matching; alpha/beta/gamma/minimizer/optimistic do not apply");
        }
        if (c.track_pure_switch) throw ConfigError("pure-switch tracking is only available for full-traversal algorithms");
        return;
    }
    const SolveConfig preset = preset_config(c.alg);
    if (!c.alpha) c.alpha = preset.schedule.alpha;
    if (!c.beta) c.beta = preset.schedule.beta;
    if (!c.gamma) c.gamma = preset.schedule.gamma;
    if (*c.beta > *c.alpha) {
        auto show = [](double v) {
            std::ostringstream os;
            os << v;
            return os.str();
        };
        throw ConfigError("beta (" + show(*c.beta) + ") must not exceed alpha (" + show(*c.alpha) + ")");
    }
    DiscountSchedule{*c.alpha, *c.beta, *c.gamma}.validate();
    if (c.minimizer) {
        static const std::set<std::string> kMinimizers = {"rm", "rm+", "nh", "optimistic-rm"};
        if (!kMinimizers.count(*c.minimizer)) {
            throw ConfigError("key 'minimizer': expected one of rm, rm+, nh, optimistic-rm, got \"" + *c.minimizer + "\"");
        }
    }
    const bool wants_optimism = c.optimistic || (c.minimizer && *c.minimizer == "optimistic-rm");
    if (wants_optimism && c.alg != "lcfr" && c.alg != "dcfr" && c.alg != "optimistic-lcfr" &&
        c.alg != "optimistic-dcfr") {
        throw ConfigError("optimistic regret matching is only offered with lcfr and dcfr");
    }
}

inline EngineConfig resolve(RunConfig c) {
    finalize(c);
    EngineConfig e;
    if (auto v = parse_mccfr_variant(c.alg)) {
        e.kind = EngineKind::mccfr;
        e.mccfr.variant = *v;
        e.mccfr.seed = c.seed;
        e.mccfr.period_nodes = c.period_nodes;
        e.mccfr.max_nodes = c.max_nodes;
        e.mccfr.eval = c.eval;
        return e;
    }
    e.kind = EngineKind::cfr;
    e.cfr = preset_config(c.alg);
    e.cfr.schedule = {*c.alpha, *c.beta, *c.gamma};
    if (c.minimizer) {
        const auto& m = *c.minimizer;
        e.cfr.minimizer = m == "rm+" ? Minimizer::rm_plus : (m == "nh" ? Minimizer::normal_hedge : Minimizer::rm);
        if (m == "optimistic-rm") e.cfr.optimistic = true;
    }
    if (c.optimistic) e.cfr.optimistic = true;
    e.cfr.iterations = c.iters;
    e.cfr.eval = c.eval;
    e.cfr.updates = c.updates;
    e.cfr.track_pure_switch = c.track_pure_switch;
    e.cfr.validate();
    return e;
}

// ---------------------------------------------------------------------------
// JSON config files

namespace detail {

inline std::string json_type(const nlohmann::json& v) {
    if (v.is_string()) return "string \"" + v.get<std::string>() + "\"";
    return std::string(v.type_name()) + " " + v.dump();
}

inline ConfigError type_error(const std::string& key, const std::string& expected, const nlohmann::json& got) {
    return ConfigError("key '" + key + "': expected " + expected + ", got " + json_type(got));
}

inline std::int64_t get_int(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number_integer()) throw type_error(key, "integer", v);
    return v.get<std::int64_t>();
}

inline double get_number(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw type_error(key, "number", v);
    return v.get<double>();
}

inline double get_extended_real(const nlohmann::json& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_extended_real(v.get<std::string>(), key);
    throw type_error(key, "number or \"inf\"/\"-inf\"", v);
}

inline std::string get_string(const nlohmann::json& v, const std::string& key) {
    if (!v.is_string()) throw type_error(key, "string", v);
    return v.get<std::string>();
}

inline bool get_bool(const nlohmann::json& v, const std::string& key) {
    if (!v.is_boolean()) throw type_error(key, "boolean", v);
    return v.get<bool>();
}

inline nlohmann::json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file '" + path + "': malformed JSON: " + e.what());
    }
}

// Applies the RunConfig keys of `doc`; returns false for keys it does not own.
inline bool apply_run_key(RunConfig& c, const std::string& key, const nlohmann::json& v) {
    if (key == "game") c.game = get_string(v, key);
    else if (key == "alg") c.alg = get_string(v, key);
    else if (key == "alpha") c.alpha = get_extended_real(v, key);
    else if (key == "beta") c.beta = get_extended_real(v, key);
    else if (key == "gamma") c.gamma = get_number(v, key);
    else if (key == "minimizer") c.minimizer = get_string(v, key);
    else if (key == "optimistic") c.optimistic = get_bool(v, key);
    else if (key == "iters") c.iters = get_int(v, key);
    else if (key == "eval_every") c.eval = v.is_number_integer() ? parse_eval_every(std::to_string(v.get<std::int64_t>()))
                                                                 : parse_eval_every(get_string(v, key));
    else if (key == "seed") {
        if (!v.is_number_unsigned()) throw type_error(key, "nonnegative integer", v);
        c.seed = v.get<std::uint64_t>();
    }
    else if (key == "seeds") c.seeds = static_cast<int>(get_int(v, key));
    else if (key == "period_nodes") c.period_nodes = get_int(v, key);
    else if (key == "max_nodes") c.max_nodes = get_int(v, key);
    else if (key == "updates") c.updates = parse_updates(get_string(v, key));
    else if (key == "out") c.out = get_string(v, key);
    else if (key == "big_blind") c.big_blind = get_number(v, key);
    else if (key == "track_pure_switch") c.track_pure_switch = get_bool(v, key);
    else return false;
    return true;
}

}  // namespace detail

/// Applies the keys of `doc` over `base` without cross-field validation, so
/// command-line flags can still override them.
inline RunConfig apply_run_config(const nlohmann::json& doc, RunConfig base = {}) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (!detail::apply_run_key(base, key, value)) throw ConfigError("unknown key '" + key + "'");
    }
    return base;
}

inline RunConfig parse_run_config(const nlohmann::json& doc, RunConfig base = {}) {
    base = apply_run_config(doc, std::move(base));
    finalize(base);
    return base;
}

/// Parses and fully validates a single-run config file.
inline RunConfig load_config(const std::string& path) { return parse_run_config(detail::parse_file(path)); }

inline RunConfig load_config_unchecked(const std::string& path) { return apply_run_config(detail::parse_file(path)); }

inline SweepConfig parse_sweep_config(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    SweepConfig sweep;
    for (const auto& [key, value] : doc.items()) {
        if (key == "algs") {
            if (!value.is_array()) throw detail::type_error(key, "array of strings", value);
            for (const auto& a : value) sweep.algs.push_back(detail::get_string(a, "algs[]"));
        } else if (key == "out_dir") {
            sweep.out_dir = detail::get_string(value, key);
        } else if (key == "alg") {
            throw ConfigError("key 'alg': sweeps take a list under 'algs'");
        } else if (!detail::apply_run_key(sweep.base, key, value)) {
            throw ConfigError("unknown key '" + key + "'");
        }
    }
    return sweep;
}

inline SweepConfig load_sweep_config(const std::string& path) { return parse_sweep_config(detail::parse_file(path)); }

}  // namespace regret_forge::bench
