#pragma once

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "regret_forge/errors.hpp"
#include "regret_forge/evaluator.hpp"

namespace regret_forge::bench {

inline constexpr std::string_view kCsvHeader =
    "run_id,game,algorithm,iteration,nodes_touched,elapsed_ms,br_vs_p1,br_vs_p2,exploit_avg";

struct CsvRow {
    std::string run_id;
    std::string game;
    std::string algorithm;
    ConvergenceRecord record;
};

/// Shortest round-trip decimal form, so reruns produce byte-identical files.
inline std::string format_real(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), end);
}

inline std::string format_row(const CsvRow& row) {
    const auto& r = row.record;
    std::array<char, 32> ms{};
    std::snprintf(ms.data(), ms.size(), "%.3f", r.elapsed_ms);
    std::string line;
    line += row.run_id + ',' + row.game + ',' + row.algorithm + ',';
    line += std::to_string(r.iteration) + ',' + std::to_string(r.nodes_touched) + ',' + ms.data() + ',';
    line += format_real(r.br_vs_p1) + ',' + format_real(r.br_vs_p2) + ',' + format_real(r.exploit_avg);
    return line;
}

inline void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
    out << kCsvHeader << '\n';
    for (const auto& row : rows) out << format_row(row) << '\n';
}

inline void write_csv_file(const std::string& path, const std::vector<CsvRow>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    write_csv(out, rows);
    if (!out) throw ConfigError("write to '" + path + "' failed");
}

/// Chips, or milli-big-blinds when a big blind is given.
inline ConvergenceRecord scale_record(ConvergenceRecord r, std::optional<double> big_blind) {
    if (!big_blind) return r;
    r.br_vs_p1 = to_mbb(r.br_vs_p1, *big_blind);
    r.br_vs_p2 = to_mbb(r.br_vs_p2, *big_blind);
    r.exploit_avg = to_mbb(r.exploit_avg, *big_blind);
    return r;
}

}  // namespace regret_forge::bench
