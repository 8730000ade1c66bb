#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "regret_forge/errors.hpp"

namespace regret_forge {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Per-iteration multipliers on accumulated regrets and average-strategy
/// contributions. alpha = +inf keeps positive regrets, beta = -inf zeroes
/// negative ones, beta = +inf keeps them.
struct DiscountSchedule {
    double alpha = kInf;
    double beta = kInf;
    double gamma = 0.0;

    static constexpr DiscountSchedule none() { return {kInf, kInf, 0.0}; }

    void validate() const {
        if (std::isnan(alpha) || std::isnan(beta) || std::isnan(gamma)) {
            throw ConfigError("discount schedule: parameters must not be NaN");
        }
        if (alpha < 0.0) throw ConfigError("discount schedule: alpha must be >= 0");
        if (beta > alpha) {
            throw ConfigError("discount schedule: beta (" + std::to_string(beta) + ") must not exceed alpha (" +
                              std::to_string(alpha) + ")");
        }
        if (!(gamma >= 0.0) || std::isinf(gamma)) throw ConfigError("discount schedule: gamma must be finite and >= 0");
    }

    bool operator==(const DiscountSchedule&) const = default;
};

struct DiscountMultipliers {
    double positive = 1.0;
    double negative = 1.0;
    double average = 1.0;
};

namespace detail {

// t^e / (t^e + 1), written as 1 / (1 + t^-e) to stay finite for large exponents.
inline double power_ratio(double t, double e) {
    if (e == kInf) return 1.0;
    if (e == -kInf) return 0.0;
    return 1.0 / (1.0 + std::pow(t, -e));
}

}  // namespace detail

inline DiscountMultipliers discount_multipliers(long long t, const DiscountSchedule& s) {
    if (t < 1) throw ContractViolation("discount_multipliers: iteration must be >= 1");
    const auto td = static_cast<double>(t);
    return {detail::power_ratio(td, s.alpha), detail::power_ratio(td, s.beta),
            s.gamma == 0.0 ? 1.0 : std::pow(td / (td + 1.0), s.gamma)};
}

// ---------------------------------------------------------------------------
// Regret matching

/// Probabilities proportional to positive regret; uniform when none is positive.
inline void rm_strategy(std::span<const double> regrets, std::span<double> out) {
    if (regrets.empty()) throw ContractViolation("rm_strategy: empty regret vector");
    double total = 0.0;
    for (double r : regrets) total += r > 0.0 ? r : 0.0;
    if (total > 0.0) {
        for (std::size_t a = 0; a < regrets.size(); ++a) out[a] = regrets[a] > 0.0 ? regrets[a] / total : 0.0;
    } else {
        const double u = 1.0 / static_cast<double>(regrets.size());
        std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(regrets.size()), u);
    }
}

inline std::vector<double> rm_strategy(std::span<const double> regrets) {
    std::vector<double> out(regrets.size());
    rm_strategy(regrets, out);
    return out;
}

/// Q <- max(0, Q + r), in place.
inline void rm_plus_accumulate(std::span<double> q, std::span<const double> r_inst) {
    for (std::size_t a = 0; a < q.size(); ++a) q[a] = std::max(0.0, q[a] + r_inst[a]);
}

inline std::vector<double> rm_plus_update(std::span<const double> q_prev, std::span<const double> r_inst) {
    if (q_prev.size() != r_inst.size()) throw ContractViolation("rm_plus_update: size mismatch");
    std::vector<double> q(q_prev.begin(), q_prev.end());
    rm_plus_accumulate(q, r_inst);
    return q;
}

/// Cumulative regret with the latest instantaneous regret counted twice.
inline std::vector<double> optimistic_regret(std::span<const double> cumulative, std::span<const double> last) {
    if (last.empty() || last.size() != cumulative.size()) {
        throw ContractViolation("optimistic_regret: last instantaneous regret missing");
    }
    std::vector<double> out(cumulative.size());
    for (std::size_t a = 0; a < out.size(); ++a) out[a] = cumulative[a] + last[a];
    return out;
}

// ---------------------------------------------------------------------------
// NormalHedge

struct NormalHedgeSolution {
    /// c_t > 0 solving (1/N) sum_a exp(R+(a)^2 / (2 c)) = e; 0 in the uniform fallback.
    double scale = 0.0;
    int iterations = 0;
};

inline constexpr int kNormalHedgeMaxIterations = 200;
inline constexpr double kNormalHedgeTolerance = 1e-12;

/// Weights proportional to (R+/c) exp(R+^2 / 2c). Uniform when no regret is
/// positive. The scale is found by bisection on s = c / max(R+)^2, whose root
/// is bracketed by [1 / (2 (1 + ln N)), 1/2] for every input.
inline NormalHedgeSolution nh_strategy(std::span<const double> regrets, std::span<double> out) {
    const std::size_t n = regrets.size();
    if (n == 0) throw ContractViolation("nh_strategy: empty regret vector");
    double top = 0.0;
    for (double r : regrets) {
        if (!std::isfinite(r)) throw NumericError("nh_strategy: non-finite regret");
        top = std::max(top, r);
    }
    if (top <= 0.0) {
        std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n), 1.0 / static_cast<double>(n));
        return {};
    }

    const double target = std::numbers::e;
    const double inv_n = 1.0 / static_cast<double>(n);
    auto lhs = [&](double s) {
        double sum = 0.0;
        for (double r : regrets) {
            const double x = r > 0.0 ? r / top : 0.0;
            sum += std::exp(x * x / (2.0 * s));
        }
        return sum * inv_n;
    };

    double lo = 1.0 / (2.0 * (1.0 + std::log(static_cast<double>(n))));
    double hi = 0.5;
    double s = hi;
    double residual = std::abs(lhs(hi) - target);
    if (std::abs(lhs(lo) - target) <= residual) {
        s = lo;
        residual = std::abs(lhs(lo) - target);
    }
    int it = 0;
    while (residual > kNormalHedgeTolerance * target) {
        if (++it > kNormalHedgeMaxIterations) {
            throw NumericError("nh_strategy: bisection did not converge after " +
                               std::to_string(kNormalHedgeMaxIterations) + " iterations (residual " +
                               std::to_string(residual) + ", bracket [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "])");
        }
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            // bracket exhausted at machine precision
            if (residual > 1e-10 * target) {
                throw NumericError("nh_strategy: bracket collapsed with residual " + std::to_string(residual));
            }
            break;
        }
        const double f = lhs(mid);
        if (std::abs(f - target) < residual) {
            s = mid;
            residual = std::abs(f - target);
        }
        (f > target ? lo : hi) = mid;
    }

    double total = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        const double x = regrets[a] > 0.0 ? regrets[a] / top : 0.0;
        out[a] = x * std::exp(x * x / (2.0 * s));
        total += out[a];
    }
    for (std::size_t a = 0; a < n; ++a) out[a] /= total;
    return {s * top * top, it};
}

inline std::vector<double> nh_strategy(std::span<const double> regrets) {
    std::vector<double> out(regrets.size());
    nh_strategy(regrets, out);
    return out;
}

}  // namespace regret_forge
