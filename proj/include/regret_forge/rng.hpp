#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace regret_forge {

/// SplitMix64 finalizer. Used only to derive well-mixed engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of stream `stream` of a multi-run experiment with base seed `seed`.
/// Runs 0..n-1 of `--seed S --seeds n` use derive_seed(S, k).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// Portable sampler over std::mt19937_64, whose output sequence is fixed by
/// the C++ standard. Uniform doubles take the top 53 bits of one engine draw;
/// categorical samples return the first index whose running sum exceeds it.
class Rng {
  public:
    using engine_type = std::mt19937_64;

    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::size_t sample(std::span<const double> probs) {
        const double u = uniform();
        double cum = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t a = 0; a < probs.size(); ++a) {
            if (probs[a] <= 0.0) continue;
            cum += probs[a];
            last_positive = a;
            if (u < cum) return a;
        }
        return last_positive;
    }

    engine_type& engine() { return engine_; }
    bool operator==(const Rng&) const = default;

  private:
    engine_type engine_;
};

}  // namespace regret_forge
