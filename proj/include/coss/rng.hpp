#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <utility>
#include <vector>

namespace coss {

/// SplitMix64 generator (Steele, Lea & Flood). We deliberately avoid the
/// std:: distribution adaptors: the standard engines are bit-portable but the
/// distributions are not, and every seeded result in this project must be
/// reproducible across platforms and thread counts. All value transforms are
/// pinned here instead.
///
/// Substreams follow the usual SplitMix discipline: child stream k of a seed
/// is initialised with the (k+1)-th raw output of a SplitMix64 run from that
/// seed (see derive()). Replications, resamples and tie-breaks each get their
/// own child stream, so concurrent evaluation cannot change any result.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    static constexpr std::uint64_t scramble(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Seed of child stream `k` of `seed`.
    static constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t k) {
        return scramble(seed + (k + 1) * kGolden);
    }

    std::uint64_t next_u64() { return scramble(state_ += kGolden); }

    /// Uniform double in [0, 1), 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (cosine branch). Consumes exactly two
    /// words per call so stream positions stay predictable.
    double next_normal() {
        const double u1 = 1.0 - next_unit();  // (0, 1]: keeps log() finite
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }

    double next_normal(double mean, double sd) { return mean + sd * next_normal(); }

    /// Uniform integer in [0, bound), unbiased (bitmask rejection).
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t mask = ~std::uint64_t{0} >> std::countl_zero(bound - 1);
        for (;;) {
            const std::uint64_t r = next_u64() & mask;
            if (r < bound) return r;
        }
    }

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::swap(values[i - 1], values[static_cast<std::size_t>(next_below(i))]);
        }
    }

private:
    static constexpr double kTwoPi = 6.283185307179586476925286766559;
    std::uint64_t state_;
};

/// First `k` positions of a seeded permutation of {0, ..., population-1}:
/// uniform sampling without replacement.
inline std::vector<std::size_t> sample_indices(std::size_t population, std::size_t k, Rng& rng) {
    std::vector<std::size_t> idx(population);
    for (std::size_t i = 0; i < population; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k && i + 1 < population; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(population - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
}

}  // namespace coss
