#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "reprank/errors.hpp"

namespace reprank {

/// Seeded random source with a fully pinned value stream. mt19937_64 raw
/// output is specified by the standard; the derivations below replace the
/// std::* distributions, whose streams are implementation-defined, so the
/// same seed yields the same draws on every platform and toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + next_unit() * (hi - lo);
    }

    /// Uniform integer in [0, bound), unbiased via rejection.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0)
            throw DegenerateError("uniform draw from an empty range");
        const std::uint64_t threshold = (0 - bound) % bound; // 2^64 mod bound
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold)
                return r % bound;
        }
    }

    /// Normal via Box-Muller; consumes exactly two raw draws per call.
    double normal(double mean, double stddev) {
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; // (0, 1]
        const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;         // [0, 1)
        const double radius = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * radius * std::cos(2.0 * std::numbers::pi * u2);
    }

    bool coin() { return (next_u64() & 1u) != 0; }

private:
    std::mt19937_64 engine_;
};

namespace detail {

/// Fenwick tree over non-negative integer weights; supports point updates and
/// sampling an index proportionally to its weight in O(log n).
class FenwickTree {
public:
    explicit FenwickTree(std::size_t n) : tree_(n + 1, 0), n_(n) {}

    void add(std::size_t index, std::int64_t delta) {
        total_ += delta;
        for (std::size_t j = index + 1; j <= n_; j += j & (~j + 1))
            tree_[j] += delta;
    }

    std::int64_t total() const { return total_; }
    std::size_t size() const { return n_; }

    /// Smallest index whose inclusive prefix sum exceeds `target`;
    /// requires 0 <= target < total().
    std::size_t find_prefix(std::int64_t target) const {
        std::size_t pos = 0;
        for (std::size_t mask = std::bit_floor(n_); mask != 0; mask >>= 1) {
            const std::size_t next = pos + mask;
            if (next <= n_ && tree_[next] <= target) {
                pos = next;
                target -= tree_[next];
            }
        }
        return pos;
    }

    /// Draws an index with probability weight_i / total().
    std::size_t sample(Rng& rng) const {
        if (total_ <= 0)
            throw DegenerateError("sampling from a tree with zero total weight");
        return find_prefix(static_cast<std::int64_t>(
            rng.below(static_cast<std::uint64_t>(total_))));
    }

private:
    std::vector<std::int64_t> tree_;
    std::size_t n_ = 0;
    std::int64_t total_ = 0;
};

} // namespace detail
} // namespace reprank
