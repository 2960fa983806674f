#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fls {

//!
//! SplitMix64 stream (Steele, Lea & Flood constants). One stream per trial;
//! trial t of a batch seeded with `base` uses seed base + t.
//!
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : seed_(seed), state_(seed) {}

    static Rng for_trial(std::uint64_t base_seed, std::uint64_t trial) noexcept {
        return Rng(base_seed + trial);
    }

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    //! uniform on [0, 1) with 53 random bits
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    //! standard normal (Box-Muller, spare value cached)
    double normal() noexcept;

    //! uniform integer in [0, n)
    std::size_t below(std::size_t n) noexcept;

private:
    std::uint64_t seed_;
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

//!
//! Draws index i with probability weight_i / total using a cumulative-sum
//! table and binary search. Zero-weight indices are never returned.
//!
class WeightedSampler {
public:
    WeightedSampler() = default;
    //! throws std::invalid_argument on negative/non-finite weights or zero total
    explicit WeightedSampler(std::span<const double> weights);

    //! first (0-based) index whose cumulative weight strictly exceeds u, u in [0, total)
    std::size_t index_for(double u) const noexcept;
    std::size_t sample(Rng& rng) const noexcept { return index_for(rng.uniform() * total()); }

    double total() const noexcept { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
    std::size_t size() const noexcept { return cumulative_.size(); }
    std::span<const double> cumulative() const noexcept { return cumulative_; }

private:
    std::vector<double> cumulative_;
};

} // namespace fls
