#include "fls/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fls {

double Rng::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(theta);
    has_spare_ = true;
    return radius * std::cos(theta);
}

std::size_t Rng::below(std::size_t n) noexcept {
    // Lemire's multiply-shift; bias is below 2^-64 * n and irrelevant here
    return static_cast<std::size_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
}

WeightedSampler::WeightedSampler(std::span<const double> weights) {
    cumulative_.reserve(weights.size());
    double running = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("WeightedSampler: weights must be finite and non-negative");
        running += w;
        cumulative_.push_back(running);
    }
    if (!(running > 0.0))
        throw std::invalid_argument("WeightedSampler: total weight is zero (zero matrix rows/columns)");
}

std::size_t WeightedSampler::index_for(double u) const noexcept {
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) {
        // u rounded up to total; fall back to the last index carrying mass
        it = std::prev(cumulative_.end());
        while (it != cumulative_.begin() && *it == *std::prev(it)) --it;
    }
    return static_cast<std::size_t>(it - cumulative_.begin());
}

} // namespace fls
