#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "kdual/core/error.hpp"

namespace kdual {

/// Potentials and costs live on the dyadic grid 2^-40 with magnitude below 2^12,
/// so every difference c - f computed in double is exact.
inline constexpr double kDyadicQuantum = 0x1p-40;
inline constexpr double kDyadicRange = 0x1p12;

inline double snap_dyadic(double value) {
    require(std::isfinite(value) && std::abs(value) < kDyadicRange, ErrorCode::ValueOutOfRange,
            "value " + std::to_string(value) + " outside the dyadic working range");
    return std::nearbyint(value / kDyadicQuantum) * kDyadicQuantum;
}

/// Pairwise summation; deterministic reduction order independent of thread count.
inline double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

inline double weighted_sum(std::span<const double> weights, std::span<const double> values) {
    std::vector<double> terms(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) terms[i] = weights[i] * values[i];
    return pairwise_sum(terms);
}

/// Thread count from KDUAL_THREADS (default 1).
inline unsigned thread_count() {
    if (const char* env = std::getenv("KDUAL_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return 1;
}

/// Runs body(begin, end) over disjoint chunks of [0, n).
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                         std::size_t min_chunk = 4096) {
    unsigned threads = std::min<std::size_t>(thread_count(), std::max<std::size_t>(1, n / min_chunk));
    if (threads <= 1) {
        body(0, n);
        return;
    }
    std::vector<std::jthread> pool;
    std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        std::size_t begin = t * chunk;
        std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&body, begin, end] { body(begin, end); });
    }
}

}  // namespace kdual
