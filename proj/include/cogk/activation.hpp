#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>

namespace cogk {

// Base-level activation over an access history. Timestamps are in simulated
// ms; the power-law decay runs on seconds, so each age is divided out before
// exponentiation. An empty history yields -inf (never retrievable).
inline double bla(std::span<const int64_t> accesses_ms, int64_t now_ms, double decay) {
    double sum = 0.0;
    for (int64_t t : accesses_ms) {
        double age_s = static_cast<double>(now_ms - t) / 1000.0;
        if (age_s <= 0.0) age_s = 0.001;  // same-tick access: clamp to 1 ms
        sum += std::pow(age_s, -decay);
    }
    if (sum <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(sum);
}

}  // namespace cogk
