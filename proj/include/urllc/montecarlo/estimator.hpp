// Copyright 2026 The urllc-sim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace urllc {

inline constexpr double kZ95 = 1.959963984540054;

struct ConfidenceInterval
{
    double low = 0.0;
    double high = 1.0;
};

/// Wilson score interval for a binomial proportion.
inline ConfidenceInterval wilson_interval(std::uint64_t failures, std::uint64_t trials,
                                          double z = kZ95) noexcept
{
    if (trials == 0)
        return {0.0, 1.0};
    double const n = static_cast<double>(trials);
    double const p = static_cast<double>(failures) / n;
    double const z2 = z * z;
    double const denom = 1.0 + z2 / n;
    double const centre = (p + z2 / (2.0 * n)) / denom;
    double const half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    // Clamp so that low <= p <= high survives rounding at the boundaries.
    return {std::clamp(centre - half, 0.0, p), std::clamp(centre + half, p, 1.0)};
}

/// Standard error of a binomial proportion estimate.
inline double binomial_standard_error(double p, std::uint64_t trials) noexcept
{
    return trials ? std::sqrt(p * (1.0 - p) / static_cast<double>(trials)) : 1.0;
}

}  // namespace urllc
