// Copyright 2026 The urllc-sim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace urllc {

namespace detail {

inline void check_marcum_args(double a, double b)
{
    if (!std::isfinite(a) || !std::isfinite(b) || a < 0 || b < 0)
        throw std::domain_error("marcum_q1: arguments must be finite and non-negative");
}

/// log of the Poisson(mu) pmf at j; mu > 0.
inline double log_poisson(double mu, double j) noexcept
{
    return -mu + j * std::log(mu) - std::lgamma(j + 1.0);
}

/// First index past the Poisson(mu) mode whose remaining mass is negligible.
/// For j > mu the pmf ratio p(j+1)/p(j) = mu/(j+1) < 1, so the tail beyond j
/// is at most p(j) / (1 - mu/(j+1)).
inline long poisson_truncation(double mu, double rel_eps) noexcept
{
    auto j = static_cast<long>(std::floor(mu)) + 1;
    double const log_eps = std::log(rel_eps);
    for (;; ++j)
    {
        double const ratio = mu / (j + 1.0);
        double const log_tail = log_poisson(mu, static_cast<double>(j)) - std::log1p(-ratio);
        if (log_tail < log_eps)
            return j;
    }
}

}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * First-order Marcum Q function Q_1(a, b).
 *
 * Uses the Poisson mixture form of the non-central chi-square (2 degrees of
 * freedom, non-centrality a^2) upper tail,
 *   Q_1(a, b) = sum_j Pois(j; a^2/2) * Pr[Pois(b^2/2) <= j],
 * which has only non-negative terms. The mixture is truncated once the
 * remaining Poisson mass is below 1e-20, bounding the absolute error.
 */
inline double marcum_q1(double a, double b)
{
    detail::check_marcum_args(a, b);
    if (b == 0.0)
        return 1.0;
    double const nu = 0.5 * b * b;
    if (a == 0.0)
        return std::exp(-nu);
    double const mu = 0.5 * a * a;
    long const last = detail::poisson_truncation(mu, 1e-20);

    double const log_nu = std::log(nu);
    double const log_mu = std::log(mu);
    double log_w = -mu;   // log Pois(j; mu)
    double log_t = -nu;   // log Pois(j; nu)
    double cdf = 0.0;     // Pr[Pois(nu) <= j]
    double sum = 0.0;
    for (long j = 0; j <= last; ++j)
    {
        if (j > 0)
        {
            log_w += log_mu - std::log(static_cast<double>(j));
            log_t += log_nu - std::log(static_cast<double>(j));
        }
        cdf += std::exp(log_t);
        sum += std::exp(log_w) * std::min(cdf, 1.0);
    }
    return std::min(sum, 1.0);
}

/*!
 * 1 - Q_1(a, b), evaluated directly so that small values keep full relative
 * precision:
 *   1 - Q_1(a, b) = sum_j Pois(j; a^2/2) * Pr[Pois(b^2/2) >= j + 1].
 * The inner upper tails are built by downward recursion from a directly
 * summed series at the truncation index, so every step adds a positive term.
 */
inline double marcum_q1_complement(double a, double b)
{
    detail::check_marcum_args(a, b);
    if (b == 0.0)
        return 0.0;
    double const nu = 0.5 * b * b;
    if (a == 0.0)
        return -std::expm1(-nu);
    double const mu = 0.5 * a * a;
    long const last = detail::poisson_truncation(mu, 1e-20);
    double const log_nu = std::log(nu);

    // upper = Pr[Pois(nu) >= last + 1]. Past the mode it is near 1 and the
    // short lower sum is accurate; the direct series would walk up to nu.
    double upper = 0.0;
    if (nu > static_cast<double>(last + 1))
    {
        double lower = 0.0;
        for (long m = 0; m <= last; ++m)
            lower += std::exp(detail::log_poisson(nu, static_cast<double>(m)));
        upper = 1.0 - lower;
    }
    else
    {
        auto m = static_cast<double>(last + 1);
        double log_term = detail::log_poisson(nu, m);
        while (true)
        {
            double const term = std::exp(log_term);
            upper += term;
            m += 1.0;
            double const ratio = nu / m;
            log_term += std::log(ratio);
            // Past the mode the remainder is bounded by term / (1 - ratio).
            if (ratio < 1.0 && std::exp(log_term) / (1.0 - ratio) <= 1e-18 * upper)
                break;
        }
    }

    double sum = 0.0;
    for (long j = last; j >= 0; --j)
    {
        // upper holds Pr[Pois(nu) >= j + 1]; extend it to j before the next step.
        sum += std::exp(detail::log_poisson(mu, static_cast<double>(j))) * std::min(upper, 1.0);
        upper += std::exp(-nu + (j) * log_nu - std::lgamma(j + 1.0));
    }
    return std::min(sum, 1.0);
}

}  // namespace urllc
