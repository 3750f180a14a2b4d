// Copyright 2026 The urllc-sim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "urllc/analytics/marcum.hpp"
#include "urllc/protocols/protocols.hpp"

namespace urllc {

/// Which LOS amplitude enters the Marcum Q form of the Rician power CDF.
enum class LosArgument
{
    /// Q_1(sqrt(2 kappa), .): exact CDF of the unit-power Rician draw.
    sqrt_two_kappa,
    /// Q_1(sqrt(kappa), .): equivalent to a Rician factor of kappa / 2.
    sqrt_kappa,
};

inline std::string_view to_string(LosArgument a) noexcept
{
    return a == LosArgument::sqrt_two_kappa ? "sqrt_two_kappa" : "sqrt_kappa";
}

inline LosArgument parse_los_argument(std::string_view s)
{
    if (s == "sqrt_two_kappa" || s == "standard")
        return LosArgument::sqrt_two_kappa;
    if (s == "sqrt_kappa")
        return LosArgument::sqrt_kappa;
    throw ConfigError("unknown LOS argument convention '" + std::string(s) + "'");
}

/// Network whose every link gain is an independent copy of one Rician
/// variable H with E|H|^2 = 1.
struct IidModel
{
    int num_cells = 1;
    int actuators_per_cell = 30;
    double rate_bps = 9.6e6;
    double bandwidth_hz = 30e6;
    double snr_linear = 10.0;
    double k_factor_linear = 0.0;
    LosArgument los_argument = LosArgument::sqrt_two_kappa;

    /// Spectral efficiency every link must support, C R / W in b/s/Hz. The
    /// same for all three benchmark protocols.
    double spectral_rate() const noexcept { return num_cells * rate_bps / bandwidth_hz; }

    /// Takes C, K, R, W and kappa from a scenario; the SNR is the scenario's
    /// transmit-to-noise ratio (unit mean gain).
    static IidModel from(ScenarioConfig const& cfg,
                         LosArgument arg = LosArgument::sqrt_two_kappa) noexcept
    {
        return {cfg.num_cells, cfg.actuators_per_cell, cfg.rate_bps(), cfg.bandwidth,
                cfg.snr_linear(), cfg.k_factor_linear(), arg};
    }
};

/// Outage probability of one link together with its complement, each
/// computed without cancellation.
struct LinkOutage
{
    double outage = 0.0;
    double success = 1.0;

    double log_outage() const noexcept { return std::log(outage); }
    double log_success() const noexcept { return std::log(success); }

    static LinkOutage from_outage(double p) noexcept { return {p, 1.0 - p}; }
};

/// Pr[(W/C) log2(1 + rho |H|^2) < R] for the Rician H of the model.
inline LinkOutage link_outage(IidModel const& m)
{
    if (!(m.snr_linear > 0) || !(m.bandwidth_hz > 0) || !(m.rate_bps >= 0) || m.k_factor_linear < 0)
        throw std::domain_error("link_outage: invalid model parameters");
    double const gamma = std::expm1(m.spectral_rate() * std::numbers::ln2) / m.snr_linear;
    if (!std::isfinite(gamma))
        return {1.0, 0.0};
    double const kappa = m.k_factor_linear;
    double const a = m.los_argument == LosArgument::sqrt_two_kappa ? std::sqrt(2.0 * kappa)
                                                                   : std::sqrt(kappa);
    double const b = std::sqrt(2.0 * (kappa + 1.0) * gamma);
    return {marcum_q1_complement(a, b), marcum_q1(a, b)};
}

/// Closed-form failure probability of one benchmark protocol.
struct AnalyticPoint
{
    Protocol protocol = Protocol::occupy_cow;
    double log_failure = 0.0;  ///< natural log; -inf for exactly zero
    bool is_bound = false;     ///< union bound rather than exact value
    IidModel inputs;
    double link_outage = 0.0;

    double failure_probability() const noexcept { return std::exp(log_failure); }
};

//---------------------------------------------------------------------------//
// Log-domain helpers. Conventions: 0^0 = 1, log 0 = -inf.

namespace detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// n * log_x with 0 * (-inf) = 0.
inline double xlogy(double n, double log_x) noexcept
{
    return n == 0.0 ? 0.0 : n * log_x;
}

inline double log_binomial(int n, int k) noexcept
{
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// log(1 - exp(log_x)) for log_x <= 0.
inline double log1m_exp(double log_x) noexcept
{
    if (log_x == kNegInf)
        return 0.0;
    if (log_x >= 0.0)
        return kNegInf;
    return log_x > -std::numbers::ln2 ? std::log(-std::expm1(log_x)) : std::log1p(-std::exp(log_x));
}

/// log(1 - (1 - x)^n) with x = exp(log_x) in [0, 1].
inline double log_one_minus_pow(int n, double log_x) noexcept
{
    if (n == 0 || log_x == kNegInf)
        return kNegInf;
    if (log_x >= 0.0)
        return 0.0;
    if (log_x < -500.0)
        return std::log(static_cast<double>(n)) + log_x;
    double const y = n * log1m_exp(log_x);
    return log1m_exp(y);
}

/// Streaming log-sum-exp.
class LogSum
{
  public:
    void add(double log_term) noexcept
    {
        if (log_term == kNegInf)
            return;
        if (log_term <= max_)
            sum_ += std::exp(log_term - max_);
        else
        {
            sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
            max_ = log_term;
        }
    }
    double value() const noexcept { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }

  private:
    double max_ = kNegInf;
    double sum_ = 0.0;
};

inline void check_shape(int c, int k)
{
    if (c < 1 || k < 1)
        throw std::domain_error("analytic model needs C >= 1 and K >= 1");
}

}  // namespace detail

//---------------------------------------------------------------------------//
// Failure probabilities from a given link outage

/// log of the per-cell failure probability 1 - P_S of Orth-Occupy CoWs:
/// sum_k Binom(K, k; 1 - P_l) (1 - (1 - P_l^k)^(K - k)).
inline double log_cell_failure_orth(int k_per_cell, LinkOutage const& pl)
{
    detail::check_shape(1, k_per_cell);
    double const lp = pl.log_outage();
    double const ls = pl.log_success();
    detail::LogSum sum;
    for (int k = 0; k <= k_per_cell; ++k)
    {
        int const rest = k_per_cell - k;
        sum.add(detail::log_binomial(k_per_cell, k) + detail::xlogy(k, ls) + detail::xlogy(rest, lp)
                + detail::log_one_minus_pow(rest, detail::xlogy(k, lp)));
    }
    return sum.value();
}

inline double log_pf_orth(int num_cells, int k_per_cell, LinkOutage const& pl)
{
    detail::check_shape(num_cells, k_per_cell);
    return detail::log_one_minus_pow(num_cells, log_cell_failure_orth(k_per_cell, pl));
}

/// log of the Occupy CoW union bound C (1 - P_S2), clamped at 1.
inline double log_pf_occupy_bound(int num_cells, int k_per_cell, LinkOutage const& pl)
{
    detail::check_shape(num_cells, k_per_cell);
    int const outside = num_cells * k_per_cell - k_per_cell;
    double const lp = pl.log_outage();
    double const ls = pl.log_success();
    std::vector<double> lb_out(outside + 1);
    for (int ko = 0; ko <= outside; ++ko)
        lb_out[ko] = detail::log_binomial(outside, ko);

    detail::LogSum sum;
    for (int ki = 0; ki <= k_per_cell; ++ki)
    {
        double const lb_in = detail::log_binomial(k_per_cell, ki);
        int const rest = k_per_cell - ki;
        if (rest == 0)
            continue;  // every in-cell actuator succeeded in phase 1
        for (int ko = 0; ko <= outside; ++ko)
        {
            int const relays = ki + ko;
            sum.add(lb_in + lb_out[ko] + detail::xlogy(relays, ls)
                    + detail::xlogy(num_cells * k_per_cell - relays, lp)
                    + detail::log_one_minus_pow(rest, detail::xlogy(relays, lp)));
        }
    }
    double const bound = std::log(static_cast<double>(num_cells)) + sum.value();
    return std::min(bound, 0.0);
}

/// log failure of CoMP-Occupy CoW: sum_k Binom(CK, k; 1 - P_l^C)
/// (1 - (1 - P_l^k)^(CK - k)).
inline double log_pf_comp(int num_cells, int k_per_cell, LinkOutage const& pl)
{
    detail::check_shape(num_cells, k_per_cell);
    int const n = num_cells * k_per_cell;
    double const lp = pl.log_outage();
    // Phase 1 fails only if all C controller links are in outage.
    double const lp1 = detail::xlogy(num_cells, lp);
    double const ls1 = detail::log1m_exp(lp1);
    detail::LogSum sum;
    for (int k = 0; k <= n; ++k)
    {
        int const rest = n - k;
        sum.add(detail::log_binomial(n, k) + detail::xlogy(k, ls1) + detail::xlogy(rest, lp1)
                + detail::log_one_minus_pow(rest, detail::xlogy(k, lp)));
    }
    return sum.value();
}

//---------------------------------------------------------------------------//
// Model-level entry points

inline AnalyticPoint pf_orth(IidModel const& m)
{
    auto const pl = link_outage(m);
    return {Protocol::orth_occupy_cows, log_pf_orth(m.num_cells, m.actuators_per_cell, pl), false,
            m, pl.outage};
}

inline AnalyticPoint pf_occupy_bound(IidModel const& m)
{
    auto const pl = link_outage(m);
    return {Protocol::occupy_cow, log_pf_occupy_bound(m.num_cells, m.actuators_per_cell, pl), true,
            m, pl.outage};
}

inline AnalyticPoint pf_comp(IidModel const& m)
{
    auto const pl = link_outage(m);
    return {Protocol::comp_occupy_cow, log_pf_comp(m.num_cells, m.actuators_per_cell, pl), false,
            m, pl.outage};
}

/// Thrown when asking for a closed form that does not exist.
class NoClosedForm : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

inline AnalyticPoint analytic_failure(Protocol p, IidModel const& m)
{
    switch (p)
    {
        case Protocol::orth_occupy_cows: return pf_orth(m);
        case Protocol::occupy_cow: return pf_occupy_bound(m);
        case Protocol::comp_occupy_cow: return pf_comp(m);
        default: break;
    }
    throw NoClosedForm("no closed-form failure probability for " + std::string(to_string(p))
                       + "; use Monte Carlo");
}

//---------------------------------------------------------------------------//
// Bandwidth-SNR tradeoff

struct BandwidthSolution
{
    bool reachable = false;
    double bandwidth_hz = 0.0;  ///< smallest bandwidth meeting the target
    double bracket_low_hz = 0.0;
    double bracket_high_hz = 0.0;
    int evaluations = 0;
};

struct BandwidthSearch
{
    double min_hz = 1e3;
    double max_hz = 1e10;
    double rel_tol = 1e-4;
};

/*!
 * Smallest W with analytic P_F(W) <= target at the model's SNR.
 *
 * The upper end grows by decades from `min_hz` until the target is met (or
 * `max_hz` is exceeded, which reports unreachable); geometric bisection then
 * narrows the bracket to `rel_tol`. P_F is expected to be non-increasing in
 * W; any violation observed between bracket ends throws.
 */
inline BandwidthSolution required_bandwidth(Protocol protocol, double target_pf, IidModel model,
                                            BandwidthSearch const& search = {})
{
    if (!(target_pf > 0.0 && target_pf < 1.0))
        throw std::invalid_argument("required_bandwidth: target must lie in (0, 1)");
    double const log_target = std::log(target_pf);
    BandwidthSolution out;
    auto log_pf_at = [&](double w) {
        model.bandwidth_hz = w;
        ++out.evaluations;
        return analytic_failure(protocol, model).log_failure;
    };

    double lo = search.min_hz;
    double log_lo = log_pf_at(lo);
    if (log_lo <= log_target)
    {
        out.reachable = true;
        out.bandwidth_hz = out.bracket_low_hz = out.bracket_high_hz = lo;
        return out;
    }
    double hi = lo;
    double log_hi = log_lo;
    while (log_hi > log_target)
    {
        if (hi >= search.max_hz)
        {
            out.bracket_low_hz = lo;
            out.bracket_high_hz = hi;
            return out;
        }
        lo = hi;
        log_lo = log_hi;
        hi = std::min(hi * 10.0, search.max_hz);
        log_hi = log_pf_at(hi);
        if (log_hi > log_lo + 1e-9)
            throw std::runtime_error("required_bandwidth: failure probability increased with W");
    }
    while (hi / lo - 1.0 > search.rel_tol)
    {
        double const mid = std::sqrt(lo * hi);
        double const log_mid = log_pf_at(mid);
        if (log_mid > log_lo + 1e-9 || log_mid < log_hi - 1e-9)
            throw std::runtime_error("required_bandwidth: failure probability not monotone in W");
        if (log_mid <= log_target)
        {
            hi = mid;
            log_hi = log_mid;
        }
        else
        {
            lo = mid;
            log_lo = log_mid;
        }
    }
    out.reachable = true;
    out.bandwidth_hz = hi;
    out.bracket_low_hz = lo;
    out.bracket_high_hz = hi;
    return out;
}

}  // namespace urllc
