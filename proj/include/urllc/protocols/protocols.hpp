// Copyright 2026 The urllc-sim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "urllc/core/channel.hpp"
#include "urllc/core/config.hpp"

namespace urllc {

enum class Protocol
{
    orth_occupy_cows,
    occupy_cow,
    comp_occupy_cow,
    ic_ic,
    ic_ia,
};

inline constexpr Protocol kAllProtocols[] = {Protocol::orth_occupy_cows, Protocol::occupy_cow,
                                             Protocol::comp_occupy_cow, Protocol::ic_ic,
                                             Protocol::ic_ia};

inline std::string_view to_string(Protocol p) noexcept
{
    switch (p)
    {
        case Protocol::orth_occupy_cows: return "orth_occupy_cows";
        case Protocol::occupy_cow: return "occupy_cow";
        case Protocol::comp_occupy_cow: return "comp_occupy_cow";
        case Protocol::ic_ic: return "ic_ic";
        case Protocol::ic_ia: return "ic_ia";
    }
    return "?";
}

/// Accepts the canonical names plus the short forms orth, occupy, comp.
inline Protocol parse_protocol(std::string_view s)
{
    if (s == "orth_occupy_cows" || s == "orth")
        return Protocol::orth_occupy_cows;
    if (s == "occupy_cow" || s == "occupy")
        return Protocol::occupy_cow;
    if (s == "comp_occupy_cow" || s == "comp")
        return Protocol::comp_occupy_cow;
    if (s == "ic_ic")
        return Protocol::ic_ic;
    if (s == "ic_ia")
        return Protocol::ic_ia;
    throw ConfigError("unknown protocol '" + std::string(s) + "'");
}

/// How a receiver combines copies of one message from several transmitters.
/// power_sum adds received powers; selection succeeds iff one copy alone
/// would, which is the diversity model of the closed-form analysis.
enum class Combining
{
    power_sum,
    selection,
};

inline std::string_view to_string(Combining c) noexcept
{
    return c == Combining::selection ? "selection" : "power_sum";
}

inline Combining parse_combining(std::string_view s)
{
    if (s == "power_sum")
        return Combining::power_sum;
    if (s == "selection")
        return Combining::selection;
    throw ConfigError("unknown combining rule '" + std::string(s) + "'");
}

inline bool uses_interference_cancellation(Protocol p) noexcept
{
    return p == Protocol::ic_ic || p == Protocol::ic_ia;
}

//---------------------------------------------------------------------------//
// Parameters and outcomes

struct ProtocolParams
{
    double rate_bps = 0.0;      ///< aggregate per-cell rate R
    double bandwidth_hz = 0.0;  ///< total bandwidth W
    int num_cells = 1;
    double snr_linear = 1.0;  ///< transmit-to-noise PSD ratio
    Protocol protocol = Protocol::occupy_cow;
    /// Occupy CoW with full reuse, inter-cell interference treated as noise.
    bool treat_interference_as_noise = false;
    Combining combining = Combining::power_sum;
    bool collect_trace = false;

    static ProtocolParams from(ScenarioConfig const& cfg, Protocol p)
    {
        ProtocolParams out;
        out.rate_bps = cfg.rate_bps();
        out.bandwidth_hz = cfg.bandwidth;
        out.num_cells = cfg.num_cells;
        out.snr_linear = cfg.snr_linear();
        out.protocol = p;
        return out;
    }
};

inline void validate(ProtocolParams const& p)
{
    if (!(p.rate_bps > 0) || !(p.bandwidth_hz > 0) || p.num_cells < 1 || !(p.snr_linear >= 0))
        throw ConfigError("invalid protocol parameters");
    if (p.treat_interference_as_noise && p.protocol != Protocol::occupy_cow)
        throw ConfigError("treating interference as noise is defined for occupy_cow only, not "
                          + std::string(to_string(p.protocol)));
    if (p.combining == Combining::selection
        && (uses_interference_cancellation(p.protocol) || p.treat_interference_as_noise))
        throw ConfigError("selection combining is defined for orth, occupy and comp only");
    if (uses_interference_cancellation(p.protocol) && p.num_cells > 64)
        throw ConfigError("interference cancellation protocols support at most 64 cells");
}

/// Per-actuator decoding record (collected on request).
struct ActuatorTrace
{
    std::vector<int> phase1_order;  ///< controllers decoded in phase 1, in order
    std::vector<double> phase1_rate;  ///< achievable rate at each phase-1 decode
    std::vector<int> phase2_order;
    int phase1_iterations = 0;
    int phase2_iterations = 0;
    /// Own-message terms at the last evaluation, noise power normalised to 1.
    /// NaN when the actuator never evaluated its own message (IC-IC phase-1
    /// successes).
    double signal = std::numeric_limits<double>::quiet_NaN();
    double interference = std::numeric_limits<double>::quiet_NaN();
};

struct ProtocolOutcome
{
    std::vector<std::uint8_t> decoded_after_phase1;
    std::vector<std::uint8_t> decoded_final;
    bool network_failure = false;
    /// Foreign controller messages decoded and cancelled (IC protocols).
    std::vector<int> canceled_interferers;
    std::vector<ActuatorTrace> trace;

    int num_failed() const noexcept
    {
        int n = 0;
        for (auto d : decoded_final)
            n += d ? 0 : 1;
        return n;
    }
};

/// Sets of undecoded controllers and phase-1 relay sets for the SIC protocols.
struct DecodeState
{
    /// Bit i set iff controller i is still undecoded at actuator a.
    std::vector<std::uint64_t> undecoded_controllers;
    /// Actuators that decoded controller c in phase 1 (in-cell only for
    /// IC-IC, network-wide for IC-IA).
    std::vector<std::vector<int>> phase1_success_sets;
};

namespace detail {

/// Minimum SINR for rate `rate` over `band` Hz: 2^(rate/band) - 1.
inline double sinr_threshold(double rate, double band) noexcept
{
    return std::exp2(rate / band) - 1.0;
}

inline double rate_of(double sinr, double band) noexcept
{
    return band * std::log2(1.0 + sinr);
}

struct Network
{
    int cells;
    int per_cell;
    int actuators;
};

inline Network shape_of(ProtocolParams const& p, ChannelRealization const& ch)
{
    if (ch.num_cells() != p.num_cells)
        throw std::invalid_argument("protocol: channel realization has "
                                    + std::to_string(ch.num_cells()) + " cells, params "
                                    + std::to_string(p.num_cells));
    return {ch.num_cells(), ch.actuators_per_cell(), ch.num_actuators()};
}

inline ProtocolOutcome make_outcome(Network const& net, bool trace)
{
    ProtocolOutcome out;
    out.decoded_after_phase1.assign(net.actuators, 0);
    out.decoded_final.assign(net.actuators, 0);
    out.canceled_interferers.assign(net.actuators, 0);
    if (trace)
        out.trace.resize(net.actuators);
    return out;
}

inline void finish(ProtocolOutcome& out)
{
    out.network_failure = false;
    for (std::size_t a = 0; a < out.decoded_final.size(); ++a)
    {
        assert(!out.decoded_after_phase1[a] || out.decoded_final[a]);
        if (!out.decoded_final[a])
            out.network_failure = true;
    }
}

inline double combine(Combining c, double acc, double term) noexcept
{
    return c == Combining::selection ? std::max(acc, term) : acc + term;
}

/// Combined rho |h|^2 from `relays` to actuator a.
inline double relay_power(ChannelRealization const& ch, double rho, int a,
                          std::vector<int> const& relays,
                          Combining combining = Combining::power_sum)
{
    double acc = 0.0;
    for (int r : relays)
        acc = combine(combining, acc, ch.h_power(a, r));
    return rho * acc;
}

/// Second phase of the orthogonal-band protocols: every actuator still
/// missing its own message listens on its cell's band to its controller plus
/// the relays of that band.
inline void orthogonal_relay_phase(ProtocolParams const& p, ChannelRealization const& ch,
                                   Network const& net,
                                   std::vector<std::vector<int>> const& relays_per_cell,
                                   double threshold, ProtocolOutcome& out)
{
    double const rho = p.snr_linear;
    for (int a = 0; a < net.actuators; ++a)
    {
        int const c = a / net.per_cell;
        if (out.decoded_after_phase1[a])
        {
            out.decoded_final[a] = 1;
            continue;
        }
        double const signal = combine(p.combining, rho * ch.g_power(a, c),
                                      relay_power(ch, rho, a, relays_per_cell[c], p.combining));
        out.decoded_final[a] = signal >= threshold;
        if (!out.trace.empty())
        {
            out.trace[a].signal = signal;
            out.trace[a].interference = 0.0;
        }
    }
}

}  // namespace detail

//---------------------------------------------------------------------------//
// Benchmark protocols

/// Per-cell Occupy CoW on W/C bands, relaying inside the cell only.
inline ProtocolOutcome run_orth_occupy_cows(ProtocolParams const& p, ChannelRealization const& ch)
{
    auto const net = detail::shape_of(p, ch);
    auto out = detail::make_outcome(net, p.collect_trace);
    double const band = p.bandwidth_hz / net.cells;
    double const threshold = detail::sinr_threshold(p.rate_bps, band);
    double const rho = p.snr_linear;

    std::vector<std::vector<int>> relays(net.cells);
    for (int a = 0; a < net.actuators; ++a)
    {
        int const c = a / net.per_cell;
        double const snr = rho * ch.g_power(a, c);
        if (snr >= threshold)
        {
            out.decoded_after_phase1[a] = 1;
            relays[c].push_back(a);
        }
        if (!out.trace.empty())
            out.trace[a].signal = snr;
    }
    detail::orthogonal_relay_phase(p, ch, net, relays, threshold, out);
    detail::finish(out);
    return out;
}

/// Occupy CoW with inter-cell cooperation: every actuator listens on every
/// band in phase 1 and relays all messages it decoded.
inline ProtocolOutcome run_occupy_cow(ProtocolParams const& p, ChannelRealization const& ch)
{
    auto const net = detail::shape_of(p, ch);
    auto out = detail::make_outcome(net, p.collect_trace);
    double const band = p.bandwidth_hz / net.cells;
    double const threshold = detail::sinr_threshold(p.rate_bps, band);
    double const rho = p.snr_linear;

    std::vector<std::vector<int>> relays(net.cells);
    for (int a = 0; a < net.actuators; ++a)
    {
        for (int i = 0; i < net.cells; ++i)
        {
            if (rho * ch.g_power(a, i) >= threshold)
                relays[i].push_back(a);
        }
        int const c = a / net.per_cell;
        out.decoded_after_phase1[a] = rho * ch.g_power(a, c) >= threshold;
        if (!out.trace.empty())
            out.trace[a].signal = rho * ch.g_power(a, c);
    }
    detail::orthogonal_relay_phase(p, ch, net, relays, threshold, out);
    detail::finish(out);
    return out;
}

/// CoMP Occupy CoW: all controllers send the concatenated C*K*b-bit message
/// over the full band as one distributed transmitter.
inline ProtocolOutcome run_comp_occupy_cow(ProtocolParams const& p, ChannelRealization const& ch)
{
    auto const net = detail::shape_of(p, ch);
    auto out = detail::make_outcome(net, p.collect_trace);
    double const threshold = detail::sinr_threshold(net.cells * p.rate_bps, p.bandwidth_hz);
    double const rho = p.snr_linear;

    std::vector<double> direct(net.actuators, 0.0);
    std::vector<int> relays;
    for (int a = 0; a < net.actuators; ++a)
    {
        double acc = 0.0;
        for (int i = 0; i < net.cells; ++i)
            acc = detail::combine(p.combining, acc, ch.g_power(a, i));
        direct[a] = rho * acc;
        if (direct[a] >= threshold)
        {
            out.decoded_after_phase1[a] = 1;
            relays.push_back(a);
        }
    }
    for (int a = 0; a < net.actuators; ++a)
    {
        double signal = direct[a];
        if (out.decoded_after_phase1[a])
            out.decoded_final[a] = 1;
        else
        {
            signal = detail::combine(p.combining, signal,
                                     detail::relay_power(ch, rho, a, relays, p.combining));
            out.decoded_final[a] = signal >= threshold;
        }
        if (!out.trace.empty())
            out.trace[a].signal = signal;
    }
    detail::finish(out);
    return out;
}

/// Occupy CoW in every cell over the full band W (frequency reuse), with the
/// other cells' controllers and relays treated as noise in both phases.
inline ProtocolOutcome run_occupy_cow_interference_as_noise(ProtocolParams const& p,
                                                            ChannelRealization const& ch)
{
    auto const net = detail::shape_of(p, ch);
    auto out = detail::make_outcome(net, p.collect_trace);
    double const threshold = detail::sinr_threshold(p.rate_bps, p.bandwidth_hz);
    double const rho = p.snr_linear;

    std::vector<double> own(net.actuators), foreign(net.actuators);
    std::vector<std::vector<int>> relays(net.cells);
    for (int a = 0; a < net.actuators; ++a)
    {
        int const c = a / net.per_cell;
        double interference = 0.0;
        for (int i = 0; i < net.cells; ++i)
            if (i != c)
                interference += ch.g_power(a, i);
        own[a] = rho * ch.g_power(a, c);
        foreign[a] = rho * interference;
        if (own[a] >= threshold * (foreign[a] + 1.0))
        {
            out.decoded_after_phase1[a] = 1;
            relays[c].push_back(a);
        }
    }
    for (int a = 0; a < net.actuators; ++a)
    {
        int const c = a / net.per_cell;
        double signal = own[a];
        double interference = foreign[a];
        if (out.decoded_after_phase1[a])
            out.decoded_final[a] = 1;
        else
        {
            for (int i = 0; i < net.cells; ++i)
            {
                double const r = detail::relay_power(ch, rho, a, relays[i]);
                (i == c ? signal : interference) += r;
            }
            out.decoded_final[a] = signal >= threshold * (interference + 1.0);
        }
        if (!out.trace.empty())
        {
            out.trace[a].signal = signal;
            out.trace[a].interference = interference;
        }
    }
    detail::finish(out);
    return out;
}

//---------------------------------------------------------------------------//
// Successive interference cancellation

namespace detail {

/*!
 * Phase-1 successive decoding at every actuator over the full band.
 *
 * Each actuator repeatedly picks the undecoded controller with the highest
 * SINR (lowest index on ties), decodes and cancels it while its rate reaches
 * R, and stops at the first failure. Decoding does not stop at the own
 * message.
 */
inline DecodeState sic_phase1(ProtocolParams const& p, ChannelRealization const& ch,
                              Network const& net, ProtocolOutcome& out)
{
    double const rho = p.snr_linear;
    double const threshold = sinr_threshold(p.rate_bps, p.bandwidth_hz);
    std::uint64_t const all = net.cells == 64 ? ~0ull : (1ull << net.cells) - 1;

    DecodeState st;
    st.undecoded_controllers.assign(net.actuators, all);
    st.phase1_success_sets.assign(net.cells, {});

    std::vector<double> power(net.cells);
    for (int a = 0; a < net.actuators; ++a)
    {
        for (int i = 0; i < net.cells; ++i)
            power[i] = rho * ch.g_power(a, i);
        std::uint64_t remaining = all;
        int iterations = 0;
        while (remaining)
        {
            ++iterations;
            double total = 0.0;
            int best = -1;
            for (auto m = remaining; m; m &= m - 1)
            {
                int const i = std::countr_zero(m);
                total += power[i];
                if (best < 0 || power[i] > power[best])
                    best = i;
            }
            double const sinr = power[best] / (total - power[best] + 1.0);
            if (sinr < threshold)
                break;
            remaining &= ~(1ull << best);
            if (!out.trace.empty())
            {
                out.trace[a].phase1_order.push_back(best);
                out.trace[a].phase1_rate.push_back(rate_of(sinr, p.bandwidth_hz));
            }
        }
        assert(iterations <= net.cells);
        st.undecoded_controllers[a] = remaining;
        if (!out.trace.empty())
            out.trace[a].phase1_iterations = iterations;
    }
    return st;
}

inline bool has_decoded(DecodeState const& st, int a, int c) noexcept
{
    return !(st.undecoded_controllers[a] >> c & 1u);
}

inline void count_canceled(DecodeState const& st, Network const& net, ProtocolOutcome& out)
{
    for (int a = 0; a < net.actuators; ++a)
    {
        int const c = a / net.per_cell;
        std::uint64_t const all = net.cells == 64 ? ~0ull : (1ull << net.cells) - 1;
        std::uint64_t const decoded = all & ~st.undecoded_controllers[a];
        out.canceled_interferers[a] = std::popcount(decoded & ~(1ull << c));
    }
}

}  // namespace detail

/// Phase-1 decode state of the SIC protocols (exposed for inspection).
/// Relay sets are the in-cell sets used by IC-IC.
inline DecodeState ic_phase1_state(ProtocolParams const& p, ChannelRealization const& ch)
{
    auto const net = detail::shape_of(p, ch);
    auto scratch = detail::make_outcome(net, false);
    auto st = detail::sic_phase1(p, ch, net, scratch);
    for (int a = 0; a < net.actuators; ++a)
    {
        int const c = a / net.per_cell;
        if (detail::has_decoded(st, a, c))
            st.phase1_success_sets[c].push_back(a);
    }
    return st;
}

/*!
 * IC-IC: full reuse with successive interference cancellation in both phases.
 *
 * Phase-1 successes relay their own cell's message on the full band and do
 * not listen in phase 2. Every other actuator keeps its phase-1 undecoded
 * set and, per candidate message, sees the controller plus that message's
 * relays as signal and all other undecoded controllers and relays as
 * interference.
 */
inline ProtocolOutcome run_ic_ic(ProtocolParams const& p, ChannelRealization const& ch)
{
    validate(p);
    auto const net = detail::shape_of(p, ch);
    auto out = detail::make_outcome(net, p.collect_trace);
    double const rho = p.snr_linear;
    double const threshold = detail::sinr_threshold(p.rate_bps, p.bandwidth_hz);

    auto st = detail::sic_phase1(p, ch, net, out);
    auto& relays = st.phase1_success_sets;
    for (int a = 0; a < net.actuators; ++a)
    {
        int const c = a / net.per_cell;
        if (detail::has_decoded(st, a, c))
        {
            out.decoded_after_phase1[a] = 1;
            out.decoded_final[a] = 1;
            relays[c].push_back(a);
        }
    }

    std::vector<double> message_power(net.cells);
    for (int a = 0; a < net.actuators; ++a)
    {
        if (out.decoded_final[a])
            continue;
        int const c = a / net.per_cell;
        std::uint64_t remaining = st.undecoded_controllers[a];
        for (auto m = remaining; m; m &= m - 1)
        {
            int const i = std::countr_zero(m);
            message_power[i] = rho * ch.g_power(a, i) + detail::relay_power(ch, rho, a, relays[i]);
        }
        int iterations = 0;
        double last_signal = 0.0;
        double last_interference = 0.0;
        while (remaining)
        {
            ++iterations;
            double total = 0.0;
            int best = -1;
            for (auto m = remaining; m; m &= m - 1)
            {
                int const i = std::countr_zero(m);
                total += message_power[i];
                if (best < 0 || message_power[i] > message_power[best])
                    best = i;
            }
            last_signal = message_power[c];
            last_interference = total - message_power[c];
            double const sinr = message_power[best] / (total - message_power[best] + 1.0);
            if (sinr < threshold)
                break;
            remaining &= ~(1ull << best);
            if (!out.trace.empty())
                out.trace[a].phase2_order.push_back(best);
            if (best == c)
            {
                out.decoded_final[a] = 1;
                break;
            }
        }
        assert(iterations <= net.cells);
        st.undecoded_controllers[a] = remaining;
        if (!out.trace.empty())
        {
            out.trace[a].phase2_iterations = iterations;
            out.trace[a].signal = last_signal;
            out.trace[a].interference = last_interference;
        }
    }
    detail::count_canceled(st, net, out);
    detail::finish(out);
    return out;
}

/// IC-IA: IC-IC's phase 1, then Occupy CoW's orthogonal cooperation phase
/// where every actuator relays each message it decoded on that message's band.
inline ProtocolOutcome run_ic_ia(ProtocolParams const& p, ChannelRealization const& ch)
{
    validate(p);
    auto const net = detail::shape_of(p, ch);
    auto out = detail::make_outcome(net, p.collect_trace);

    auto st = detail::sic_phase1(p, ch, net, out);
    auto& relays = st.phase1_success_sets;
    for (int a = 0; a < net.actuators; ++a)
    {
        for (int i = 0; i < net.cells; ++i)
            if (detail::has_decoded(st, a, i))
                relays[i].push_back(a);
        out.decoded_after_phase1[a] = detail::has_decoded(st, a, a / net.per_cell);
    }
    double const band = p.bandwidth_hz / net.cells;
    double const threshold = detail::sinr_threshold(p.rate_bps, band);
    detail::orthogonal_relay_phase(p, ch, net, relays, threshold, out);
    detail::count_canceled(st, net, out);
    detail::finish(out);
    return out;
}

/// Dispatches on params.protocol (and the interference-as-noise switch).
inline ProtocolOutcome run_protocol(ProtocolParams const& p, ChannelRealization const& ch)
{
    validate(p);
    if (p.treat_interference_as_noise)
        return run_occupy_cow_interference_as_noise(p, ch);
    switch (p.protocol)
    {
        case Protocol::orth_occupy_cows: return run_orth_occupy_cows(p, ch);
        case Protocol::occupy_cow: return run_occupy_cow(p, ch);
        case Protocol::comp_occupy_cow: return run_comp_occupy_cow(p, ch);
        case Protocol::ic_ic: return run_ic_ic(p, ch);
        case Protocol::ic_ia: return run_ic_ia(p, ch);
    }
    throw std::logic_error("run_protocol: unhandled protocol");
}

//---------------------------------------------------------------------------//
// Trace export: one JSON object per actuator per line.

inline void write_trace_jsonl(std::ostream& os, ProtocolOutcome const& out, int actuators_per_cell)
{
    if (out.trace.empty())
        throw std::invalid_argument("write_trace_jsonl: outcome has no trace (collect_trace off)");
    for (std::size_t a = 0; a < out.trace.size(); ++a)
    {
        auto const& t = out.trace[a];
        nlohmann::json j{
            {"actuator", a},
            {"cell", static_cast<int>(a) / actuators_per_cell},
            {"index", static_cast<int>(a) % actuators_per_cell},
            {"phase1_decode_order", t.phase1_order},
            {"phase1_decode_rate_bps", t.phase1_rate},
            {"phase2_decode_order", t.phase2_order},
            {"canceled_interferers", out.canceled_interferers[a]},
            {"decoded_after_phase1", static_cast<bool>(out.decoded_after_phase1[a])},
            {"decoded_final", static_cast<bool>(out.decoded_final[a])},
            {"signal", std::isnan(t.signal) ? nlohmann::json() : nlohmann::json(t.signal)},
            {"interference",
             std::isnan(t.interference) ? nlohmann::json() : nlohmann::json(t.interference)},
            {"noise", 1.0},
        };
        os << j.dump() << '\n';
    }
}

}  // namespace urllc
