// Copyright 2026 The urllc-sim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace urllc {

/// Raised for any inconsistent or unsupported scenario parameter.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

enum class LayoutKind
{
    dense_grid,
    wraparound_grid,
};

/// How link gains are produced for a trial.
enum class ChannelMode
{
    distance,  ///< geometry, LOS probability, path loss, shadowing, fading
    iid,       ///< unit large-scale gain, Rician fading on every link
};

/// Mean path loss of the dense factory-hall grid, used to define the average
/// link SNR in dB.
inline constexpr double kMeanPathLossDb = 59.0;

/// All parameters of one simulated network.
struct ScenarioConfig
{
    int num_cells = 1;
    int actuators_per_cell = 30;
    double message_bits = 160.0;
    double cycle_time = 1e-3;
    double bandwidth = 30e6;
    double tx_psd_dbm_hz = -105.0;
    double noise_psd_dbm_hz = -169.0;
    double carrier_freq_hz = 3e9;
    double cell_side_m = 10.0;
    double cell_separation_m = 10.0;
    double min_distance_m = 1.0;
    double rician_k_factor_db = 4.7;
    double shadow_std_los_db = 3.0;
    double shadow_std_nlos_db = 4.0;
    LayoutKind layout_kind = LayoutKind::dense_grid;
    ChannelMode channel_mode = ChannelMode::distance;

    int num_actuators() const noexcept { return num_cells * actuators_per_cell; }

    /// Linear transmit-to-noise PSD ratio.
    double snr_linear() const noexcept
    {
        return std::pow(10.0, (tx_psd_dbm_hz - noise_psd_dbm_hz) / 10.0);
    }

    /// Aggregate per-cell rate of the concatenated message, b/s.
    double rate_bps() const noexcept
    {
        return actuators_per_cell * message_bits / (0.5 * cycle_time);
    }

    double k_factor_linear() const noexcept
    {
        return std::pow(10.0, rician_k_factor_db / 10.0);
    }
};

/// Returns the integer square root of n, or -1 if n is not a perfect square.
inline int exact_sqrt(int n) noexcept
{
    if (n < 0)
        return -1;
    auto r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    while (r * r > n)
        --r;
    while ((r + 1) * (r + 1) <= n)
        ++r;
    return r * r == n ? r : -1;
}

inline void validate(ScenarioConfig const& cfg)
{
    if (cfg.num_cells < 1)
        throw ConfigError("num_cells must be >= 1");
    if (cfg.actuators_per_cell < 1)
        throw ConfigError("actuators_per_cell must be >= 1");
    if (!(cfg.message_bits > 0))
        throw ConfigError("message_bits must be > 0");
    if (!(cfg.cycle_time > 0))
        throw ConfigError("cycle_time must be > 0");
    if (!(cfg.bandwidth > 0))
        throw ConfigError("bandwidth must be > 0");
    if (!std::isfinite(cfg.tx_psd_dbm_hz) || !std::isfinite(cfg.noise_psd_dbm_hz))
        throw ConfigError("tx/noise PSD must be finite");
    if (!(cfg.cell_side_m > 0))
        throw ConfigError("cell_side_m must be > 0");
    if (!(cfg.min_distance_m > 0))
        throw ConfigError("min_distance_m must be > 0");
    if (cfg.shadow_std_los_db < 0 || cfg.shadow_std_nlos_db < 0)
        throw ConfigError("shadowing standard deviations must be >= 0");
    if (cfg.channel_mode == ChannelMode::iid)
        return;
    if (exact_sqrt(cfg.num_cells) < 0)
        throw ConfigError("num_cells must be a perfect square, got "
                          + std::to_string(cfg.num_cells));
    if (cfg.cell_separation_m < cfg.cell_side_m)
        throw ConfigError("cell_separation_m must be >= cell_side_m");
}

//---------------------------------------------------------------------------//
// String forms

inline std::string_view to_string(LayoutKind k) noexcept
{
    return k == LayoutKind::dense_grid ? "dense_grid" : "wraparound_grid";
}

inline std::string_view to_string(ChannelMode m) noexcept
{
    return m == ChannelMode::distance ? "distance" : "iid";
}

inline LayoutKind parse_layout_kind(std::string_view s)
{
    if (s == "dense_grid")
        return LayoutKind::dense_grid;
    if (s == "wraparound_grid")
        return LayoutKind::wraparound_grid;
    throw ConfigError("unknown layout_kind '" + std::string(s) + "'");
}

inline ChannelMode parse_channel_mode(std::string_view s)
{
    if (s == "distance")
        return ChannelMode::distance;
    if (s == "iid")
        return ChannelMode::iid;
    throw ConfigError("unknown channel_mode '" + std::string(s) + "'");
}

//---------------------------------------------------------------------------//
// JSON: keys mirror the struct fields; unknown keys are rejected.

inline nlohmann::json to_json(ScenarioConfig const& c)
{
    return nlohmann::json{
        {"num_cells", c.num_cells},
        {"actuators_per_cell", c.actuators_per_cell},
        {"message_bits", c.message_bits},
        {"cycle_time", c.cycle_time},
        {"bandwidth", c.bandwidth},
        {"tx_psd_dbm_hz", c.tx_psd_dbm_hz},
        {"noise_psd_dbm_hz", c.noise_psd_dbm_hz},
        {"carrier_freq_hz", c.carrier_freq_hz},
        {"cell_side_m", c.cell_side_m},
        {"cell_separation_m", c.cell_separation_m},
        {"min_distance_m", c.min_distance_m},
        {"rician_k_factor_db", c.rician_k_factor_db},
        {"shadow_std_los_db", c.shadow_std_los_db},
        {"shadow_std_nlos_db", c.shadow_std_nlos_db},
        {"layout_kind", std::string(to_string(c.layout_kind))},
        {"channel_mode", std::string(to_string(c.channel_mode))},
    };
}

inline ScenarioConfig scenario_from_json(nlohmann::json const& j)
{
    if (!j.is_object())
        throw ConfigError("scenario must be a JSON object");
    ScenarioConfig c;
    for (auto const& [key, value] : j.items())
    {
        try
        {
            if (key == "num_cells")
                c.num_cells = value.get<int>();
            else if (key == "actuators_per_cell")
                c.actuators_per_cell = value.get<int>();
            else if (key == "message_bits")
                c.message_bits = value.get<double>();
            else if (key == "cycle_time")
                c.cycle_time = value.get<double>();
            else if (key == "bandwidth")
                c.bandwidth = value.get<double>();
            else if (key == "tx_psd_dbm_hz")
                c.tx_psd_dbm_hz = value.get<double>();
            else if (key == "noise_psd_dbm_hz")
                c.noise_psd_dbm_hz = value.get<double>();
            else if (key == "carrier_freq_hz")
                c.carrier_freq_hz = value.get<double>();
            else if (key == "cell_side_m")
                c.cell_side_m = value.get<double>();
            else if (key == "cell_separation_m")
                c.cell_separation_m = value.get<double>();
            else if (key == "min_distance_m")
                c.min_distance_m = value.get<double>();
            else if (key == "rician_k_factor_db")
                c.rician_k_factor_db = value.get<double>();
            else if (key == "shadow_std_los_db")
                c.shadow_std_los_db = value.get<double>();
            else if (key == "shadow_std_nlos_db")
                c.shadow_std_nlos_db = value.get<double>();
            else if (key == "layout_kind")
                c.layout_kind = parse_layout_kind(value.get<std::string>());
            else if (key == "channel_mode")
                c.channel_mode = parse_channel_mode(value.get<std::string>());
            else
                throw ConfigError("unknown scenario key '" + key + "'");
        }
        catch (nlohmann::json::exception const& e)
        {
            throw ConfigError("bad value for scenario key '" + key + "': " + e.what());
        }
    }
    validate(c);
    return c;
}

inline ScenarioConfig load_scenario(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open scenario file '" + path + "'");
    nlohmann::json j;
    try
    {
        in >> j;
    }
    catch (nlohmann::json::parse_error const& e)
    {
        throw ConfigError("cannot parse scenario file '" + path + "': " + e.what());
    }
    return scenario_from_json(j);
}

//---------------------------------------------------------------------------//
// Derived quantities

/// Average SNR of a link in dB: transmit PSD minus noise PSD minus the mean
/// path loss (zero mean path loss in i.i.d. mode).
inline double average_link_snr_db(ScenarioConfig const& c) noexcept
{
    double const mean_pl = c.channel_mode == ChannelMode::distance ? kMeanPathLossDb : 0.0;
    return c.tx_psd_dbm_hz - mean_pl - c.noise_psd_dbm_hz;
}

/// Sets the transmit PSD so that average_link_snr_db(c) == snr_db.
inline void set_average_link_snr_db(ScenarioConfig& c, double snr_db) noexcept
{
    double const mean_pl = c.channel_mode == ChannelMode::distance ? kMeanPathLossDb : 0.0;
    c.tx_psd_dbm_hz = snr_db + mean_pl + c.noise_psd_dbm_hz;
}

/// Total transmit power in watts over the configured bandwidth.
inline double total_tx_power_w(ScenarioConfig const& c) noexcept
{
    return std::pow(10.0, (c.tx_psd_dbm_hz - 30.0) / 10.0) * c.bandwidth;
}

}  // namespace urllc
