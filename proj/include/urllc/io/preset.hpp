// Copyright 2026 The urllc-sim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "urllc/analytics/iid_analysis.hpp"
#include "urllc/core/config.hpp"
#include "urllc/montecarlo/engine.hpp"
#include "urllc/protocols/protocols.hpp"

namespace urllc {

/// Parses a real number with an optional SI suffix k, M or G.
inline double parse_si_number(std::string_view text)
{
    std::string s(text);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.pop_back();
    double scale = 1.0;
    if (!s.empty())
    {
        switch (s.back())
        {
            case 'k': scale = 1e3; break;
            case 'M': scale = 1e6; break;
            case 'G': scale = 1e9; break;
            default: break;
        }
        if (scale != 1.0)
            s.pop_back();
    }
    std::size_t used = 0;
    double value = 0.0;
    try
    {
        value = std::stod(s, &used);
    }
    catch (std::exception const&)
    {
        used = 0;
    }
    if (s.empty() || used != s.size())
        throw ConfigError("not a number: '" + std::string(text) + "'");
    return value * scale;
}

/*!
 * Expands an axis specification: comma-separated values and inclusive
 * ranges "start:stop:step", e.g. "0:30:1" or "14M,18M,22M" or "-5:5:2.5,10".
 * Range points are start + i*step, so no error accumulates.
 */
inline std::vector<double> parse_axis(std::string_view spec)
{
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= spec.size())
    {
        auto const comma = spec.find(',', pos);
        auto const item = spec.substr(pos, comma == std::string_view::npos ? spec.npos : comma - pos);
        pos = comma == std::string_view::npos ? spec.size() + 1 : comma + 1;
        if (item.empty())
            continue;
        auto const c1 = item.find(':');
        if (c1 == std::string_view::npos)
        {
            out.push_back(parse_si_number(item));
            continue;
        }
        auto const c2 = item.find(':', c1 + 1);
        if (c2 == std::string_view::npos)
            throw ConfigError("range must be start:stop:step, got '" + std::string(item) + "'");
        double const start = parse_si_number(item.substr(0, c1));
        double const stop = parse_si_number(item.substr(c1 + 1, c2 - c1 - 1));
        double const step = parse_si_number(item.substr(c2 + 1));
        if (!(step != 0.0) || !std::isfinite(step))
            throw ConfigError("range step must be non-zero in '" + std::string(item) + "'");
        double const span = (stop - start) / step;
        if (span < -1e-9)
            continue;
        auto const n = static_cast<long>(std::floor(span + 1e-9)) + 1;
        for (long i = 0; i < n; ++i)
            out.push_back(start + static_cast<double>(i) * step);
    }
    return out;
}

inline std::vector<double> axis_from_json(nlohmann::json const& j, std::string const& key)
{
    if (j.is_string())
        return parse_axis(j.get<std::string>());
    if (j.is_number())
        return {j.get<double>()};
    if (j.is_array())
    {
        std::vector<double> out;
        for (auto const& v : j)
        {
            auto part = axis_from_json(v, key);
            out.insert(out.end(), part.begin(), part.end());
        }
        return out;
    }
    throw ConfigError("axis '" + key + "' must be a number, string or array");
}

//---------------------------------------------------------------------------//
/*!
 * Contents of a --scenario file. A plain scenario file holds ScenarioConfig
 * keys only. A preset wraps it as {"scenario": {...}, ...} and may add the
 * run axes and options below; every key is checked.
 */
struct RunPreset
{
    ScenarioConfig scenario;
    std::optional<std::string> command;
    std::vector<Protocol> protocols;
    std::vector<double> num_cells;
    std::vector<double> snr_db;
    std::vector<double> bandwidth_hz;
    std::vector<double> separation_m;
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> max_failures;
    std::optional<std::uint64_t> seed;
    std::optional<double> target_pf;
    std::optional<LosArgument> los_argument;
    std::optional<bool> treat_interference_as_noise;
    std::optional<Combining> combining;
    std::optional<bool> redraw_layout_each_trial;
    std::optional<McBandwidthSearch> search;
    std::string description;
};

namespace detail {

inline McBandwidthSearch search_from_json(nlohmann::json const& j)
{
    if (!j.is_object())
        throw ConfigError("'search' must be an object");
    McBandwidthSearch s;
    for (auto const& [key, value] : j.items())
    {
        if (key == "min_hz")
            s.min_hz = axis_from_json(value, key).at(0);
        else if (key == "max_hz")
            s.max_hz = axis_from_json(value, key).at(0);
        else if (key == "rel_tol")
            s.rel_tol = value.get<double>();
        else if (key == "initial_trials")
            s.initial_trials = value.get<std::uint64_t>();
        else if (key == "max_trials_per_point")
            s.max_trials_per_point = value.get<std::uint64_t>();
        else
            throw ConfigError("unknown search key '" + key + "'");
    }
    return s;
}

}  // namespace detail

inline RunPreset preset_from_json(nlohmann::json const& j)
{
    if (!j.is_object())
        throw ConfigError("scenario file must hold a JSON object");
    RunPreset p;
    if (!j.contains("scenario"))
    {
        p.scenario = scenario_from_json(j);
        return p;
    }
    for (auto const& [key, value] : j.items())
    {
        try
        {
            if (key == "scenario")
                p.scenario = scenario_from_json(value);
            else if (key == "description")
                p.description = value.get<std::string>();
            else if (key == "command")
                p.command = value.get<std::string>();
            else if (key == "protocols")
                for (auto const& name : value)
                    p.protocols.push_back(parse_protocol(name.get<std::string>()));
            else if (key == "num_cells")
                p.num_cells = axis_from_json(value, key);
            else if (key == "snr_db")
                p.snr_db = axis_from_json(value, key);
            else if (key == "bandwidth_hz")
                p.bandwidth_hz = axis_from_json(value, key);
            else if (key == "separation_m")
                p.separation_m = axis_from_json(value, key);
            else if (key == "trials")
                p.trials = value.get<std::uint64_t>();
            else if (key == "max_failures")
                p.max_failures = value.get<std::uint64_t>();
            else if (key == "seed")
                p.seed = value.get<std::uint64_t>();
            else if (key == "target_pf")
                p.target_pf = value.get<double>();
            else if (key == "los_argument")
                p.los_argument = parse_los_argument(value.get<std::string>());
            else if (key == "treat_interference_as_noise")
                p.treat_interference_as_noise = value.get<bool>();
            else if (key == "combining")
                p.combining = parse_combining(value.get<std::string>());
            else if (key == "redraw_layout_each_trial")
                p.redraw_layout_each_trial = value.get<bool>();
            else if (key == "search")
                p.search = detail::search_from_json(value);
            else
                throw ConfigError("unknown preset key '" + key + "'");
        }
        catch (nlohmann::json::exception const& e)
        {
            throw ConfigError("bad value for preset key '" + key + "': " + e.what());
        }
    }
    return p;
}

inline RunPreset load_preset(std::string const& path)
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
    return preset_from_json(j);
}

}  // namespace urllc
