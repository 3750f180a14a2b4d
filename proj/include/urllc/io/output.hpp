// Copyright 2026 The urllc-sim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "urllc/analytics/iid_analysis.hpp"
#include "urllc/core/config.hpp"
#include "urllc/montecarlo/engine.hpp"

namespace urllc {

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    // Plain notation in the usual range keeps bandwidths readable (30000000,
    // not 3e+07); both forms are the shortest round-trip digits.
    char buf[400];
    double const mag = std::abs(x);
    auto const res = mag == 0.0 || (mag >= 1e-5 && mag < 1e16)
                         ? std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed)
                         : std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view bytes) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : bytes)
    {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4)
        s[i] = digits[v & 0xf];
    return s;
}

/// Hash of the canonical (sorted-key) JSON form of a scenario.
inline std::string scenario_hash(ScenarioConfig const& cfg)
{
    return hex64(fnv1a64(to_json(cfg).dump()));
}

//---------------------------------------------------------------------------//
// CSV schemas

inline constexpr std::string_view kSweepCsvHeader =
    "protocol,C,K,W_hz,snr_db,D_m,trials,failures,pf,ci_low,ci_high,seed,wall_s";

inline constexpr std::string_view kAnalyticCsvHeader =
    "protocol,snr_db,target_pf,required_bw_hz,C,K,b_bits,T_s,kfactor_db";

inline constexpr std::string_view kRequiredBandwidthCsvHeader =
    "protocol,C,K,snr_db,D_m,target_pf,required_bw_hz,bracket_low_hz,bracket_high_hz,status,"
    "trials,seed";

/// wall_s is written as 0 unless `timing` is set, so that reruns are
/// byte-identical.
inline void write_sweep_row(std::ostream& os, SweepResult const& r, bool timing = false)
{
    os << to_string(r.protocol) << ',' << r.num_cells << ',' << r.actuators_per_cell << ','
       << format_number(r.bandwidth_hz) << ',' << format_number(r.snr_db) << ','
       << format_number(r.separation_m) << ',' << r.trials << ',' << r.failures << ','
       << format_number(r.pf_estimate) << ',' << format_number(r.ci_low) << ','
       << format_number(r.ci_high) << ',' << r.seed << ','
       << format_number(timing ? r.wall_time_s : 0.0) << '\n';
}

struct AnalyticRow
{
    Protocol protocol = Protocol::occupy_cow;
    double snr_db = 0.0;
    double target_pf = 0.0;
    BandwidthSolution solution;
    ScenarioConfig scenario;
};

inline void write_analytic_row(std::ostream& os, AnalyticRow const& r)
{
    double const bw = r.solution.reachable ? r.solution.bandwidth_hz
                                           : std::numeric_limits<double>::infinity();
    os << to_string(r.protocol) << ',' << format_number(r.snr_db) << ','
       << format_number(r.target_pf) << ',' << format_number(bw) << ','
       << r.scenario.num_cells << ',' << r.scenario.actuators_per_cell << ','
       << format_number(r.scenario.message_bits) << ',' << format_number(r.scenario.cycle_time)
       << ',' << format_number(r.scenario.rician_k_factor_db) << '\n';
}

inline std::string_view search_status(McBandwidthResult const& r) noexcept
{
    if (!r.reachable)
        return "unreachable";
    return r.indeterminate ? "indeterminate" : "ok";
}

inline void write_required_bandwidth_row(std::ostream& os, TrialPlan const& plan,
                                         double target_pf, McBandwidthResult const& r)
{
    os << to_string(plan.protocol) << ',' << plan.scenario.num_cells << ','
       << plan.scenario.actuators_per_cell << ','
       << format_number(average_link_snr_db(plan.scenario)) << ','
       << format_number(plan.scenario.cell_separation_m) << ',' << format_number(target_pf)
       << ',' << format_number(r.reachable ? r.bandwidth_hz
                                           : std::numeric_limits<double>::infinity())
       << ',' << format_number(r.bracket_low_hz) << ',' << format_number(r.bracket_high_hz)
       << ',' << search_status(r) << ',' << r.total_trials << ',' << plan.master_seed << '\n';
}

//---------------------------------------------------------------------------//
/*!
 * Run manifest. The file is written when the run starts (status "running")
 * and rewritten on every update, so a crashed run leaves its inputs behind.
 */
class RunManifest
{
  public:
    RunManifest(std::filesystem::path path, std::vector<std::string> command_line,
                ScenarioConfig const& scenario, std::uint64_t master_seed)
        : path_(std::move(path))
    {
        doc_["command_line"] = std::move(command_line);
        doc_["code_version"] = URLLC_VERSION;
        doc_["scenario"] = to_json(scenario);
        doc_["scenario_hash"] = scenario_hash(scenario);
        doc_["master_seed"] = master_seed;
        doc_["start_time"] = now_iso8601();
        doc_["end_time"] = nullptr;
        doc_["status"] = "running";
        doc_["outputs"] = nlohmann::json::array();
        doc_["point_seeds"] = nlohmann::json::array();
        save();
    }

    void set(std::string const& key, nlohmann::json value)
    {
        doc_[key] = std::move(value);
        save();
    }

    void add_output(std::filesystem::path const& file)
    {
        doc_["outputs"].push_back(file.filename().string());
        save();
    }

    void add_point_seed(std::uint64_t seed) { doc_["point_seeds"].push_back(seed); }

    void finish(std::string_view status)
    {
        doc_["end_time"] = now_iso8601();
        doc_["status"] = status;
        save();
    }

    nlohmann::json const& document() const noexcept { return doc_; }

  private:
    std::filesystem::path path_;
    nlohmann::json doc_;

    void save() const
    {
        std::ofstream out(path_);
        if (!out)
            throw std::runtime_error("cannot write manifest '" + path_.string() + "'");
        out << doc_.dump(2) << '\n';
    }

    static std::string now_iso8601()
    {
        auto const t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&t, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }
};

}  // namespace urllc
