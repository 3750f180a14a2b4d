// Copyright 2026 The urllc-sim Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <stdexcept>
#include <thread>
#include <vector>

#include "urllc/core/channel.hpp"
#include "urllc/core/config.hpp"
#include "urllc/core/layout.hpp"
#include "urllc/core/rng.hpp"
#include "urllc/montecarlo/estimator.hpp"
#include "urllc/protocols/protocols.hpp"

namespace urllc {

struct TrialPlan
{
    ScenarioConfig scenario;
    Protocol protocol = Protocol::occupy_cow;
    std::uint64_t max_trials = 10000;
    std::uint64_t max_failures = 0;  ///< stop once reached; 0 disables
    std::uint64_t master_seed = 1;
    bool redraw_layout_each_trial = true;
    bool treat_interference_as_noise = false;
    Combining combining = Combining::power_sum;
};

inline void validate(TrialPlan const& plan)
{
    validate(plan.scenario);
    if (plan.max_trials < 1)
        throw ConfigError("max_trials must be >= 1");
    auto params = ProtocolParams::from(plan.scenario, plan.protocol);
    params.treat_interference_as_noise = plan.treat_interference_as_noise;
    params.combining = plan.combining;
    validate(params);
}

struct EngineOptions
{
    int threads = 1;
    /// Trials evaluated between early-stop checks. Results never depend on it.
    std::uint64_t batch_size = 2048;
};

/// Failure counts over a contiguous range of trial indices.
struct TrialCounts
{
    std::uint64_t trials = 0;
    std::uint64_t failures = 0;
    std::vector<std::uint64_t> actuator_failures;

    void merge(TrialCounts const& other)
    {
        trials += other.trials;
        failures += other.failures;
        if (actuator_failures.size() < other.actuator_failures.size())
            actuator_failures.resize(other.actuator_failures.size(), 0);
        for (std::size_t i = 0; i < other.actuator_failures.size(); ++i)
            actuator_failures[i] += other.actuator_failures[i];
    }
};

struct SweepResult
{
    Protocol protocol = Protocol::occupy_cow;
    int num_cells = 0;
    int actuators_per_cell = 0;
    double bandwidth_hz = 0.0;
    double snr_db = 0.0;
    double separation_m = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t failures = 0;
    double pf_estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;
    std::vector<std::uint64_t> actuator_failures;
};

//---------------------------------------------------------------------------//
/*!
 * Runs trials first, first+1, ... in batches and counts failures.
 *
 * `trial(index, failed)` returns true on network failure and may append the
 * failed actuator indices to `failed`. Within a batch, trials are split into
 * contiguous chunks across threads; outcomes are then scanned in index order,
 * so the stopping point and every count depend only on the trial function,
 * never on the thread count or scheduling.
 */
template<class TrialFn>
TrialCounts run_trials(std::uint64_t first, std::uint64_t count, std::uint64_t max_failures,
                       EngineOptions const& opts, TrialFn&& trial)
{
    int const threads = std::max(1, opts.threads);
    std::uint64_t const batch = std::max<std::uint64_t>(1, opts.batch_size);
    TrialCounts out;
    std::vector<std::uint8_t> flags(batch);
    std::vector<std::vector<int>> failed(batch);

    std::uint64_t done = 0;
    while (done < count)
    {
        std::uint64_t const n = std::min(batch, count - done);
        std::uint64_t const base = first + done;
        auto work = [&](std::uint64_t lo, std::uint64_t hi) {
            for (auto i = lo; i < hi; ++i)
            {
                failed[i].clear();
                flags[i] = trial(base + i, failed[i]) ? 1 : 0;
            }
        };
        if (threads == 1 || n < 2)
            work(0, n);
        else
        {
            std::vector<std::exception_ptr> errors(threads);
            {
                std::vector<std::jthread> pool;
                std::uint64_t const chunk = (n + threads - 1) / threads;
                for (int t = 0; t < threads; ++t)
                {
                    std::uint64_t const lo = std::min(n, t * chunk);
                    std::uint64_t const hi = std::min(n, lo + chunk);
                    pool.emplace_back([&, t, lo, hi] {
                        try
                        {
                            work(lo, hi);
                        }
                        catch (...)
                        {
                            errors[t] = std::current_exception();
                        }
                    });
                }
            }
            for (auto const& e : errors)
                if (e)
                    std::rethrow_exception(e);
        }

        for (std::uint64_t i = 0; i < n; ++i)
        {
            ++out.trials;
            if (flags[i])
                ++out.failures;
            for (int a : failed[i])
            {
                if (static_cast<std::size_t>(a) >= out.actuator_failures.size())
                    out.actuator_failures.resize(a + 1, 0);
                ++out.actuator_failures[a];
            }
            if (max_failures && out.failures >= max_failures)
                return out;
        }
        done += n;
    }
    return out;
}

//---------------------------------------------------------------------------//
/// Executes one transmission period of a plan; reentrant.
class TrialRunner
{
  public:
    explicit TrialRunner(TrialPlan const& plan)
        : plan_(plan)
    {
        validate(plan_);
        params_ = ProtocolParams::from(plan_.scenario, plan_.protocol);
        params_.treat_interference_as_noise = plan_.treat_interference_as_noise;
        params_.combining = plan_.combining;
        if (plan_.scenario.channel_mode == ChannelMode::distance && !plan_.redraw_layout_each_trial)
        {
            RandomStream rng(derive_seed(plan_.master_seed, ~0ull), StreamTag::layout, 0);
            fixed_layout_ = std::make_shared<Layout const>(build_layout(plan_.scenario, rng));
        }
    }

    std::uint64_t trial_key(std::uint64_t index) const noexcept
    {
        return derive_seed(plan_.master_seed, index);
    }

    std::shared_ptr<Layout const> layout_for(std::uint64_t index) const
    {
        if (plan_.scenario.channel_mode == ChannelMode::iid)
            return nullptr;
        if (fixed_layout_)
            return fixed_layout_;
        RandomStream rng(trial_key(index), StreamTag::layout, 0);
        return std::make_shared<Layout const>(build_layout(plan_.scenario, rng));
    }

    ChannelRealization channels_for(std::uint64_t index) const
    {
        return draw_channels(plan_.scenario, layout_for(index), trial_key(index));
    }

    ProtocolOutcome run(std::uint64_t index) const
    {
        return run_protocol(params_, channels_for(index));
    }

    bool operator()(std::uint64_t index, std::vector<int>& failed) const
    {
        auto const outcome = run(index);
        for (std::size_t a = 0; a < outcome.decoded_final.size(); ++a)
            if (!outcome.decoded_final[a])
                failed.push_back(static_cast<int>(a));
        return outcome.network_failure;
    }

    TrialPlan const& plan() const noexcept { return plan_; }

  private:
    TrialPlan plan_;
    ProtocolParams params_;
    std::shared_ptr<Layout const> fixed_layout_;
};

inline SweepResult make_result(TrialPlan const& plan, TrialCounts const& counts, double wall_s)
{
    SweepResult r;
    r.protocol = plan.protocol;
    r.num_cells = plan.scenario.num_cells;
    r.actuators_per_cell = plan.scenario.actuators_per_cell;
    r.bandwidth_hz = plan.scenario.bandwidth;
    r.snr_db = average_link_snr_db(plan.scenario);
    r.separation_m = plan.scenario.cell_separation_m;
    r.trials = counts.trials;
    r.failures = counts.failures;
    r.pf_estimate = counts.trials ? static_cast<double>(counts.failures) / counts.trials : 0.0;
    auto const ci = wilson_interval(counts.failures, counts.trials);
    r.ci_low = ci.low;
    r.ci_high = ci.high;
    r.seed = plan.master_seed;
    r.wall_time_s = wall_s;
    r.actuator_failures = counts.actuator_failures;
    return r;
}

/// Monte Carlo estimate of the network failure probability of a plan.
inline SweepResult estimate_pf(TrialPlan const& plan, EngineOptions const& opts = {})
{
    auto const start = std::chrono::steady_clock::now();
    TrialRunner const runner(plan);
    auto const counts = run_trials(0, plan.max_trials, plan.max_failures, opts, runner);
    std::chrono::duration<double> const wall = std::chrono::steady_clock::now() - start;
    return make_result(plan, counts, wall.count());
}

//---------------------------------------------------------------------------//
// Parameter sweeps

/// Cartesian grid around a base plan. An empty axis keeps the base value.
struct SweepGrid
{
    TrialPlan base;
    std::vector<Protocol> protocols;
    std::vector<int> num_cells;
    std::vector<double> separations_m;
    std::vector<double> bandwidths_hz;
    std::vector<double> snr_db;

    /// Plans in output order: protocol, C, D, W, then SNR fastest. Point i
    /// uses seed derive_seed(base.master_seed, i).
    std::vector<TrialPlan> points() const
    {
        auto or_base = [](auto const& axis, auto base_value) {
            using T = std::decay_t<decltype(base_value)>;
            return axis.empty() ? std::vector<T>{base_value} : std::vector<T>(axis.begin(), axis.end());
        };
        auto const protos = or_base(protocols, base.protocol);
        auto const cells = or_base(num_cells, base.scenario.num_cells);
        auto const seps = or_base(separations_m, base.scenario.cell_separation_m);
        auto const bws = or_base(bandwidths_hz, base.scenario.bandwidth);
        auto const snrs = or_base(snr_db, average_link_snr_db(base.scenario));

        std::vector<TrialPlan> out;
        for (auto p : protos)
            for (int c : cells)
                for (double d : seps)
                    for (double w : bws)
                        for (double s : snrs)
                        {
                            TrialPlan plan = base;
                            plan.protocol = p;
                            plan.scenario.num_cells = c;
                            plan.scenario.cell_separation_m = d;
                            plan.scenario.bandwidth = w;
                            set_average_link_snr_db(plan.scenario, s);
                            plan.master_seed = derive_seed(base.master_seed, out.size());
                            out.push_back(plan);
                        }
        return out;
    }
};

/// Runs every grid point in order; `on_point` sees each result as it lands.
inline std::vector<SweepResult>
sweep(SweepGrid const& grid, EngineOptions const& opts = {},
      std::function<void(SweepResult const&)> const& on_point = {})
{
    auto const plans = grid.points();
    for (auto const& plan : plans)
        validate(plan);
    std::vector<SweepResult> out;
    out.reserve(plans.size());
    for (auto const& plan : plans)
    {
        out.push_back(estimate_pf(plan, opts));
        if (on_point)
            on_point(out.back());
    }
    return out;
}

//---------------------------------------------------------------------------//
// Bandwidth search against a Monte Carlo oracle

struct McBandwidthSearch
{
    double min_hz = 1e6;
    double max_hz = 1e9;
    double rel_tol = 0.02;
    std::uint64_t initial_trials = 256;
    std::uint64_t max_trials_per_point = 200000;
};

enum class PfComparison
{
    below,          ///< ci_high < target
    above,          ///< ci_low > target
    indeterminate,  ///< trial cap reached with the target inside the CI
};

struct McBandwidthResult
{
    bool reachable = true;
    bool indeterminate = false;
    double bandwidth_hz = 0.0;  ///< smallest bandwidth shown to meet the target
    double bracket_low_hz = 0.0;
    double bracket_high_hz = 0.0;
    std::uint64_t total_trials = 0;
    std::vector<SweepResult> evaluations;
};

/// Compares the failure probability of `plan` with `target`, doubling the
/// trial count until the Wilson interval excludes the target or the cap hits.
/// Trials are indexed from 0 so that every bandwidth sees the same draws.
inline PfComparison compare_pf(TrialPlan const& plan, double target, McBandwidthSearch const& search,
                               EngineOptions const& opts, SweepResult* result = nullptr)
{
    auto const start = std::chrono::steady_clock::now();
    TrialRunner const runner(plan);
    TrialCounts counts;
    std::uint64_t n = std::max<std::uint64_t>(1, search.initial_trials);
    PfComparison verdict = PfComparison::indeterminate;
    while (true)
    {
        counts.merge(run_trials(counts.trials, n - counts.trials, 0, opts, runner));
        auto const ci = wilson_interval(counts.failures, counts.trials);
        if (ci.high < target)
        {
            verdict = PfComparison::below;
            break;
        }
        if (ci.low > target)
        {
            verdict = PfComparison::above;
            break;
        }
        if (n >= search.max_trials_per_point)
            break;
        n = std::min(2 * n, search.max_trials_per_point);
    }
    if (result)
    {
        std::chrono::duration<double> const wall = std::chrono::steady_clock::now() - start;
        *result = make_result(plan, counts, wall.count());
    }
    return verdict;
}

/*!
 * Smallest bandwidth whose Monte Carlo failure probability is below target.
 *
 * Geometric bisection on [min_hz, max_hz]. A point is accepted only when its
 * Wilson interval lies entirely below the target and rejected only when it
 * lies entirely above; a point that stays ambiguous at the trial cap ends the
 * search with `indeterminate` set and the current bracket returned.
 */
inline McBandwidthResult required_bandwidth_mc(TrialPlan plan, double target_pf,
                                               McBandwidthSearch const& search = {},
                                               EngineOptions const& opts = {})
{
    if (!(target_pf > 0.0))
        throw std::invalid_argument("required_bandwidth_mc: target must be positive");
    McBandwidthResult out;
    out.bracket_low_hz = search.min_hz;
    out.bracket_high_hz = search.max_hz;
    if (target_pf >= 1.0)
    {
        out.bandwidth_hz = out.bracket_high_hz = search.min_hz;
        return out;
    }

    auto evaluate = [&](double w) {
        plan.scenario.bandwidth = w;
        SweepResult r;
        auto const verdict = compare_pf(plan, target_pf, search, opts, &r);
        out.total_trials += r.trials;
        out.evaluations.push_back(r);
        return verdict;
    };

    double lo = search.min_hz;
    double hi = search.max_hz;
    switch (evaluate(hi))
    {
        case PfComparison::above:
            out.reachable = false;
            return out;
        case PfComparison::indeterminate:
            out.indeterminate = true;
            out.bandwidth_hz = hi;
            return out;
        case PfComparison::below: break;
    }
    switch (evaluate(lo))
    {
        case PfComparison::below:
            out.bandwidth_hz = out.bracket_low_hz = out.bracket_high_hz = lo;
            return out;
        case PfComparison::indeterminate:
            out.indeterminate = true;
            out.bandwidth_hz = lo;
            return out;
        case PfComparison::above: break;
    }
    while (hi / lo - 1.0 > search.rel_tol)
    {
        double const mid = std::sqrt(lo * hi);
        auto const verdict = evaluate(mid);
        if (verdict == PfComparison::indeterminate)
        {
            out.indeterminate = true;
            out.bandwidth_hz = mid;
            out.bracket_low_hz = lo;
            out.bracket_high_hz = hi;
            return out;
        }
        (verdict == PfComparison::below ? hi : lo) = mid;
    }
    out.bandwidth_hz = hi;
    out.bracket_low_hz = lo;
    out.bracket_high_hz = hi;
    return out;
}

}  // namespace urllc
