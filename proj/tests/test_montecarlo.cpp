// Copyright 2026 The urllc-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <gtest/gtest.h>

#include "urllc/analytics/iid_analysis.hpp"
#include "urllc/montecarlo/engine.hpp"

namespace urllc {
namespace {

TEST(Wilson, KnownValues)
{
    auto const ci = wilson_interval(10, 100);
    EXPECT_NEAR(ci.low, 0.05522, 1e-4);
    EXPECT_NEAR(ci.high, 0.17437, 1e-4);
    auto const zero = wilson_interval(0, 1000);
    EXPECT_EQ(zero.low, 0.0);
    EXPECT_NEAR(zero.high, 3.83e-3, 1e-5);
    auto const all = wilson_interval(50, 50);
    EXPECT_EQ(all.high, 1.0);
    auto const none = wilson_interval(0, 0);
    EXPECT_EQ(none.low, 0.0);
    EXPECT_EQ(none.high, 1.0);
}

TEST(Wilson, CoverageNearNominal)
{
    // Bernoulli(p) samples of size n; the 95% interval should cover p in
    // roughly 95% of repetitions.
    RandomStream rng(5, StreamTag::synthetic, 1);
    for (double p : {0.01, 0.5})
    {
        int covered = 0;
        int const reps = 1000;
        int const n = 2000;
        for (int r = 0; r < reps; ++r)
        {
            std::uint64_t f = 0;
            for (int i = 0; i < n; ++i)
                f += rng.uniform() < p;
            auto const ci = wilson_interval(f, n);
            covered += ci.low <= p && p <= ci.high;
        }
        double const rate = static_cast<double>(covered) / reps;
        EXPECT_GT(rate, 0.92) << p;
        EXPECT_LT(rate, 0.985) << p;
    }
}

// A cheap synthetic trial: failure iff a keyed uniform is below 0.1.
struct SyntheticTrial
{
    bool operator()(std::uint64_t index, std::vector<int>& failed) const
    {
        RandomStream rng(derive_seed(99, index), StreamTag::synthetic, 0);
        bool const f = rng.uniform() < 0.1;
        if (f)
            failed.push_back(static_cast<int>(index % 3));
        return f;
    }
};

TEST(RunTrials, IndependentOfThreadsAndBatching)
{
    EngineOptions one;
    auto const ref = run_trials(0, 50000, 0, one, SyntheticTrial{});
    for (int threads : {2, 4, 8})
        for (std::uint64_t batch : {1ull, 7ull, 2048ull, 100000ull})
        {
            EngineOptions opts{threads, batch};
            auto const got = run_trials(0, 50000, 0, opts, SyntheticTrial{});
            ASSERT_EQ(got.trials, ref.trials);
            ASSERT_EQ(got.failures, ref.failures);
            ASSERT_EQ(got.actuator_failures, ref.actuator_failures);
        }
}

TEST(RunTrials, EarlyStopIsExactAndDeterministic)
{
    auto const ref = run_trials(0, 100000, 37, EngineOptions{}, SyntheticTrial{});
    EXPECT_EQ(ref.failures, 37u);
    EXPECT_LT(ref.trials, 100000u);
    // The stopping trial is itself a failure.
    std::vector<int> scratch;
    EXPECT_TRUE(SyntheticTrial{}(ref.trials - 1, scratch));
    for (int threads : {3, 8})
    {
        auto const got = run_trials(0, 100000, 37, EngineOptions{threads, 64}, SyntheticTrial{});
        EXPECT_EQ(got.trials, ref.trials);
    }
}

TEST(RunTrials, PropagatesExceptions)
{
    auto bad = [](std::uint64_t index, std::vector<int>&) -> bool {
        if (index == 500)
            throw std::runtime_error("boom");
        return false;
    };
    EXPECT_THROW(run_trials(0, 1000, 0, EngineOptions{4, 256}, bad), std::runtime_error);
}

TrialPlan small_distance_plan(Protocol p)
{
    TrialPlan plan;
    plan.scenario.num_cells = 4;
    plan.scenario.actuators_per_cell = 5;
    plan.scenario.bandwidth = 8e6;
    plan.protocol = p;
    plan.max_trials = 3000;
    plan.master_seed = 11;
    return plan;
}

TEST(EstimatePf, ThreadCountDoesNotChangeResults)
{
    for (auto p : kAllProtocols)
    {
        auto const plan = small_distance_plan(p);
        auto const ref = estimate_pf(plan, {1, 2048});
        for (int threads : {4, 8})
        {
            auto const got = estimate_pf(plan, {threads, 512});
            EXPECT_EQ(got.failures, ref.failures) << to_string(p);
            EXPECT_EQ(got.actuator_failures, ref.actuator_failures) << to_string(p);
        }
    }
}

TEST(EstimatePf, SeedChangesDrawsButNotDistribution)
{
    auto plan = small_distance_plan(Protocol::occupy_cow);
    plan.max_trials = 20000;
    auto const a = estimate_pf(plan);
    plan.master_seed = 12;
    auto const b = estimate_pf(plan);
    EXPECT_NE(a.failures, b.failures);
    double const se = std::hypot(binomial_standard_error(a.pf_estimate, a.trials),
                                 binomial_standard_error(b.pf_estimate, b.trials));
    EXPECT_NEAR(a.pf_estimate, b.pf_estimate, 5 * se + 1e-4);
}

TEST(EstimatePf, FixedLayoutIsSharedAcrossTrials)
{
    auto plan = small_distance_plan(Protocol::orth_occupy_cows);
    plan.redraw_layout_each_trial = false;
    TrialRunner const runner(plan);
    EXPECT_EQ(runner.layout_for(0), runner.layout_for(17));
    plan.redraw_layout_each_trial = true;
    TrialRunner const redraw(plan);
    EXPECT_NE(redraw.layout_for(0)->actuator_positions[0].x, redraw.layout_for(17)->actuator_positions[0].x);
}

TEST(EstimatePf, MaxFailuresStopsEarly)
{
    auto plan = small_distance_plan(Protocol::orth_occupy_cows);
    plan.scenario.bandwidth = 1e6;
    plan.max_trials = 100000;
    plan.max_failures = 50;
    auto const r = estimate_pf(plan);
    EXPECT_EQ(r.failures, 50u);
    EXPECT_LT(r.trials, 100000u);
    EXPECT_LE(r.ci_low, r.pf_estimate);
    EXPECT_GE(r.ci_high, r.pf_estimate);
}

TEST(SweepGrid, OrderAndSeeds)
{
    SweepGrid g;
    g.base.master_seed = 7;
    g.protocols = {Protocol::orth_occupy_cows, Protocol::ic_ia};
    g.num_cells = {1, 4};
    g.snr_db = {0.0, 5.0, 10.0};
    auto const pts = g.points();
    ASSERT_EQ(pts.size(), 12u);
    EXPECT_EQ(pts[0].protocol, Protocol::orth_occupy_cows);
    EXPECT_EQ(pts[6].protocol, Protocol::ic_ia);
    EXPECT_EQ(pts[3].scenario.num_cells, 4);
    EXPECT_NEAR(average_link_snr_db(pts[1].scenario), 5.0, 1e-9);
    EXPECT_NEAR(average_link_snr_db(pts[5].scenario), 10.0, 1e-9);
    for (std::size_t i = 0; i < pts.size(); ++i)
        EXPECT_EQ(pts[i].master_seed, derive_seed(7, i));
    // Empty axes keep the base value.
    EXPECT_EQ(pts[0].scenario.bandwidth, g.base.scenario.bandwidth);
}

TEST(SweepGrid, CallbackSeesEveryPointInOrder)
{
    SweepGrid g;
    g.base = small_distance_plan(Protocol::occupy_cow);
    g.base.max_trials = 200;
    g.bandwidths_hz = {4e6, 8e6, 16e6};
    std::vector<double> seen;
    auto const out = sweep(g, {}, [&](SweepResult const& r) { seen.push_back(r.bandwidth_hz); });
    EXPECT_EQ(seen, (std::vector<double>{4e6, 8e6, 16e6}));
    EXPECT_GE(out[0].pf_estimate, out[2].pf_estimate);
}

TEST(ComparePf, DecidesClearCases)
{
    auto plan = small_distance_plan(Protocol::occupy_cow);
    McBandwidthSearch search;
    search.initial_trials = 128;
    search.max_trials_per_point = 4096;
    plan.scenario.bandwidth = 1e6;
    EXPECT_EQ(compare_pf(plan, 0.01, search, {}), PfComparison::above);
    plan.scenario.bandwidth = 1e9;
    EXPECT_EQ(compare_pf(plan, 0.01, search, {}), PfComparison::below);
    // A target at the true value cannot be resolved.
    plan.scenario.bandwidth = 8e6;
    auto const est = estimate_pf([&] {
        auto p = plan;
        p.max_trials = 20000;
        return p;
    }());
    SweepResult r;
    EXPECT_EQ(compare_pf(plan, est.pf_estimate, search, {}, &r), PfComparison::indeterminate);
    EXPECT_EQ(r.trials, 4096u);
}

TEST(RequiredBandwidthMc, BracketsTheCrossing)
{
    auto plan = small_distance_plan(Protocol::occupy_cow);
    McBandwidthSearch search;
    search.min_hz = 1e6;
    search.max_hz = 5e8;
    search.rel_tol = 0.05;
    search.initial_trials = 256;
    search.max_trials_per_point = 8192;
    auto const r = required_bandwidth_mc(plan, 0.05, search, {2, 1024});
    ASSERT_TRUE(r.reachable);
    if (!r.indeterminate)
    {
        EXPECT_LE(r.bracket_high_hz / r.bracket_low_hz - 1.0, 0.05);
        EXPECT_EQ(r.bandwidth_hz, r.bracket_high_hz);
    }
    EXPECT_GE(r.evaluations.size(), 2u);
    std::uint64_t total = 0;
    for (auto const& e : r.evaluations)
        total += e.trials;
    EXPECT_EQ(total, r.total_trials);
}

TEST(RequiredBandwidthMc, UnreachableAndTrivialTargets)
{
    auto plan = small_distance_plan(Protocol::orth_occupy_cows);
    McBandwidthSearch search;
    search.min_hz = 1e5;
    search.max_hz = 2e5;
    search.initial_trials = 64;
    search.max_trials_per_point = 256;
    EXPECT_FALSE(required_bandwidth_mc(plan, 0.01, search).reachable);
    EXPECT_EQ(required_bandwidth_mc(plan, 1.0, search).bandwidth_hz, 1e5);
    EXPECT_THROW(required_bandwidth_mc(plan, 0.0, search), std::invalid_argument);
}

double iid_mc_z(Protocol p, Combining combining, double target, std::uint64_t seed, double* closed_out)
{
    ScenarioConfig cfg;
    cfg.channel_mode = ChannelMode::iid;
    cfg.num_cells = 2;
    cfg.actuators_per_cell = 3;
    set_average_link_snr_db(cfg, 10.0);
    auto m = IidModel::from(cfg);
    auto const s = required_bandwidth(p, target, m);
    m.bandwidth_hz = s.bandwidth_hz;
    double const closed = analytic_failure(p, m).failure_probability();
    TrialPlan plan;
    plan.scenario = cfg;
    plan.scenario.bandwidth = s.bandwidth_hz;
    plan.protocol = p;
    plan.combining = combining;
    plan.max_trials = 40000;
    plan.master_seed = seed;
    auto const r = estimate_pf(plan);
    *closed_out = closed;
    return (r.pf_estimate - closed) / binomial_standard_error(closed, r.trials);
}

// With selection combining the simulator realizes the closed forms' model.
TEST(IidMode, SelectionCombiningMatchesClosedForms)
{
    for (auto p : {Protocol::orth_occupy_cows, Protocol::occupy_cow, Protocol::comp_occupy_cow})
    {
        double closed = 0.0;
        double const z = iid_mc_z(p, Combining::selection, 0.03, 3, &closed);
        if (p == Protocol::occupy_cow)
            EXPECT_LE(z, 3.0) << to_string(p);
        else
            EXPECT_LE(std::abs(z), 4.0) << to_string(p);
    }
}

// Power addition can only help, so the closed forms bound it from above.
TEST(IidMode, PowerSumStaysBelowClosedForms)
{
    for (auto p : {Protocol::orth_occupy_cows, Protocol::occupy_cow, Protocol::comp_occupy_cow})
    {
        double closed = 0.0;
        double const z = iid_mc_z(p, Combining::power_sum, 0.03, 4, &closed);
        EXPECT_LE(z, 3.0) << to_string(p);
    }
}

TEST(IidMode, SelectionNeverBeatsPowerSumPerTrial)
{
    ScenarioConfig cfg;
    cfg.channel_mode = ChannelMode::iid;
    cfg.num_cells = 3;
    cfg.actuators_per_cell = 4;
    for (auto p : {Protocol::orth_occupy_cows, Protocol::occupy_cow, Protocol::comp_occupy_cow})
    {
        auto params = ProtocolParams::from(cfg, p);
        params.bandwidth_hz = 2e6;
        for (std::uint64_t key = 0; key < 500; ++key)
        {
            auto const ch = draw_channels(cfg, nullptr, key);
            params.combining = Combining::power_sum;
            auto const sum = run_protocol(params, ch);
            params.combining = Combining::selection;
            auto const sel = run_protocol(params, ch);
            for (std::size_t a = 0; a < sum.decoded_final.size(); ++a)
                ASSERT_LE(sel.decoded_final[a], sum.decoded_final[a]) << to_string(p);
        }
    }
}

}  // namespace
}  // namespace urllc
