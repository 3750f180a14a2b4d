// Copyright 2026 The urllc-sim Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when all pass). Pass criterion numbers as
// arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support/enumeration.hpp"
#include "support/sic_checks.hpp"
#include "urllc/analytics/iid_analysis.hpp"
#include "urllc/io/output.hpp"
#include "urllc/io/preset.hpp"
#include "urllc/montecarlo/engine.hpp"

namespace {

using namespace urllc;

struct Verdict
{
    bool pass = true;
    std::string detail;
};

std::string fmt(double x, int digits = 4)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

std::string scenario_path(std::string const& name)
{
    return std::string(URLLC_SCENARIO_DIR) + "/" + name;
}

EngineOptions engine_options()
{
    EngineOptions opts;
    opts.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return opts;
}

//---------------------------------------------------------------------------//

Verdict analytic_bandwidths()
{
    struct Case
    {
        Protocol protocol;
        int cells;
        double expected_hz;
    };
    Case const cases[] = {{Protocol::occupy_cow, 1, 5.3e6},
                          {Protocol::orth_occupy_cows, 16, 88.5e6},
                          {Protocol::occupy_cow, 16, 46.0e6},
                          {Protocol::comp_occupy_cow, 16, 39.0e6}};
    auto const preset = load_preset(scenario_path("fig1.json"));
    Verdict v;
    std::ostringstream d;
    std::ostringstream standard;
    for (auto const& c : cases)
    {
        auto cfg = preset.scenario;
        cfg.num_cells = c.cells;
        auto m = IidModel::from(cfg, preset.los_argument.value_or(LosArgument::sqrt_kappa));
        m.snr_linear = 10.0;
        auto const s = required_bandwidth(c.protocol, 1e-9, m);
        double const err = s.bandwidth_hz / c.expected_hz - 1.0;
        v.pass = v.pass && s.reachable && std::abs(err) <= 0.05;
        d << to_string(c.protocol) << " C=" << c.cells << " " << fmt(s.bandwidth_hz / 1e6) << " MHz ("
          << (err >= 0 ? "+" : "") << fmt(100 * err, 2) << "%); ";

        m.los_argument = LosArgument::sqrt_two_kappa;
        standard << fmt(required_bandwidth(c.protocol, 1e-9, m).bandwidth_hz / 1e6) << " ";
    }

    // The convention the simulated Rician link obeys, checked by Monte Carlo.
    IidModel link;
    link.num_cells = 1;
    link.k_factor_linear = std::pow(10.0, 0.47);
    link.snr_linear = 10.0;
    link.bandwidth_hz = 1.2e7;
    double const gamma = std::expm1(link.spectral_rate() * std::log(2.0)) / link.snr_linear;
    RandomStream rng(77, StreamTag::synthetic, 0);
    int const n = 400000;
    int outages = 0;
    for (int i = 0; i < n; ++i)
        outages += std::norm(draw_small_scale(true, link.k_factor_linear, rng)) < gamma;
    double const mc = static_cast<double>(outages) / n;
    double const se = std::sqrt(mc * (1 - mc) / n);
    double const z = (link_outage(link).outage - mc) / se;
    bool const convention_ok = std::abs(z) < 4.0;
    v.pass = v.pass && convention_ok;
    d << "sqrt(2 kappa) convention gives " << standard.str() << "MHz; link convention test z="
      << fmt(z, 2) << (convention_ok ? "" : " FAILED");
    v.detail = d.str();
    return v;
}

Verdict closed_form_vs_enumeration()
{
    Verdict v;
    double worst = 0.0;
    int checked = 0;
    for (int c : {1, 2})
        for (int k : {1, 2, 3})
            for (double p : {0.3, 0.1, 0.05, 1e-2, 1e-3, 1e-4})
            {
                auto const pl = LinkOutage::from_outage(p);
                std::pair<double, double> const pairs[] = {
                    {std::exp(log_pf_orth(c, k, pl)),
                     testing::enumerate_failure(Protocol::orth_occupy_cows, c, k, p)},
                    {std::exp(log_pf_comp(c, k, pl)),
                     testing::enumerate_failure(Protocol::comp_occupy_cow, c, k, p)}};
                for (auto const& [closed, enumerated] : pairs)
                {
                    worst = std::max(worst, std::abs(closed - enumerated) / enumerated);
                    ++checked;
                }
            }
    v.pass = worst <= 1e-12;
    v.detail = std::to_string(checked) + " comparisons, worst relative difference " + fmt(worst, 3);
    return v;
}

Verdict analytic_vs_monte_carlo()
{
    ScenarioConfig cfg;
    cfg.channel_mode = ChannelMode::iid;
    cfg.num_cells = 4;
    cfg.actuators_per_cell = 30;
    set_average_link_snr_db(cfg, 10.0);
    auto const model = IidModel::from(cfg);

    Verdict v;
    std::ostringstream d;
    std::uint64_t seed = 100;
    for (auto p : {Protocol::orth_occupy_cows, Protocol::comp_occupy_cow, Protocol::occupy_cow})
    {
        d << to_string(p) << ":";
        for (double target : {5e-2, 1e-2, 2e-3})
        {
            auto const s = required_bandwidth(p, target, model);
            auto at = model;
            at.bandwidth_hz = s.bandwidth_hz;
            double const closed = analytic_failure(p, at).failure_probability();

            TrialPlan plan;
            plan.scenario = cfg;
            plan.scenario.bandwidth = s.bandwidth_hz;
            plan.protocol = p;
            // The closed forms model diversity as "any one copy suffices".
            plan.combining = Combining::selection;
            plan.max_trials = 100000;
            plan.master_seed = seed++;
            auto const r = estimate_pf(plan, engine_options());
            double const se = binomial_standard_error(closed, r.trials);
            double const z = (r.pf_estimate - closed) / se;
            // The occupy closed form is an upper bound: only excess counts.
            bool const ok = p == Protocol::occupy_cow ? z <= 3.0 : std::abs(z) <= 3.0;
            v.pass = v.pass && ok;
            d << " " << fmt(r.pf_estimate, 3) << " vs " << fmt(closed, 3) << " (z=" << fmt(z, 2)
              << (ok ? "" : " OUT") << ")";
        }
        d << "; ";
    }
    v.detail = d.str() + "selection combining, 1e5 trials per point";
    return v;
}

Verdict interference_floor()
{
    auto const preset = load_preset(scenario_path("fig2.json"));
    TrialPlan base;
    base.scenario = preset.scenario;
    base.protocol = Protocol::occupy_cow;
    base.treat_interference_as_noise = true;
    base.max_trials = 20000;
    base.master_seed = 2;
    set_average_link_snr_db(base.scenario, 20.0);

    Verdict v;
    auto near = base;
    near.scenario.cell_separation_m = 100.0;
    auto const r_near = estimate_pf(near, engine_options());
    auto far = base;
    far.scenario.cell_separation_m = 500.0;
    far.master_seed = 3;
    auto const r_far = estimate_pf(far, engine_options());
    v.pass = r_near.pf_estimate >= 0.2 && r_near.pf_estimate <= 0.35 && r_far.pf_estimate < 1e-3;
    v.detail = "D=100 m: " + fmt(r_near.pf_estimate, 3) + " [" + fmt(r_near.ci_low, 3) + ", "
               + fmt(r_near.ci_high, 3) + "] (want 0.2..0.35); D=500 m: " + fmt(r_far.pf_estimate, 3)
               + " (" + std::to_string(r_far.failures) + "/" + std::to_string(r_far.trials)
               + ", want < 1e-3)";
    return v;
}

Verdict reuse_spot_checks()
{
    struct Spot
    {
        Protocol protocol;
        int cells;
        double snr_db;
        double expected;
        double tolerance;
    };
    Spot const spots[] = {{Protocol::occupy_cow, 9, 5.0, 0.475, 0.05},
                          {Protocol::ic_ic, 9, -5.0, 0.125, 0.02},
                          {Protocol::ic_ic, 16, 0.0, 0.042, 0.01}};
    auto const preset = load_preset(scenario_path("fig3.json"));
    Verdict v;
    std::ostringstream d;
    std::uint64_t seed = 30;
    for (auto const& s : spots)
    {
        TrialPlan plan;
        plan.scenario = preset.scenario;
        plan.scenario.num_cells = s.cells;
        set_average_link_snr_db(plan.scenario, s.snr_db);
        plan.protocol = s.protocol;
        plan.max_trials = 10000;
        plan.master_seed = seed++;
        auto const r = estimate_pf(plan, engine_options());
        bool const ok = std::abs(r.pf_estimate - s.expected) <= s.tolerance;
        v.pass = v.pass && ok;
        d << to_string(s.protocol) << " C=" << s.cells << " " << fmt(s.snr_db, 2) << " dB: "
          << fmt(r.pf_estimate, 3) << " [" << fmt(r.ci_low, 3) << ", " << fmt(r.ci_high, 3)
          << "] want " << s.expected << "+-" << s.tolerance << (ok ? "" : " OUT") << "; ";
    }
    v.detail = d.str() + "1e4 trials each";
    return v;
}

Verdict protocol_ordering()
{
    auto const preset = load_preset(scenario_path("fig4_scaled.json"));
    double const target = preset.target_pf.value_or(1e-2);
    auto const search = preset.search.value_or(McBandwidthSearch{});
    // Expected order, smallest bandwidth first.
    Protocol const order[] = {Protocol::ic_ic, Protocol::ic_ia, Protocol::comp_occupy_cow,
                              Protocol::occupy_cow};
    Verdict v;
    std::ostringstream d;
    for (double c : preset.num_cells)
    {
        std::vector<McBandwidthResult> results;
        d << "C=" << c << ":";
        for (auto p : order)
        {
            TrialPlan plan;
            plan.scenario = preset.scenario;
            plan.scenario.num_cells = static_cast<int>(c);
            set_average_link_snr_db(plan.scenario, preset.snr_db.at(0));
            plan.protocol = p;
            plan.master_seed = 40 + static_cast<int>(c);
            results.push_back(required_bandwidth_mc(plan, target, search, engine_options()));
            auto const& r = results.back();
            d << " " << to_string(p) << " " << fmt(r.bandwidth_hz / 1e6, 3) << " MHz ["
              << fmt(r.bracket_low_hz / 1e6, 3) << ", " << fmt(r.bracket_high_hz / 1e6, 3) << "]"
              << (r.indeterminate ? "?" : "") << (r.reachable ? "" : " unreachable");
        }
        // A bracket's low end was shown above the target and its high end below
        // it. Brackets that only touch therefore separate: at the shared
        // bandwidth one protocol is resolved above and the other below.
        for (std::size_t i = 0; i + 1 < results.size(); ++i)
        {
            auto const& a = results[i];
            auto const& b = results[i + 1];
            bool const ok = a.reachable && b.reachable
                            && (a.bandwidth_hz <= b.bandwidth_hz || a.bracket_low_hz < b.bracket_high_hz);
            if (!ok)
            {
                v.pass = false;
                d << " [" << to_string(order[i]) << " > " << to_string(order[i + 1]) << "]";
            }
        }
        d << "; ";
    }
    v.detail = d.str() + "target " + fmt(target, 2);
    return v;
}

Verdict sic_properties()
{
    auto const suite = testing::run_sic_property_suite(2000);
    auto const hand = testing::run_hand_traces();
    Verdict v;
    v.pass = suite.ok && hand.ok;
    v.detail = std::to_string(suite.checked) + " SIC steps replayed"
               + (suite.ok ? "" : " (" + suite.detail + ")") + "; "
               + std::to_string(hand.checked) + " hand-trace checks"
               + (hand.ok ? "" : " (" + hand.detail + ")");
    return v;
}

Verdict determinism()
{
    SweepGrid grid;
    grid.base.scenario.num_cells = 4;
    grid.base.scenario.actuators_per_cell = 10;
    grid.base.scenario.bandwidth = 10e6;
    grid.base.max_trials = 3000;
    grid.base.master_seed = 8;
    grid.protocols = {kAllProtocols, kAllProtocols + 5};
    grid.snr_db = {0.0, 10.0};

    auto render = [&](int threads) {
        std::ostringstream os;
        os << kSweepCsvHeader << '\n';
        for (auto const& r : sweep(grid, EngineOptions{threads, 512}))
            write_sweep_row(os, r);
        return os.str();
    };
    auto const one = render(1);
    auto const four = render(4);
    auto const eight = render(8);
    auto const again = render(1);
    Verdict v;
    v.pass = one == four && one == eight && one == again;
    v.detail = std::to_string(one.size()) + " bytes, 10 points, FNV-1a " + hex64(fnv1a64(one))
               + (v.pass ? " identical" : " DIFFER") + " at 1, 4, 8 workers and on rerun";
    return v;
}

}  // namespace

int main(int argc, char** argv)
{
    struct Criterion
    {
        char const* name;
        std::function<Verdict()> run;
    };
    std::vector<Criterion> const criteria = {
        {"analytic required bandwidth", analytic_bandwidths},
        {"closed form vs enumeration", closed_form_vs_enumeration},
        {"analytic vs Monte Carlo (i.i.d. gains)", analytic_vs_monte_carlo},
        {"interference-as-noise floor", interference_floor},
        {"full-reuse spot checks", reuse_spot_checks},
        {"protocol ordering at 1e-2", protocol_ordering},
        {"SIC properties and hand traces", sic_properties},
        {"determinism across workers", determinism},
    };

    std::set<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.insert(std::atoi(argv[i]));

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        int const number = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.count(number))
            continue;
        auto const start = std::chrono::steady_clock::now();
        Verdict v;
        try
        {
            v = criteria[i].run();
        }
        catch (std::exception const& e)
        {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::chrono::duration<double> const wall = std::chrono::steady_clock::now() - start;
        failed += v.pass ? 0 : 1;
        std::cout << (v.pass ? "PASS" : "FAIL") << " [" << number << "] " << criteria[i].name << ": "
                  << v.detail << " (" << fmt(wall.count(), 3) << " s)" << std::endl;
    }
    return failed;
}
