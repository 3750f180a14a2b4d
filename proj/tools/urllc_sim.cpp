// Copyright 2026 The urllc-sim Authors
// SPDX-License-Identifier: Apache-2.0
//
// urllc-sim: analytic and Monte Carlo failure probabilities of the multi-cell
// Occupy CoW family of protocols.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI/CLI.hpp>

#include "urllc/analytics/iid_analysis.hpp"
#include "urllc/core/config.hpp"
#include "urllc/core/layout.hpp"
#include "urllc/io/output.hpp"
#include "urllc/io/preset.hpp"
#include "urllc/montecarlo/engine.hpp"
#include "urllc/protocols/protocols.hpp"

namespace fs = std::filesystem;
using namespace urllc;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIncomplete = 3;

class UsageError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct GlobalFlags
{
    std::string scenario_path;
    std::optional<std::uint64_t> seed;
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::string out_dir = ".";
    bool timing = false;
};

/// Scenario fields that can be overridden from the command line. Strings are
/// parsed after CLI11 so that SI suffixes work everywhere.
struct ScenarioFlags
{
    std::string actuators_per_cell;
    std::string message_bits;
    std::string cycle_time;
    std::string kfactor_db;
    std::string layout_kind;
    std::string channel_mode;
    std::string min_distance;
    std::string cell_side;
};

struct AxisFlags
{
    std::vector<std::string> protocols;
    std::string cells;
    std::string snr;
    std::string bandwidth;
    std::string separation;
    std::vector<std::string> grid;  ///< "key=axis" with key in snr, W, C, D

    void expand_grid()
    {
        for (auto const& item : grid)
        {
            auto const eq = item.find('=');
            if (eq == std::string::npos)
                throw UsageError("--grid expects key=values, got '" + item + "'");
            auto const key = item.substr(0, eq);
            std::string* slot = key == "snr" ? &snr
                                : key == "W" ? &bandwidth
                                : key == "C" ? &cells
                                : key == "D" ? &separation
                                             : nullptr;
            if (!slot)
                throw UsageError("--grid key must be snr, W, C or D, got '" + key + "'");
            if (!slot->empty())
                throw UsageError("axis '" + key + "' given twice");
            *slot = item.substr(eq + 1);
            if (slot->empty())
                throw UsageError("empty grid for " + key);
        }
    }
};

struct TrialFlags
{
    std::string trials;
    std::string max_failures;
    bool fixed_layout = false;
    bool interference_as_noise = false;
    std::string combining;
};

struct SearchFlags
{
    std::string target;
    std::string min_hz;
    std::string max_hz;
    std::string rel_tol;
    std::string initial_trials;
    std::string max_trials_per_point;
    std::string los_argument;
};

void add_scenario_flags(CLI::App* app, ScenarioFlags& f)
{
    app->add_option("--K", f.actuators_per_cell, "Actuators per cell");
    app->add_option("--bits", f.message_bits, "Message size b in bits");
    app->add_option("--cycle-time", f.cycle_time, "Cycle time T in seconds");
    app->add_option("--kfactor-db", f.kfactor_db, "Rician K-factor of LOS links in dB");
    app->add_option("--layout", f.layout_kind, "dense_grid or wraparound_grid");
    app->add_option("--channel-mode", f.channel_mode, "distance or iid");
    app->add_option("--min-distance", f.min_distance, "Distance clamp in metres");
    app->add_option("--cell-side", f.cell_side, "Cell side in metres");
}

void add_trial_flags(CLI::App* app, TrialFlags& f)
{
    app->add_option("--trials", f.trials, "Trials per point (SI suffixes allowed)");
    app->add_option("--max-failures", f.max_failures, "Stop a point after this many failures");
    app->add_flag("--fixed-layout", f.fixed_layout, "Keep one actuator layout for all trials");
    app->add_flag("--interference-as-noise", f.interference_as_noise,
                  "Occupy CoW with full reuse and inter-cell interference treated as noise");
    app->add_option("--combining", f.combining,
                    "power_sum (default) or selection: how copies of a message combine");
}

std::uint64_t parse_count(std::string const& s, char const* what)
{
    double const v = parse_si_number(s);
    if (!(v >= 0) || v != std::floor(v) || v > 1.8e19)
        throw UsageError(std::string(what) + " must be a non-negative integer, got '" + s + "'");
    return static_cast<std::uint64_t>(v);
}

int parse_int(double v, char const* what)
{
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw UsageError(std::string(what) + " must be an integer");
    return static_cast<int>(v);
}

void apply(ScenarioFlags const& f, ScenarioConfig& cfg)
{
    if (!f.actuators_per_cell.empty())
        cfg.actuators_per_cell = parse_int(parse_si_number(f.actuators_per_cell), "--K");
    if (!f.message_bits.empty())
        cfg.message_bits = parse_si_number(f.message_bits);
    if (!f.cycle_time.empty())
        cfg.cycle_time = parse_si_number(f.cycle_time);
    if (!f.kfactor_db.empty())
        cfg.rician_k_factor_db = parse_si_number(f.kfactor_db);
    if (!f.layout_kind.empty())
        cfg.layout_kind = parse_layout_kind(f.layout_kind);
    if (!f.channel_mode.empty())
        cfg.channel_mode = parse_channel_mode(f.channel_mode);
    if (!f.min_distance.empty())
        cfg.min_distance_m = parse_si_number(f.min_distance);
    if (!f.cell_side.empty())
        cfg.cell_side_m = parse_si_number(f.cell_side);
}

/// Flag value if given, else preset value, else the scenario value.
std::vector<double> axis_or(std::string const& flag, std::vector<double> const& preset,
                            double fallback, char const* name)
{
    std::vector<double> values;
    if (!flag.empty())
        values = parse_axis(flag);
    else if (!preset.empty())
        values = preset;
    else
        values = {fallback};
    if (values.empty())
        throw UsageError(std::string("empty grid for ") + name);
    return values;
}

std::vector<Protocol> protocols_or(std::vector<std::string> const& flag,
                                   std::vector<Protocol> const& preset, Protocol fallback)
{
    std::vector<Protocol> out;
    for (auto const& name : flag)
        out.push_back(parse_protocol(name));
    if (out.empty())
        out = preset;
    if (out.empty())
        out = {fallback};
    return out;
}

struct Context
{
    GlobalFlags const& global;
    std::vector<std::string> const& argv;
    RunPreset preset;
    std::uint64_t seed = 1;
    fs::path out_dir;

    std::ofstream open_output(fs::path const& name) const
    {
        std::ofstream os(out_dir / name);
        if (!os)
            throw std::runtime_error("cannot write '" + (out_dir / name).string() + "'");
        return os;
    }
};

Context make_context(GlobalFlags const& g, std::vector<std::string> const& argv,
                     std::string_view command)
{
    Context ctx{g, argv, {}, 1, fs::path(g.out_dir)};
    if (!g.scenario_path.empty())
    {
        if (!fs::exists(g.scenario_path))
            throw UsageError("scenario file '" + g.scenario_path + "' does not exist");
        ctx.preset = load_preset(g.scenario_path);
        if (ctx.preset.command && *ctx.preset.command != command)
            std::cerr << "note: preset is meant for '" << *ctx.preset.command << "', running '"
                      << command << "'\n";
    }
    ctx.seed = g.seed.value_or(ctx.preset.seed.value_or(1));
    if (g.threads < 1)
        throw UsageError("--threads must be >= 1");
    fs::create_directories(ctx.out_dir);
    return ctx;
}

TrialPlan base_plan(Context const& ctx, ScenarioFlags const& sf, TrialFlags const& tf)
{
    TrialPlan plan;
    plan.scenario = ctx.preset.scenario;
    apply(sf, plan.scenario);
    plan.master_seed = ctx.seed;
    plan.max_trials = ctx.preset.trials.value_or(10000);
    if (!tf.trials.empty())
        plan.max_trials = parse_count(tf.trials, "--trials");
    plan.max_failures = ctx.preset.max_failures.value_or(0);
    if (!tf.max_failures.empty())
        plan.max_failures = parse_count(tf.max_failures, "--max-failures");
    plan.redraw_layout_each_trial = ctx.preset.redraw_layout_each_trial.value_or(true);
    if (tf.fixed_layout)
        plan.redraw_layout_each_trial = false;
    plan.treat_interference_as_noise =
        tf.interference_as_noise || ctx.preset.treat_interference_as_noise.value_or(false);
    plan.combining = ctx.preset.combining.value_or(Combining::power_sum);
    if (!tf.combining.empty())
        plan.combining = parse_combining(tf.combining);
    return plan;
}

//---------------------------------------------------------------------------//

int cmd_analytic(Context const& ctx, ScenarioFlags const& sf, AxisFlags const& af,
                 SearchFlags const& search_flags)
{
    ScenarioConfig base = ctx.preset.scenario;
    apply(sf, base);
    auto const protocols = protocols_or(af.protocols, ctx.preset.protocols, Protocol::occupy_cow);
    for (auto p : protocols)
        if (uses_interference_cancellation(p))
            throw UsageError("no closed form exists for " + std::string(to_string(p))
                             + ": the analysis covers orth, occupy and comp only; use simulate or "
                               "sweep for the interference-cancellation protocols");
    auto const cells = axis_or(af.cells, ctx.preset.num_cells, base.num_cells, "--C");
    auto const snrs = axis_or(af.snr, ctx.preset.snr_db, 10.0, "--snr");
    double target = ctx.preset.target_pf.value_or(1e-9);
    if (!search_flags.target.empty())
        target = parse_si_number(search_flags.target);
    if (!(target > 0.0 && target < 1.0))
        throw UsageError("--target must lie strictly between 0 and 1");
    auto los = ctx.preset.los_argument.value_or(LosArgument::sqrt_kappa);
    if (!search_flags.los_argument.empty())
        los = parse_los_argument(search_flags.los_argument);

    RunManifest manifest(ctx.out_dir / "manifest.json", ctx.argv, base, ctx.seed);
    manifest.set("command", "analytic");
    manifest.set("los_argument", std::string(to_string(los)));
    manifest.set("target_pf", target);
    auto os = ctx.open_output("analytic.csv");
    manifest.add_output("analytic.csv");
    os << kAnalyticCsvHeader << '\n';
    int unreachable = 0;
    for (auto p : protocols)
        for (double c : cells)
            for (double snr : snrs)
            {
                AnalyticRow row;
                row.protocol = p;
                row.snr_db = snr;
                row.target_pf = target;
                row.scenario = base;
                row.scenario.num_cells = parse_int(c, "--C");
                auto model = IidModel::from(row.scenario, los);
                model.snr_linear = std::pow(10.0, snr / 10.0);
                row.solution = required_bandwidth(p, target, model);
                unreachable += row.solution.reachable ? 0 : 1;
                write_analytic_row(os, row);
            }
    os.flush();
    manifest.finish(unreachable ? "incomplete" : "complete");
    std::cout << "analytic: " << protocols.size() * cells.size() * snrs.size() << " rows -> "
              << (ctx.out_dir / "analytic.csv").string() << '\n';
    if (unreachable)
        std::cerr << unreachable << " point(s) unreachable within the bandwidth bracket\n";
    return unreachable ? kExitIncomplete : 0;
}

int cmd_simulate(Context const& ctx, ScenarioFlags const& sf, AxisFlags const& af,
                 TrialFlags const& tf, std::string const& trace_path, std::uint64_t trace_trial)
{
    if (ctx.global.scenario_path.empty())
        throw UsageError("simulate needs --scenario <file>");
    auto plan = base_plan(ctx, sf, tf);
    auto const protocols = protocols_or(af.protocols, ctx.preset.protocols, plan.protocol);
    auto const cells = axis_or(af.cells, ctx.preset.num_cells, plan.scenario.num_cells, "--C");
    auto const bws = axis_or(af.bandwidth, ctx.preset.bandwidth_hz, plan.scenario.bandwidth, "--W");
    auto const snrs = axis_or(af.snr, ctx.preset.snr_db, average_link_snr_db(plan.scenario), "--snr");
    auto const seps = axis_or(af.separation, ctx.preset.separation_m,
                              plan.scenario.cell_separation_m, "--D");
    if (protocols.size() != 1 || cells.size() != 1 || bws.size() != 1 || snrs.size() != 1
        || seps.size() != 1)
        throw UsageError("simulate runs a single point; use sweep for grids");
    plan.protocol = protocols.front();
    plan.scenario.num_cells = parse_int(cells.front(), "--C");
    plan.scenario.bandwidth = bws.front();
    plan.scenario.cell_separation_m = seps.front();
    set_average_link_snr_db(plan.scenario, snrs.front());
    validate(plan);

    RunManifest manifest(ctx.out_dir / "manifest.json", ctx.argv, plan.scenario, plan.master_seed);
    manifest.set("command", "simulate");
    manifest.set("protocol", std::string(to_string(plan.protocol)));
    manifest.add_point_seed(plan.master_seed);
    EngineOptions opts;
    opts.threads = ctx.global.threads;
    auto const result = estimate_pf(plan, opts);
    manifest.set("wall_s", result.wall_time_s);
    {
        auto os = ctx.open_output("simulate.csv");
        os << kSweepCsvHeader << '\n';
        write_sweep_row(os, result, ctx.global.timing);
    }
    manifest.add_output("simulate.csv");
    if (!trace_path.empty())
    {
        TrialRunner const runner(plan);
        auto params = ProtocolParams::from(plan.scenario, plan.protocol);
        params.treat_interference_as_noise = plan.treat_interference_as_noise;
        params.combining = plan.combining;
        params.collect_trace = true;
        auto const outcome = run_protocol(params, runner.channels_for(trace_trial));
        auto os = ctx.open_output(trace_path);
        write_trace_jsonl(os, outcome, plan.scenario.actuators_per_cell);
        manifest.add_output(trace_path);
    }
    manifest.finish("complete");
    std::cout << to_string(plan.protocol) << " C=" << plan.scenario.num_cells
              << " snr=" << format_number(snrs.front()) << " dB: pf=" << format_number(result.pf_estimate)
              << " [" << format_number(result.ci_low) << ", " << format_number(result.ci_high)
              << "] over " << result.trials << " trials\n";
    return 0;
}

int cmd_sweep(Context const& ctx, ScenarioFlags const& sf, AxisFlags const& af,
              TrialFlags const& tf, SearchFlags const& search_flags)
{
    auto plan = base_plan(ctx, sf, tf);
    SweepGrid grid;
    grid.base = plan;
    grid.protocols = protocols_or(af.protocols, ctx.preset.protocols, plan.protocol);
    for (double c : axis_or(af.cells, ctx.preset.num_cells, plan.scenario.num_cells, "--C"))
        grid.num_cells.push_back(parse_int(c, "--C"));
    grid.separations_m = axis_or(af.separation, ctx.preset.separation_m,
                                 plan.scenario.cell_separation_m, "--D");
    grid.bandwidths_hz = axis_or(af.bandwidth, ctx.preset.bandwidth_hz, plan.scenario.bandwidth, "--W");
    grid.snr_db = axis_or(af.snr, ctx.preset.snr_db, average_link_snr_db(plan.scenario), "--snr");

    std::optional<double> target = ctx.preset.target_pf;
    if (!search_flags.target.empty())
        target = parse_si_number(search_flags.target);
    auto const points = grid.points();
    for (auto const& p : points)
        validate(p);

    EngineOptions opts;
    opts.threads = ctx.global.threads;
    RunManifest manifest(ctx.out_dir / "manifest.json", ctx.argv, plan.scenario, plan.master_seed);
    manifest.set("command", "sweep");
    manifest.set("grid_points", points.size());
    for (auto const& p : points)
        manifest.add_point_seed(p.master_seed);

    if (!target)
    {
        auto os = ctx.open_output("sweep.csv");
        manifest.add_output("sweep.csv");
        os << kSweepCsvHeader << '\n' << std::flush;
        std::size_t done = 0;
        sweep(grid, opts, [&](SweepResult const& r) {
            write_sweep_row(os, r, ctx.global.timing);
            os.flush();
            std::cerr << '[' << ++done << '/' << points.size() << "] " << to_string(r.protocol)
                      << " C=" << r.num_cells << " W=" << format_number(r.bandwidth_hz)
                      << " snr=" << format_number(r.snr_db) << " D=" << format_number(r.separation_m)
                      << " pf=" << format_number(r.pf_estimate) << '\n';
        });
        manifest.finish("complete");
        std::cout << "sweep: " << points.size() << " rows -> "
                  << (ctx.out_dir / "sweep.csv").string() << '\n';
        return 0;
    }

    // Required-bandwidth search at each (protocol, C, D, SNR); the W axis is
    // replaced by the search bracket.
    if (!(*target > 0.0 && *target <= 1.0))
        throw UsageError("--target must lie in (0, 1]");
    McBandwidthSearch search = ctx.preset.search.value_or(McBandwidthSearch{});
    if (!search_flags.min_hz.empty())
        search.min_hz = parse_si_number(search_flags.min_hz);
    if (!search_flags.max_hz.empty())
        search.max_hz = parse_si_number(search_flags.max_hz);
    if (!search_flags.rel_tol.empty())
        search.rel_tol = parse_si_number(search_flags.rel_tol);
    if (!search_flags.initial_trials.empty())
        search.initial_trials = parse_count(search_flags.initial_trials, "--initial-trials");
    if (!search_flags.max_trials_per_point.empty())
        search.max_trials_per_point =
            parse_count(search_flags.max_trials_per_point, "--max-trials-per-point");
    if (!(search.min_hz > 0 && search.max_hz > search.min_hz && search.rel_tol > 0))
        throw UsageError("search bracket must satisfy 0 < min-hz < max-hz and rel-tol > 0");
    manifest.set("target_pf", *target);
    manifest.set("search", {{"min_hz", search.min_hz},
                            {"max_hz", search.max_hz},
                            {"rel_tol", search.rel_tol},
                            {"initial_trials", search.initial_trials},
                            {"max_trials_per_point", search.max_trials_per_point}});

    grid.bandwidths_hz = {search.min_hz};
    auto const search_points = grid.points();
    auto os = ctx.open_output("required_bandwidth.csv");
    manifest.add_output("required_bandwidth.csv");
    os << kRequiredBandwidthCsvHeader << '\n' << std::flush;
    int incomplete = 0;
    std::size_t done = 0;
    for (auto const& p : search_points)
    {
        auto const r = required_bandwidth_mc(p, *target, search, opts);
        write_required_bandwidth_row(os, p, *target, r);
        os.flush();
        incomplete += (r.indeterminate || !r.reachable) ? 1 : 0;
        std::cerr << '[' << ++done << '/' << search_points.size() << "] " << to_string(p.protocol)
                  << " C=" << p.scenario.num_cells
                  << " snr=" << format_number(average_link_snr_db(p.scenario))
                  << " W=" << format_number(r.bandwidth_hz) << " (" << search_status(r) << ")\n";
    }
    manifest.finish(incomplete ? "incomplete" : "complete");
    std::cout << "sweep: " << search_points.size() << " searches -> "
              << (ctx.out_dir / "required_bandwidth.csv").string() << '\n';
    if (incomplete)
        std::cerr << incomplete << " search(es) indeterminate or unreachable\n";
    return incomplete ? kExitIncomplete : 0;
}

int cmd_layout(Context const& ctx, ScenarioFlags const& sf, AxisFlags const& af,
               std::uint64_t trial)
{
    ScenarioConfig cfg = ctx.preset.scenario;
    apply(sf, cfg);
    auto const cells = axis_or(af.cells, ctx.preset.num_cells, cfg.num_cells, "--C");
    auto const seps = axis_or(af.separation, ctx.preset.separation_m, cfg.cell_separation_m, "--D");
    if (cells.size() != 1 || seps.size() != 1)
        throw UsageError("layout takes a single --C and --D");
    cfg.num_cells = parse_int(cells.front(), "--C");
    cfg.cell_separation_m = seps.front();
    if (cfg.channel_mode == ChannelMode::iid)
        throw UsageError("layout: i.i.d. channel mode has no geometry");
    validate(cfg);

    RunManifest manifest(ctx.out_dir / "manifest.json", ctx.argv, cfg, ctx.seed);
    manifest.set("command", "layout");
    manifest.set("trial", trial);
    RandomStream rng(derive_seed(ctx.seed, trial), StreamTag::layout, 0);
    auto const layout = build_layout(cfg, rng);
    {
        auto os = ctx.open_output("layout.csv");
        write_layout_csv(os, layout);
    }
    manifest.add_output("layout.csv");
    manifest.finish("complete");
    std::cout << "layout: " << layout.controller_positions.size() << " controllers, "
              << layout.actuator_positions.size() << " actuators -> "
              << (ctx.out_dir / "layout.csv").string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    std::vector<std::string> const args(argv, argv + argc);
    CLI::App app{"Failure probabilities of multi-cell ultrareliable downlink protocols"};
    app.set_version_flag("--version", std::string(URLLC_VERSION));
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags g;
    std::uint64_t seed = 0;
    app.add_option("--scenario", g.scenario_path, "Scenario or preset JSON file");
    auto* seed_opt = app.add_option("--seed", seed, "Master seed");
    app.add_option("--threads", g.threads, "Worker threads (results do not depend on it)");
    app.add_option("--out", g.out_dir, "Output directory");
    app.add_flag("--timing", g.timing, "Write measured wall time into wall_s");

    ScenarioFlags sf;
    AxisFlags af;
    TrialFlags tf;
    SearchFlags search;

    auto* analytic = app.add_subcommand("analytic", "Closed-form bandwidth for a target P_F");
    add_scenario_flags(analytic, sf);
    analytic->add_option("--protocol", af.protocols, "orth, occupy or comp (repeatable)")->delimiter(',');
    analytic->add_option("--C", af.cells, "Cells: list or start:stop:step");
    analytic->add_option("--snr", af.snr, "SNR grid in dB");
    analytic->add_option("--target", search.target, "Target failure probability");
    analytic->add_option("--los-argument", search.los_argument, "sqrt_kappa or sqrt_two_kappa");

    std::string trace_path;
    std::uint64_t trace_trial = 0;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate at one point");
    add_scenario_flags(simulate, sf);
    add_trial_flags(simulate, tf);
    simulate->add_option("--protocol", af.protocols, "Protocol");
    simulate->add_option("--C", af.cells, "Cells");
    simulate->add_option("--W", af.bandwidth, "Bandwidth in Hz");
    simulate->add_option("--snr", af.snr, "Average link SNR in dB");
    simulate->add_option("--D", af.separation, "Cell separation in metres");
    simulate->add_option("--trace", trace_path, "Write a JSON-lines decode trace to this file");
    simulate->add_option("--trace-trial", trace_trial, "Trial index to trace");

    auto* sweep_cmd = app.add_subcommand("sweep", "Monte Carlo grid, or bandwidth search with --target");
    add_scenario_flags(sweep_cmd, sf);
    add_trial_flags(sweep_cmd, tf);
    sweep_cmd->add_option("--protocols,--protocol", af.protocols, "Protocols (repeatable)")->delimiter(',');
    sweep_cmd->add_option("--C", af.cells, "Cells grid");
    sweep_cmd->add_option("--W", af.bandwidth, "Bandwidth grid in Hz");
    sweep_cmd->add_option("--snr", af.snr, "SNR grid in dB");
    sweep_cmd->add_option("--D", af.separation, "Cell separation grid in metres");
    sweep_cmd->add_option("--grid", af.grid, "Axis as key=values, key in snr, W, C, D (repeatable)");
    sweep_cmd->add_option("--target", search.target, "Search the bandwidth meeting this P_F");
    sweep_cmd->add_option("--min-hz", search.min_hz, "Search bracket low end");
    sweep_cmd->add_option("--max-hz", search.max_hz, "Search bracket high end");
    sweep_cmd->add_option("--rel-tol", search.rel_tol, "Relative bracket width to stop at");
    sweep_cmd->add_option("--initial-trials", search.initial_trials, "Trials before the first CI test");
    sweep_cmd->add_option("--max-trials-per-point", search.max_trials_per_point,
                          "Trial cap per bandwidth evaluation");

    std::uint64_t layout_trial = 0;
    auto* layout = app.add_subcommand("layout", "Write the actuator layout of one trial as CSV");
    add_scenario_flags(layout, sf);
    layout->add_option("--C", af.cells, "Cells");
    layout->add_option("--D", af.separation, "Cell separation in metres");
    layout->add_option("--trial", layout_trial, "Trial index whose layout to export");

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }
    if (*seed_opt)
        g.seed = seed;

    try
    {
        if (*analytic)
            return cmd_analytic(make_context(g, args, "analytic"), sf, af, search);
        if (*simulate)
            return cmd_simulate(make_context(g, args, "simulate"), sf, af, tf, trace_path,
                                trace_trial);
        if (*sweep_cmd)
            af.expand_grid();
        if (*sweep_cmd)
            return cmd_sweep(make_context(g, args, "sweep"), sf, af, tf, search);
        if (*layout)
            return cmd_layout(make_context(g, args, "layout"), sf, af, layout_trial);
    }
    catch (UsageError const& e)
    {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (ConfigError const& e)
    {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}
