#include "trotbo/cli.hpp"

#include "trotbo/analysis.hpp"
#include "trotbo/bench.hpp"
#include "trotbo/csv_io.hpp"
#include "trotbo/scaffold_experiment.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>

namespace trotbo::cli {

namespace fs = std::filesystem;

namespace {

void write_metrics(std::ostream& os, const std::string& prefix, const analysis::TraceMetrics& m) {
    os << prefix << "vertical_delta_m = " << io::format_number(m.vertical_delta) << '\n';
    os << prefix << "dominant_period_s = " << (m.dominant_period ? io::format_number(*m.dominant_period) : "none")
       << '\n';
    os << prefix << "mean_fitness = " << io::format_number(m.mean_fitness) << '\n';
    os << prefix << "termination = " << m.termination << '\n';
}

void write_params(std::ostream& os, const std::string& prefix, const bo::ParamVector& p) {
    const auto a = p.as_array();
    for (std::size_t d = 0; d < a.size(); ++d) os << prefix << 'x' << d << " = " << io::format_number(a[d]) << '\n';
}

std::ofstream open_text(const fs::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw io::IoError("cannot open '" + path.string() + "' for writing");
    return os;
}

std::optional<double> parse_height(const std::string& s) {
    if (s == "none") return std::nullopt;
    std::size_t pos = 0;
    double h = 0.0;
    try {
        h = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || !(h > 0.0)) throw CLI::ValidationError("--height", "expected a positive height in meters or 'none'");
    return h;
}

// ---------------------------------------------------------------------------

struct RunArgs {
    std::string condition = "red";
    int iters = experiment::kScheduleLength;
    std::uint64_t seed = 0;
    std::string out;
    std::string config;
};

int do_run(const RunArgs& a, std::ostream& out) {
    experiment::ExperimentConfig cfg;
    if (!a.config.empty()) experiment::apply_settings(cfg, io::read_key_values(a.config));
    cfg.condition = experiment::parse_condition(a.condition);
    cfg.n_iter = a.iters;
    cfg.seed = a.seed;
    cfg.keep_traces = false;
    cfg.validate();

    const fs::path dir(a.out);
    fs::create_directories(dir);

    std::optional<sim::TrialTrace> best_trace;
    double best_fitness = -1.0;
    auto on_iteration = [&](const bo::HistoryRecord& r, const sim::TrialTrace& trace) {
        io::export_trace(dir / ("trace_iter_" + std::to_string(r.iteration) + ".csv"), trace);
        if (r.fitness > best_fitness) {
            best_fitness = r.fitness;
            best_trace = trace;
        }
        out << "iter " << r.iteration << "  height "
            << (r.support_height_m ? io::format_number(*r.support_height_m) : std::string("none")) << "  fitness "
            << io::format_number(r.fitness) << '\n';
    };

    experiment::ExperimentResult result;
    try {
        result = experiment::run_experiment(cfg, on_iteration);
    } catch (const bo::ObjectiveFailure& f) {
        io::export_history(dir / "history.csv", f.partial_history());
        throw;
    }

    io::export_history(dir / "history.csv", result.history);
    io::export_trace(dir / "p3_probe.csv", result.probe.trace);

    const auto& recs = result.history.records();
    const std::size_t p1 = result.history.argmax(recs.size());
    const std::size_t p2 = result.history.argmax(static_cast<std::size_t>(cfg.probe_window));
    const std::size_t tail = std::min<std::size_t>(10, recs.size());
    double final10 = -1.0;
    for (std::size_t i = recs.size() - tail; i < recs.size(); ++i) final10 = std::max(final10, recs[i].fitness);

    auto os = open_text(dir / "metrics.txt");
    os << "condition = " << experiment::to_string(cfg.condition) << '\n';
    os << "seed = " << cfg.seed << '\n';
    os << "iterations = " << recs.size() << '\n';
    os << "p1_iteration = " << recs[p1].iteration << '\n';
    os << "p1_fitness = " << io::format_number(recs[p1].fitness) << '\n';
    write_params(os, "p1_", recs[p1].params);
    os << "p2_iteration = " << recs[p2].iteration << '\n';
    os << "p2_fitness = " << io::format_number(recs[p2].fitness) << '\n';
    os << "p3_height_m = " << io::format_number(result.probe.height_m) << '\n';
    os << "p3_fitness = " << io::format_number(result.probe.fitness) << '\n';
    os << "final10_best_fitness = " << io::format_number(final10) << '\n';
    if (best_trace) write_metrics(os, "p1_trace_", analysis::trace_metrics(*best_trace, cfg.trial.model));
    write_metrics(os, "p3_trace_", analysis::trace_metrics(result.probe.trace, cfg.trial.model));

    out << "best fitness " << io::format_number(recs[p1].fitness) << " at iteration " << recs[p1].iteration
        << "; P3 probe fitness " << io::format_number(result.probe.fitness) << '\n';
    return kExitOk;
}

struct ReplayArgs {
    std::string params;
    std::string height = "0.325";
    double duration = 15.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string config;
};

int do_replay(const ReplayArgs& a, std::ostream& out) {
    experiment::ExperimentConfig cfg;
    if (!a.config.empty()) experiment::apply_settings(cfg, io::read_key_values(a.config));
    cfg.trial.duration_s = a.duration;
    const bo::ParamVector p = io::read_params(a.params);
    if (!cfg.bo.bounds.contains(p)) throw std::invalid_argument("parameters outside the search box");

    const auto h = parse_height(a.height);
    sim::SupportConfig sup = cfg.rope;
    sup.enabled = h.has_value();
    sup.height_m = h.value_or(0.0);

    const fs::path dir(a.out);
    fs::create_directories(dir);
    const sim::TrialTrace trace = sim::run_trial(p, sup, cfg.trial, a.seed);
    io::export_trace(dir / "trace.csv", trace);

    const auto m = analysis::trace_metrics(trace, cfg.trial.model);
    auto os = open_text(dir / "metrics.txt");
    write_params(os, "", p);
    os << "height_m = " << (h ? io::format_number(*h) : std::string("none")) << '\n';
    os << "seed = " << a.seed << '\n';
    os << "fitness = " << io::format_number(experiment::compute_fitness(trace, cfg.trial.model, cfg.metric)) << '\n';
    write_metrics(os, "", m);
    write_metrics(out, "", m);
    return kExitOk;
}

int do_analyze(const std::string& trace_path, double duration, std::ostream& out) {
    const sim::TrialTrace trace = io::trace_from_table(io::read_csv(trace_path), duration);
    write_metrics(out, "", analysis::trace_metrics(trace, sim::RobotModel{}));
    return kExitOk;
}

int do_bench(const std::string& objective, int iters, int seeds, std::ostream& out) {
    const auto obj = bench::parse_objective(objective);
    const auto report = bench::run_bench(obj, iters, seeds);
    out << "seed,bo_best,bo_best_x0,bo_evals_to_success,random_best,random_best_x0,random_evals_to_success\n";
    bool monotone = true;
    for (const auto& s : report.seeds) {
        out << s.seed << ',' << io::format_number(s.bo_best) << ',' << io::format_number(s.bo_best_params.hop_height_mm)
            << ',' << s.bo_evals_to_success << ',' << io::format_number(s.random_best) << ','
            << io::format_number(s.random_best_params.hop_height_mm) << ',' << s.random_evals_to_success << '\n';
        monotone = monotone && s.bo_curve_monotone && s.random_curve_monotone;
    }
    auto mean = [&](auto field) {
        double sum = 0.0;
        for (const auto& s : report.seeds) sum += field(s);
        return report.seeds.empty() ? 0.0 : sum / static_cast<double>(report.seeds.size());
    };
    out << "bo: " << report.bo_successes() << '/' << report.seeds.size() << " seeds reached the target region, mean best "
        << io::format_number(mean([](const bench::SeedOutcome& s) { return s.bo_best; })) << '\n';
    out << "random: " << report.random_successes() << '/' << report.seeds.size()
        << " seeds reached the target region, mean best "
        << io::format_number(mean([](const bench::SeedOutcome& s) { return s.random_best; })) << '\n';
    out << "best-so-far curves monotone: " << (monotone ? "yes" : "no") << '\n';
    return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Scaffolded Bayesian optimization of an in-place quadruped trot"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run one BO experiment under a support schedule");
    run_cmd->add_option("--condition", run.condition, "Support schedule")
        ->check(CLI::IsMember({"min", "red", "none"}))
        ->required();
    run_cmd->add_option("--iters", run.iters, "BO iterations")->check(CLI::Range(1, 100000));
    run_cmd->add_option("--seed", run.seed, "Seed");
    run_cmd->add_option("--out", run.out, "Output directory")->required();
    run_cmd->add_option("--config", run.config, "key = value settings file")->check(CLI::ExistingFile);

    ReplayArgs replay;
    auto* replay_cmd = app.add_subcommand("replay", "Re-run one parameter vector at a fixed support height");
    replay_cmd->add_option("--params", replay.params, "Parameter file with x0..x4")->required()->check(CLI::ExistingFile);
    replay_cmd->add_option("--height", replay.height, "Rope height in meters, or 'none'");
    replay_cmd->add_option("--duration", replay.duration, "Trial duration in seconds")->check(CLI::PositiveNumber);
    replay_cmd->add_option("--seed", replay.seed, "Seed");
    replay_cmd->add_option("--out", replay.out, "Output directory")->required();
    replay_cmd->add_option("--config", replay.config, "key = value settings file")->check(CLI::ExistingFile);

    std::string trace_path;
    double analyze_duration = 15.0;
    auto* analyze_cmd = app.add_subcommand("analyze", "Print metrics for an exported trace CSV");
    analyze_cmd->add_option("--trace", trace_path, "Trace CSV")->required()->check(CLI::ExistingFile);
    analyze_cmd->add_option("--duration", analyze_duration, "Intended trial duration in seconds")
        ->check(CLI::PositiveNumber);

    std::string objective = "quad1d";
    int bench_iters = 30;
    int bench_seeds = 10;
    auto* bench_cmd = app.add_subcommand("bo-bench", "BO vs random search on synthetic objectives");
    bench_cmd->add_option("--objective", objective, "Objective")->check(CLI::IsMember({"quad1d", "sphere5d"}));
    bench_cmd->add_option("--iters", bench_iters, "Evaluations per seed")->check(CLI::Range(5, 100000));
    bench_cmd->add_option("--seeds", bench_seeds, "Number of seeds")->check(CLI::Range(1, 100000));

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::Success&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (run_cmd->parsed()) return do_run(run, out);
        if (replay_cmd->parsed()) return do_replay(replay, out);
        if (analyze_cmd->parsed()) return do_analyze(trace_path, analyze_duration, out);
        if (bench_cmd->parsed()) return do_bench(objective, bench_iters, bench_seeds, out);
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

int cli_main(int argc, const char* const* argv) {
    std::vector<std::string> args(argv, argv + argc);
    return cli_main(args, std::cout, std::cerr);
}

}  // namespace trotbo::cli
