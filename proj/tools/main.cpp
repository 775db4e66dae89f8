#include <cstdio>
#include <filesystem>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rislab/config.hpp"
#include "rislab/harness.hpp"
#include "rislab/rl.hpp"
#include "rislab/traffic.hpp"

namespace {

using namespace rislab;

harness::ExperimentSpec build_spec(const std::string& preset,
                                   const std::string& config_path,
                                   std::uint64_t seed, bool seed_set,
                                   const std::string& out_dir) {
    harness::ExperimentSpec spec;
    if (!preset.empty())
        spec = harness::make_preset(preset);
    else if (!config_path.empty())
        spec = harness::spec_from(config::parse_file(config_path));
    else
        throw ConfigError("need --preset or --config");
    if (seed_set) spec.seeds = {seed};
    spec.out_dir = out_dir;
    return spec;
}

int cmd_run(const std::string& preset, const std::string& config_path,
            std::uint64_t seed, bool seed_set, const std::string& out_dir,
            const std::string& agent_kind, int episodes, int steps) {
    auto spec = build_spec(preset.empty() && config_path.empty() ? "fig7" : preset,
                           config_path, seed, seed_set, out_dir);
    if (episodes > 0) spec.episodes = episodes;
    if (steps > 0) spec.steps = steps;
    rl::AgentConfig agent = spec.agent;
    if (!agent_kind.empty()) {
        config::KvFile kv;
        kv.add("agent", "kind", agent_kind);
        agent.kind = config::agent_from(kv).kind;
    }
    agent.eps.schedule.c = spec.episodes;

    env::Env e(spec.scene);
    const auto log = rl::train(e, agent, spec.episodes, spec.steps, spec.seeds[0]);
    const std::string log_path = out_dir + "/training_log.csv";
    rl::write_log_csv(log, log_path);
    if (!log.final_params.weights.empty())
        nn::save_checkpoint(log.final_params, out_dir + "/policy.bin");
    std::printf("episodes=%d final_mean_ee=%.6g log=%s\n", spec.episodes,
                log.rows.empty() ? 0.0 : log.rows.back().mean_ee, log_path.c_str());
    return 0;
}

int cmd_sweep(const std::string& preset, const std::string& config_path,
              std::uint64_t seed, bool seed_set, const std::string& out_dir) {
    const auto spec = build_spec(preset, config_path, seed, seed_set, out_dir);
    const auto rows = harness::run_experiment(spec);
    std::printf("wrote %zu rows to %s/results.csv\n", rows.size(), out_dir.c_str());
    return 0;
}

int cmd_predict(const std::string& trace_path, std::uint64_t seed,
                const std::string& out_dir, int horizon, int length,
                const std::string& kind) {
    traffic::TrafficTrace trace;
    if (!trace_path.empty())
        trace = traffic::load_trace(trace_path);
    else
        trace = traffic::generate_trace(kind == "bursty" ? traffic::TraceKind::bursty
                                                         : traffic::TraceKind::diurnal,
                                        static_cast<std::size_t>(length), seed);

    traffic::EsnConfig cfg;
    cfg.kind = traffic::NeuronKind::lstm_unit;
    const auto model = traffic::train_model(cfg, trace, seed);

    const auto one_step = traffic::one_step_predictions(model, trace);
    std::vector<double> actual(trace.demand.begin() +
                                   static_cast<long>(trace.size() - one_step.size()),
                               trace.demand.end());
    const double err = traffic::nrmse(one_step, actual);

    const auto future = traffic::predict(model, trace, static_cast<std::size_t>(horizon));
    const std::string out_path = out_dir + "/predictions.csv";
    {
        traffic::TrafficTrace out_trace;
        out_trace.user_id = trace.user_id;
        out_trace.interval_seconds = trace.interval_seconds;
        long next = trace.interval.empty() ? 0 : trace.interval.back() + 1;
        for (double d : future) {
            out_trace.interval.push_back(next++);
            out_trace.demand.push_back(d);
        }
        traffic::save_trace(out_trace, out_path);
    }
    traffic::save_model(model, out_dir + "/predictor.bin");
    std::printf("one_step_nrmse=%.6g horizon=%d out=%s\n", err, horizon,
                out_path.c_str());
    return 0;
}

int cmd_report(const std::string& in_path, const std::string& out_dir) {
    const auto rows = harness::read_results_csv(in_path);
    const auto summary = harness::summarize(rows);
    harness::write_results_csv(summary, out_dir + "/summary.csv");
    std::printf("%-20s %12s %12s %10s %12s\n", "variant", "grid_value", "mean_ee",
                "mean_mos", "mean_power");
    for (const auto& r : summary)
        std::printf("%-20s %12.5g %12.5g %10.4g %12.5g\n", r.variant.c_str(),
                    r.grid_value, r.mean_ee, r.mean_mos, r.mean_power);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS-assisted downlink simulation lab"};
    app.require_subcommand(1);

    std::string preset, config_path, out_dir = ".", agent_kind, trace_path,
                trace_kind = "diurnal", report_in = "results.csv";
    std::uint64_t seed = 1;
    int episodes = 0, steps = 0, horizon = 24, length = 2000;

    auto add_common = [&](CLI::App* sub, bool with_preset) {
        sub->add_option("--seed", seed, "RNG seed");
        sub->add_option("--out", out_dir, "output directory");
        if (with_preset) {
            sub->add_option("--preset", preset, "fig4 | fig5 | fig6 | fig7");
            sub->add_option("--config", config_path, "experiment config file");
        }
    };

    auto* run = app.add_subcommand("run", "train one agent, write the episode log");
    add_common(run, true);
    run->add_option("--agent", agent_kind, "q_table | dqn | ddqn | d3qn");
    run->add_option("--episodes", episodes, "override episode count");
    run->add_option("--steps", steps, "override steps per episode");

    auto* sweep = app.add_subcommand("sweep", "run a full experiment grid");
    add_common(sweep, true);

    auto* predict = app.add_subcommand("predict", "fit the traffic predictor");
    add_common(predict, false);
    predict->add_option("--trace", trace_path, "input demand CSV (else synthetic)");
    predict->add_option("--horizon", horizon, "forecast length, intervals");
    predict->add_option("--length", length, "synthetic trace length");
    predict->add_option("--kind", trace_kind, "diurnal | bursty");

    auto* report = app.add_subcommand("report", "summarize a results CSV");
    add_common(report, false);
    report->add_option("--in", report_in, "results CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        const bool seed_set = app.count_all() && (run->count("--seed") ||
                                                  sweep->count("--seed"));
        std::filesystem::create_directories(out_dir);
        if (run->parsed())
            return cmd_run(preset, config_path, seed, seed_set, out_dir, agent_kind,
                           episodes, steps);
        if (sweep->parsed())
            return cmd_sweep(preset, config_path, seed, seed_set, out_dir);
        if (predict->parsed())
            return cmd_predict(trace_path, seed, out_dir, horizon, length, trace_kind);
        if (report->parsed()) return cmd_report(report_in, out_dir);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 0;
}
