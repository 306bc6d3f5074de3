#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pipeline/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Academic pipeline stock-flow simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string data_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool override_feasibility = false;
    int threads = 0;

    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--data", data_path, "degree series CSV (overrides config)");
    app.add_option("--out", out_dir, "output directory (overrides config)");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides config)");
    app.add_flag("--override-feasibility", override_feasibility,
                 "run even when parameters fail the feasibility checks");
    auto* threads_opt =
        app.add_option("--threads", threads, "worker threads for scenario runs");

    auto* ingest = app.add_subcommand(
        "ingest", "reconstruct stocks and write the consistency report");
    auto* simulate =
        app.add_subcommand("simulate", "run the configured scenarios");
    auto* sensitivity = app.add_subcommand(
        "sensitivity", "OAT sweeps, PRCC, and the congestion heatmap");
    auto* sweep =
        app.add_subcommand("sweep", "congestion heatmap over (a_F, K_F)");
    for (auto* sub : {ingest, simulate, sensitivity, sweep})
        sub->fallthrough(); // global flags may follow the subcommand

    CLI11_PARSE(app, argc, argv);

    try {
        pipeline::RunConfig config = config_path.empty()
                                         ? pipeline::parse_config("{}")
                                         : pipeline::load_config(config_path);
        if (!data_path.empty())
            config.data_path = data_path;
        if (!out_dir.empty())
            config.out_dir = out_dir;
        if (seed_opt->count() > 0)
            config.seed = seed;
        if (override_feasibility) {
            config.override_feasibility = true;
            for (auto& spec : config.scenarios)
                spec.override_feasibility = true;
        }
        if (threads_opt->count() > 0)
            config.threads = threads;

        if (ingest->parsed())
            return pipeline::cmd_ingest(config);
        if (simulate->parsed())
            return pipeline::cmd_simulate(config);
        if (sensitivity->parsed())
            return pipeline::cmd_sensitivity(config);
        if (sweep->parsed())
            return pipeline::cmd_sweep(config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
