// sisamp: batch front end for the sampling/stability analyses.
//
//   sisamp <analyze|spectrum|stability|sampling|gabor|vanisher|verify-examples>
//          --config PATH [--out DIR] [--seed N] [--threads N]
//
// Exit status: 0 completed (whatever the verdicts), 1 numerical or I/O
// failure, 2 usage or config error. Nothing is written unless the run
// completes.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sisamp/cli/config.hpp"
#include "sisamp/cli/run.hpp"

int main(int argc, char** argv) {
    using namespace sisamp::cli;

    CLI::App app{"sisamp: sampling and stability analyses for shift-invariant spaces"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    app.add_option("--config", config_path, "experiment config (.toml or .json)")->required();
    app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    app.add_option("--seed", seed, "random seed (overrides seed)");
    app.add_option("--threads", threads, "worker threads (overrides threads)")->check(CLI::Range(1u, 256u));

    for (const char* name : {"analyze", "spectrum", "stability", "sampling", "gabor", "vanisher", "verify-examples"})
        app.add_subcommand(name, std::string("run the ") + name + " task");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    Overrides ov;
    ov.task = task_from_string(app.get_subcommands().front()->get_name());
    if (!out_dir.empty()) ov.out = out_dir;
    ov.seed = seed;
    ov.threads = threads;

    ExperimentConfig cfg;
    try {
        cfg = build_config(load_source(config_path), ov);
    } catch (const ConfigError& e) {
        std::cerr << config_path << ": " << e.what() << "\n";
        return 2;
    }

    try {
        const auto res = execute(cfg);
        const auto files = write_artifacts(cfg, res);
        std::cout << "task " << to_string(cfg.task) << " done; wrote";
        for (const auto& f : files) std::cout << " " << f.string();
        std::cout << "\n";
    } catch (const std::exception& e) {
        std::cerr << "sisamp " << to_string(cfg.task) << " failed: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
