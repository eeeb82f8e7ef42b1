// Command-line front end: parse a config, pick a command, run the labs,
// write deterministic CSV output.

#include <CLI11.hpp>

#include <iostream>

#include "randdyn/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"randdyn: exact-arithmetic experiments on random compositions of"
                 " rational self-maps of projective space"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir = "out";
    app.add_option("--config", config_path, "experiment config file")->required();
    app.add_option("--out-dir", out_dir, "output directory (CSV files + manifest)");

    randdyn::RunOverrides overrides;
    std::uint64_t seed = 0;
    long trials = 0, n_max = 0;
    double eps = 0.0;
    int threads = 0;
    auto* seed_opt = app.add_option("--seed", seed, "override [run] seed");
    auto* trials_opt = app.add_option("--trials", trials, "override [run] trials");
    auto* nmax_opt = app.add_option("--n-max", n_max, "override [run] n_max");
    auto* eps_opt = app.add_option("--eps", eps, "override [run] eps");
    auto* threads_opt = app.add_option("--threads", threads, "override [run] threads");

    for (const auto& name : randdyn::known_commands())
        app.add_subcommand(name, "");

    CLI11_PARSE(app, argc, argv);

    if (*seed_opt) overrides.seed = seed;
    if (*trials_opt) overrides.trials = trials;
    if (*nmax_opt) overrides.n_max = n_max;
    if (*eps_opt) overrides.eps = eps;
    if (*threads_opt) overrides.threads = threads;

    try {
        randdyn::ExperimentConfig cfg = randdyn::load_config(config_path);
        const std::string command = app.get_subcommands().front()->get_name();
        return randdyn::run_command(command, std::move(cfg), overrides, out_dir, std::cout);
    } catch (const randdyn::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }
}
