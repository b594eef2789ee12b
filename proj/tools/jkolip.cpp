#include <CLI11.hpp>

#include <iostream>

#include "cli/config.hpp"
#include "cli/experiments.hpp"

namespace {

int run(const std::string& path, jko::cli::Overrides ov) {
    using namespace jko::cli;
    RunConfig cfg;
    try {
        cfg = load_config(path, ov);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    }
    try {
        const RunOutcome out = run_experiment(cfg);
        for (const auto& c : out.checks)
            std::cout << c.name << ": " << verdict_name(c.verdict) << "  " << c.detail << '\n';
        for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
        std::cout << "status: " << out.summary["status"].get<std::string>() << "  (" << out.directory << ")\n";
        return out.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "run aborted: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"JKO steps, Lipschitz contraction checks and reference solvers"};
    app.require_subcommand(1);

    std::string config;
    jko::cli::Overrides ov;
    std::uint64_t seed = 0;
    std::string out;
    auto* run_cmd = app.add_subcommand("run", "Run one experiment config");
    run_cmd->add_option("config", config, "Path to a JSON config")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--jobs,-j", ov.jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
    auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the config seed");
    auto* out_opt = run_cmd->add_option("--out,-o", out, "Override the output directory");

    auto* list_cmd = app.add_subcommand("list-experiments", "List experiment kinds");

    std::string kind;
    auto* describe_cmd = app.add_subcommand("describe", "Print the keys and defaults of a kind");
    describe_cmd->add_option("kind", kind, "Experiment kind")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (*run_cmd) {
        if (*seed_opt) ov.seed = seed;
        if (*out_opt) ov.output = out;
        return run(config, ov);
    }
    if (*list_cmd) {
        for (const auto& k : jko::cli::experiment_kinds()) std::cout << k.name << "  " << k.summary << '\n';
        return 0;
    }
    if (*describe_cmd) {
        const auto* k = jko::cli::find_kind(kind);
        if (!k) {
            std::cerr << "unknown experiment kind '" << kind << "'; see list-experiments\n";
            return 1;
        }
        std::cout << jko::cli::describe_kind(*k);
        return 0;
    }
    return 1;
}
