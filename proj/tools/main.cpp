#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "ncvar/common.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitUsage = 64;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"robust CVaR value iteration on tabular MDPs"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    std::string config_path;
    std::string output_dir;
    std::uint64_t seed = 0;
    int threads = 1;
    app.add_option("--config", config_path, "experiment configuration (JSON)");
    auto* dir_opt = app.add_option("--output-dir", output_dir,
                                   "override the configured output directory");
    auto* seed_opt = app.add_option("--seed", seed, "override the configured seed");
    app.add_option("--threads", threads, "parallel sweep width")->check(CLI::Range(1, 256));

    auto* build_env = app.add_subcommand("build-env", "build the grid environment and save it");
    auto* reduce = app.add_subcommand("reduce", "confidence-level reduction for a fixed budget");
    double alpha = 0.5, budget = 1.0;
    std::string kind = "rn";
    reduce->add_option("--alpha", alpha, "confidence level in (0, 1]")->required();
    reduce->add_option("--budget", budget, "uncertainty budget (K for rn, kappa for kl)")
        ->required();
    reduce->add_option("--kind", kind, "rn or kl")->required();
    auto* solve = app.add_subcommand("solve", "run value iteration and export the results");
    auto* render = app.add_subcommand("render", "render the value heatmap and greedy path");
    auto* evaluate = app.add_subcommand("evaluate", "roll the solved policy out and report risk");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    ncvar::cli::GlobalOptions opts;
    opts.threads = threads;
    if (dir_opt->count() > 0) opts.output_dir = output_dir;
    if (seed_opt->count() > 0) opts.seed = seed;

    try {
        if (reduce->parsed()) return ncvar::cli::cmd_reduce(alpha, budget, kind);
        if (config_path.empty()) {
            std::cerr << "--config is required for this command\n";
            return kExitUsage;
        }
        if (build_env->parsed()) return ncvar::cli::cmd_build_env(config_path, opts);
        if (solve->parsed()) return ncvar::cli::cmd_solve(config_path, opts);
        if (render->parsed()) return ncvar::cli::cmd_render(config_path, opts);
        if (evaluate->parsed()) return ncvar::cli::cmd_evaluate(config_path, opts);
    } catch (const ncvar::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ncvar::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ncvar::NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitUsage;
}
