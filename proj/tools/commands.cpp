#include "commands.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "config.hpp"
#include "ncvar/common.hpp"
#include "ncvar/image.hpp"
#include "ncvar/mdp_io.hpp"
#include "ncvar/policy.hpp"
#include "ncvar/result_io.hpp"
#include "ncvar/risk.hpp"
#include "ncvar/rollout.hpp"
#include "ncvar/solver.hpp"

namespace ncvar::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNotConverged = 3;

fs::path ensure_output_dir(const ExperimentConfig& cfg, const GlobalOptions& opts) {
    const fs::path dir = opts.output_dir.value_or(cfg.output_dir);
    fs::create_directories(dir);
    return dir;
}

void write_env_map(const Mdp& mdp, const fs::path& path) {
    const GridMeta& g = *mdp.grid();
    std::vector<std::string> map(std::size_t(g.rows), std::string(std::size_t(g.cols), '.'));
    for (const Cell& c : g.obstacles) map[std::size_t(c.row)][std::size_t(c.col)] = '#';
    map[std::size_t(g.start.row)][std::size_t(g.start.col)] = 'S';
    map[std::size_t(g.goal.row)][std::size_t(g.goal.col)] = 'G';
    std::ofstream out(path, std::ios::binary);
    for (const std::string& line : map) out << line << '\n';
}

struct SolvedContext {
    Mdp mdp;
    AmbiguitySpec ambiguity;
    ConfidenceGrid grid;
    SolveResult result;
};

// rebuild the solved state from mdp + value.csv written by `solve`
SolvedContext load_solved(const ExperimentConfig& cfg, const GlobalOptions& opts,
                          const fs::path& dir) {
    SolvedContext ctx{
        .mdp = load_mdp((dir / "mdp.json").string()),
        .ambiguity = {},
        .grid = ConfidenceGrid::make(3, 0.5, 1.0),
        .result = {},
    };
    ctx.ambiguity = cfg.ambiguity.resolve(ctx.mdp, opts.seed);
    ctx.ambiguity.check(ctx.mdp);
    if (!ctx.ambiguity.solvable_by_value_iteration())
        throw ValidationError("KL ambiguity has no solved value table; use `reduce`");
    ctx.grid = grid_for(ctx.ambiguity, cfg.ygrid_n, cfg.ygrid_y_min);
    LoadedResult loaded =
        load_result_csv((dir / "value.csv").string(), ctx.mdp.n_states(), ctx.grid);
    ctx.result = extract_policy_tables(std::move(loaded.v), ctx.mdp, ctx.ambiguity, ctx.grid);
    return ctx;
}

std::vector<Cell> most_likely_path(const SolvedContext& ctx, double alpha) {
    const GridMeta& g = *ctx.mdp.grid();
    const Policy policy(ctx.mdp, ctx.ambiguity, ctx.grid, ctx.result);
    PolicyWorkspace ws;
    std::vector<Cell> path;
    int x = ctx.mdp.start_state();
    double y = alpha;
    const int goal_state = g.cell_state(g.goal.row, g.goal.col);
    const int step_cap = 4 * g.rows * g.cols;
    path.push_back({x / g.cols, x % g.cols});
    for (int step = 0; step < step_cap && x != goal_state; ++step) {
        const Policy::Decision d = policy.decide(x, y, ws);
        const auto& row = ctx.mdp.transitions(x, d.action);
        std::size_t pick = 0;
        for (std::size_t j = 1; j < row.size(); ++j)
            if (row[j].prob > row[pick].prob) pick = j;
        y = std::clamp(y * d.xi[pick], ctx.grid.y_min(), ctx.grid.y_max());
        x = row[pick].state;
        if (x >= g.rows * g.cols) break; // absorbed
        path.push_back({x / g.cols, x % g.cols});
    }
    return path;
}

} // namespace

int cmd_build_env(const std::string& config_path, const GlobalOptions& opts) {
    const ExperimentConfig cfg = load_experiment_config(config_path);
    const Mdp mdp = resolve_mdp(cfg, opts.seed);
    const MdpDiagnostics diag = validate(mdp);
    if (!diag.ok()) {
        std::cerr << "environment validation failed:\n" << diag.to_string();
        return kExitValidation;
    }
    const fs::path dir = ensure_output_dir(cfg, opts);
    save_mdp(mdp, (dir / "mdp.json").string());
    if (mdp.grid()) write_env_map(mdp, dir / "env_map.txt");
    std::cout << "wrote " << (dir / "mdp.json").string() << " (" << mdp.n_states()
              << " states)\n";
    return kExitOk;
}

int cmd_reduce(double alpha, double budget, const std::string& kind) {
    const auto shortest = [](double v) {
        char buf[64];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        return std::string(buf, ec == std::errc{} ? ptr : buf);
    };
    if (kind == "rn") {
        const double shifted = rn_reduction(alpha, budget);
        std::printf("alpha' = %s\n", shortest(shifted).c_str());
        std::printf("solve as value iteration with a constant budget kappa = %s\n",
                    shortest(budget).c_str());
    } else if (kind == "kl") {
        const double shifted = kl_reduction(alpha, budget);
        std::printf("alpha' = %s\n", shortest(shifted).c_str());
        std::printf("solve as an entropic-risk problem at alpha'; this tool does not solve it\n");
    } else {
        throw ValidationError("kind must be rn or kl");
    }
    return kExitOk;
}

int cmd_solve(const std::string& config_path, const GlobalOptions& opts) {
    const ExperimentConfig cfg = load_experiment_config(config_path);
    const Mdp mdp = resolve_mdp(cfg, opts.seed);
    const AmbiguitySpec ambiguity = cfg.ambiguity.resolve(mdp, opts.seed);
    ambiguity.check(mdp);
    const ConfidenceGrid grid = grid_for(ambiguity, cfg.ygrid_n, cfg.ygrid_y_min);

    SolverConfig solver_cfg;
    solver_cfg.epsilon = cfg.solver_epsilon;
    solver_cfg.max_sweeps = cfg.solver_max_sweeps;
    solver_cfg.threads = opts.threads;

    const auto t0 = std::chrono::steady_clock::now();
    const SolveResult result = value_iteration(mdp, ambiguity, grid, solver_cfg);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const fs::path dir = ensure_output_dir(cfg, opts);
    save_mdp(mdp, (dir / "mdp.json").string());
    write_result_csv(result, mdp, grid, (dir / "value.csv").string());
    write_solve_summary(result, cfg.echo.dump(), wall, (dir / "solve_summary.json").string());

    const double start_value =
        backup_value_at(result.v, mdp, ambiguity, grid, mdp.start_state(), cfg.alpha);
    std::printf("iterations: %d\nresidual: %.3e\nV*(start, alpha=%.6g) = %.9f\n",
                result.iterations, result.final_residual, cfg.alpha, start_value);
    if (!result.converged) {
        std::cerr << "did not converge within " << cfg.solver_max_sweeps << " sweeps\n";
        return kExitNotConverged;
    }
    return kExitOk;
}

int cmd_render(const std::string& config_path, const GlobalOptions& opts) {
    const ExperimentConfig cfg = load_experiment_config(config_path);
    const fs::path dir = ensure_output_dir(cfg, opts);
    const SolvedContext ctx = load_solved(cfg, opts, dir);
    if (!ctx.mdp.grid()) {
        std::cerr << "rendering needs a grid-built environment\n";
        return kExitValidation;
    }
    const GridMeta& g = *ctx.mdp.grid();

    std::vector<double> values(std::size_t(g.rows) * std::size_t(g.cols), 0.0);
    for (int r = 0; r < g.rows; ++r)
        for (int c = 0; c < g.cols; ++c) {
            const int x = g.cell_state(r, c);
            values[std::size_t(x)] = interpolate(ctx.result.v, ctx.grid, x, cfg.alpha) / cfg.alpha;
        }
    const std::vector<std::uint8_t> gray = normalize_to_gray(values);
    write_pgm((dir / "heatmap.pgm").string(), g.cols, g.rows, gray);

    const std::vector<Cell> path = most_likely_path(ctx, cfg.alpha);
    {
        std::ofstream out(dir / "path.txt", std::ios::binary);
        for (const Cell& c : path) out << c.row << ' ' << c.col << '\n';
    }
    std::vector<std::array<std::uint8_t, 3>> rgb(gray.size());
    for (std::size_t i = 0; i < gray.size(); ++i) rgb[i] = {gray[i], gray[i], gray[i]};
    for (const Cell& c : path)
        rgb[std::size_t(c.row) * std::size_t(g.cols) + std::size_t(c.col)] = {255, 0, 0};
    write_ppm((dir / "path_overlay.ppm").string(), g.cols, g.rows, rgb);

    std::cout << "wrote heatmap.pgm, path_overlay.ppm, path.txt (" << path.size()
              << " cells)\n";
    return kExitOk;
}

int cmd_evaluate(const std::string& config_path, const GlobalOptions& opts) {
    const ExperimentConfig cfg = load_experiment_config(config_path);
    if (cfg.rollout_episodes < 1) throw ValidationError("rollout needs at least one episode");
    const fs::path dir = ensure_output_dir(cfg, opts);
    const SolvedContext ctx = load_solved(cfg, opts, dir);
    const Policy policy(ctx.mdp, ctx.ambiguity, ctx.grid, ctx.result);

    RolloutConfig rollout_cfg;
    rollout_cfg.episodes = cfg.rollout_episodes;
    rollout_cfg.horizon = cfg.rollout_horizon;
    rollout_cfg.seed = opts.seed.value_or(cfg.rollout_seed);

    const double v_star = backup_value_at(ctx.result.v, ctx.mdp, ctx.ambiguity, ctx.grid,
                                          ctx.mdp.start_state(), cfg.alpha);
    std::printf("V*(start, alpha=%.6g) = %.9f\n", cfg.alpha, v_star);

    // The bound applies to kernels inside the ambiguity set. The adversarial
    // companion samples the risk-distorted measure, whose *mean* tracks V*.
    const auto report_one = [&](const RolloutReport& report, const std::string& name,
                                bool bound_applies) {
        write_rollout_report(report, (dir / ("rollout_" + name + ".json")).string());
        if (cfg.write_samples)
            write_cost_samples(report, (dir / ("rollout_" + name + ".costs.txt")).string());
        const double se =
            bootstrap_cvar_se(report.cost_samples, cfg.alpha, 200, rollout_cfg.seed ^ 0xb00u);
        const bool within = report.empirical_cvar <= v_star + 3.0 * se;
        std::printf("%-18s mean=%.6f cvar=%.6f se=%.6f%s\n", report.kernel_descriptor.c_str(),
                    report.empirical_mean, report.empirical_cvar, se,
                    !bound_applies      ? ""
                    : within            ? "  within bound"
                                        : "  ABOVE BOUND");
        return !bound_applies || within;
    };

    bool all_within = true;
    const int start = ctx.mdp.start_state();
    all_within &= report_one(
        run_rollout(ctx.mdp, policy, KernelSource::nominal(), start, cfg.alpha, rollout_cfg),
        "nominal", true);
    if (ctx.ambiguity.kind == AmbiguityKind::rn_fixed ||
        ctx.ambiguity.kind == AmbiguityKind::rn_decision_dependent) {
        for (int k = 0; k < cfg.sampled_kernels; ++k) {
            const std::uint64_t kernel_seed = rollout_cfg.seed + 1000u + std::uint64_t(k);
            const SampledKernel kernel = sample_kernel(ctx.mdp, ctx.ambiguity, kernel_seed);
            RolloutConfig per = rollout_cfg;
            per.seed = rollout_cfg.seed + 2000u + std::uint64_t(k);
            all_within &= report_one(
                run_rollout(ctx.mdp, policy, KernelSource::sampled(kernel, kernel_seed), start,
                            cfg.alpha, per),
                "sampled_" + std::to_string(k), true);
        }
    }
    report_one(
        run_rollout(ctx.mdp, policy, KernelSource::adversarial(), start, cfg.alpha, rollout_cfg),
        "adversarial", false);
    std::printf("upper-bound check (nominal + sampled kernels): %s\n",
                all_within ? "PASS" : "FAIL");
    return kExitOk;
}

} // namespace ncvar::cli
