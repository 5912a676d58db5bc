// Acceptance suite: one self-contained check per numbered criterion, one
// PASS/FAIL line each, nonzero exit when anything fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncvar/gridworld.hpp"
#include "ncvar/mdp_io.hpp"
#include "ncvar/policy.hpp"
#include "ncvar/result_io.hpp"
#include "ncvar/risk.hpp"
#include "ncvar/rng.hpp"
#include "ncvar/rollout.hpp"
#include "ncvar/solver.hpp"
#include "test_support.hpp"

using namespace ncvar;
namespace nt = ncvar::testing;
namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

int failures = 0;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

void report(int id, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    std::printf("[%s] %2d. %s (%s, %.2fs)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// shared instances for criteria 2 and 3
struct RiskInstance {
    DiscreteDistribution dist;
    double alpha;
    double kappa;
};

std::vector<RiskInstance> make_risk_instances() {
    std::vector<RiskInstance> instances;
    Rng rng(90210);
    for (int k = 0; k < 500; ++k) {
        DiscreteDistribution dist = nt::random_distribution(rng, 12);
        const double alpha = rng.next_range(1e-3, 1.0);
        const double kappa = rng.next_range(1.0, 4.0);
        instances.push_back({std::move(dist), alpha, kappa});
    }
    return instances;
}

void criterion_1() {
    const auto t0 = clock_type::now();
    const double shifted = rn_reduction(0.48, 2.0);
    const double elapsed = seconds_since(t0);
    const bool exact = shifted == 0.24;
    const bool fast = elapsed < 1e-3;
    report(1, "reduction exactness", exact && fast,
           "rn_reduction(0.48, 2) = " + fmt(shifted) + ", " + fmt(elapsed * 1e6) + " us",
           elapsed);
}

void criterion_2(const std::vector<RiskInstance>& instances) {
    const auto t0 = clock_type::now();
    double worst_shift = 0.0, worst_dual = 0.0;
    for (const RiskInstance& inst : instances) {
        const double direct = ncvar::ncvar(inst.dist, inst.alpha, inst.kappa).value;
        const double shifted = cvar(inst.dist, inst.alpha / inst.kappa);
        worst_shift = std::max(worst_shift, std::fabs(direct - shifted));
        const double primal = cvar(inst.dist, inst.alpha);
        const double dual = cvar_dual(inst.dist, inst.alpha).value;
        worst_dual = std::max(worst_dual, std::fabs(primal - dual));
    }
    const double elapsed = seconds_since(t0);
    const bool pass = worst_shift <= 1e-9 && worst_dual <= 1e-9 && elapsed < 5.0;
    report(2, "risk-measure identities", pass,
           "max |ncvar-cvar(a/k)| = " + fmt(worst_shift) + ", max |cvar-dual| = " +
               fmt(worst_dual) + " over 500 instances",
           elapsed);
}

void criterion_3(const std::vector<RiskInstance>& instances) {
    const auto t0 = clock_type::now();
    double worst_slack = 0.0;
    for (const RiskInstance& inst : instances) {
        const double mean = inst.dist.mean();
        const double c = cvar(inst.dist, inst.alpha);
        const double e = evar(inst.dist, inst.alpha);
        const double top = inst.dist.max_outcome();
        worst_slack = std::max(worst_slack, mean - c);
        worst_slack = std::max(worst_slack, c - e);
        worst_slack = std::max(worst_slack, e - top);
    }
    const double elapsed = seconds_since(t0);
    const bool pass = worst_slack <= 1e-7;
    report(3, "coherent ordering E <= cvar <= evar <= max", pass,
           "worst violation = " + fmt(worst_slack), elapsed);
}

void criterion_4() {
    const auto t0 = clock_type::now();
    Rng rng(40400);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 1 + int(rng.next_below(4));
        std::vector<double> probs(std::size_t(m), 0.0);
        double total = 0.0;
        for (double& p : probs) {
            p = rng.next_unit() + 0.05;
            total += p;
        }
        for (double& p : probs) p /= total;
        std::vector<double> leaf_costs(std::size_t(m), 0.0);
        for (double& z : leaf_costs) z = rng.next_range(-3.0, 12.0);
        const double alpha = rng.next_range(0.02, 1.0);
        const double budget = rng.next_range(1.0, 4.0);

        std::vector<nt::OwnedCurve> curves;
        curves.resize(std::size_t(m));
        std::vector<PiecewiseLinearCurve> views;
        for (int j = 0; j < m; ++j) {
            curves[std::size_t(j)].knots = {0.0, budget};
            curves[std::size_t(j)].values = {0.0, budget * leaf_costs[std::size_t(j)]};
            views.push_back(curves[std::size_t(j)].view());
        }
        EnvelopeProblem problem{alpha, budget, probs, views};
        const double one_step = maximize_envelope(problem).value;
        const double flat = ncvar::ncvar(DiscreteDistribution(leaf_costs, probs), alpha,
                                         budget).value;
        worst = std::max(worst, std::fabs(one_step - flat));
    }
    const double elapsed = seconds_since(t0);
    report(4, "decomposition equals the flat risk measure on trees", worst <= 1e-9,
           "max |one-step - flat| = " + fmt(worst) + " over 200 trees", elapsed);
}

void criterion_5() {
    const auto t0 = clock_type::now();
    Rng rng(50500);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 1 + int(rng.next_below(3));
        std::vector<double> probs(std::size_t(m), 0.0);
        double total = 0.0;
        for (double& p : probs) {
            p = rng.next_unit() + 0.1;
            total += p;
        }
        for (double& p : probs) p /= total;
        const double budget = rng.next_range(1.0, 3.0);
        const double level = rng.next_range(0.02, 1.0);
        std::vector<nt::OwnedCurve> curves;
        std::vector<PiecewiseLinearCurve> views;
        for (int j = 0; j < m; ++j) {
            curves.push_back(nt::random_concave_curve(rng, budget, 3 + int(rng.next_below(5)),
                                                      rng.next_range(0.5, 10.0)));
            views.push_back(curves.back().view());
        }
        EnvelopeProblem problem{level, budget, probs, views};
        const double greedy = maximize_envelope(problem).value;
        const double oracle = nt::oracle_envelope_max(probs, level, budget, curves);
        worst = std::max(worst, std::fabs(greedy - oracle));
    }
    const double elapsed = seconds_since(t0);
    report(5, "envelope greedy matches grid brute force", worst <= 1e-6,
           "max |greedy - oracle| = " + fmt(worst) + " over 200 problems", elapsed);
}

void criterion_6() {
    const auto t0 = clock_type::now();
    Rng rng(60600);
    const ConfidenceGrid grid = ConfidenceGrid::make(21, 1e-4, 1.0);
    SolverConfig cfg;
    cfg.epsilon = 1e-9;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Mdp mdp = nt::random_mdp(rng, 5, 3, 0.9);
        const SolveResult result = value_iteration(mdp, AmbiguitySpec::none(), grid, cfg);
        const std::vector<double> reference = nt::reference_expected_value_iteration(mdp, 1e-12);
        for (int x = 0; x < 5; ++x)
            worst = std::max(worst,
                             std::fabs(result.v.at(x, grid.size() - 1) - reference[std::size_t(x)]));
    }
    const double elapsed = seconds_since(t0);
    const bool pass = worst <= 1e-6 && elapsed < 30.0;
    report(6, "unit-budget collapse to risk-neutral value iteration", pass,
           "max |V(., 1) - reference| = " + fmt(worst) + " over 50 MDPs", elapsed);
}

void criterion_7() {
    const auto t0 = clock_type::now();
    Rng rng(70700);
    double worst_excess = -std::numeric_limits<double>::infinity();
    double worst_monotone = 0.0;
    double worst_concavity = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n_states = 3 + int(rng.next_below(3));
        const double gamma = 0.8 + 0.15 * rng.next_unit();
        const Mdp mdp = nt::random_mdp(rng, n_states, 2, gamma);
        const AmbiguitySpec amb =
            trial % 2 == 0 ? AmbiguitySpec::rn(rng.next_range(1.0, 2.0))
                           : make_uniform_budget(mdp, 1.0, 2.0, 7000 + std::uint64_t(trial));
        const ConfidenceGrid grid = grid_for(amb, 9, 1e-3);

        const ValueFunction w1 = nt::random_concave_value_function(rng, n_states, grid, 10.0);
        const ValueFunction w2 = nt::random_concave_value_function(rng, n_states, grid, 10.0);
        const ValueFunction t1 = apply_bellman(w1, mdp, amb, grid);
        const ValueFunction t2 = apply_bellman(w2, mdp, amb, grid);
        // contraction factor <= gamma + 1e-9, instance by instance
        worst_excess = std::max(worst_excess, sup_norm_diff(t1, t2) -
                                                  (gamma + 1e-9) * sup_norm_diff(w1, w2));

        ValueFunction lower = w1;
        for (int x = 0; x < n_states; ++x)
            for (int i = 0; i < grid.size(); ++i)
                lower.at(x, i) = std::min(w1.at(x, i), w2.at(x, i));
        const ValueFunction tl = apply_bellman(lower, mdp, amb, grid);
        for (std::size_t k = 0; k < tl.data().size(); ++k)
            worst_monotone = std::max(worst_monotone, tl.data()[k] - t1.data()[k]);

        if (trial < 10) {
            // every iterate from V0 = 0 keeps a concave level-scaled profile
            SolverConfig cfg;
            cfg.epsilon = 1e-7;
            const SolveResult solved = value_iteration(mdp, amb, grid, cfg);
            worst_concavity = std::max(worst_concavity, solved.max_concavity_gap);
        }
    }
    const double elapsed = seconds_since(t0);
    const bool pass = worst_excess <= 0.0 && worst_monotone <= 1e-12 && worst_concavity <= 1e-9;
    report(7, "operator contraction, monotonicity, concavity", pass,
           "contraction excess = " + fmt(worst_excess) + ", monotonicity violation = " +
               fmt(worst_monotone) + ", concavity gap = " + fmt(worst_concavity),
           elapsed);
}

struct PaperScale {
    Mdp mdp;
    AmbiguitySpec nominal, robust, decision_dependent;
    ConfidenceGrid g_nominal, g_robust, g_dd;
    SolveResult r_nominal, r_robust, r_dd;
    double v_nominal = 0.0, v_robust = 0.0, v_dd = 0.0;
    double solve_seconds = 0.0;
};

constexpr double kAlpha = 0.48;
constexpr std::uint64_t kObstacleSeed = 2024;
constexpr std::uint64_t kBudgetSeed = 7;

PaperScale solve_paper_scale() {
    GridSpec spec; // 64x53, start (60,50), goal (60,2), costs 1/40, p 0.95
    spec.obstacles.clear();
    spec.obstacle_count = 80;

    PaperScale ps{.mdp = build_gridworld(spec, kObstacleSeed),
                  .nominal = AmbiguitySpec::none(),
                  .robust = AmbiguitySpec::rn(2.0),
                  .decision_dependent = {},
                  .g_nominal = ConfidenceGrid::make(21, 1e-4, 1.0),
                  .g_robust = ConfidenceGrid::make(21, 1e-4, 2.0),
                  .g_dd = ConfidenceGrid::make(21, 1e-4, 2.0),
                  .r_nominal = {},
                  .r_robust = {},
                  .r_dd = {}};
    ps.decision_dependent = make_uniform_budget(ps.mdp, 1.0, 2.0, kBudgetSeed);

    SolverConfig cfg;
    cfg.epsilon = 1e-6;
    const auto t0 = clock_type::now();
    ps.r_nominal = value_iteration(ps.mdp, ps.nominal, ps.g_nominal, cfg);
    ps.r_robust = value_iteration(ps.mdp, ps.robust, ps.g_robust, cfg);
    ps.r_dd = value_iteration(ps.mdp, ps.decision_dependent, ps.g_dd, cfg);
    ps.solve_seconds = seconds_since(t0);

    const int x0 = ps.mdp.start_state();
    ps.v_nominal = backup_value_at(ps.r_nominal.v, ps.mdp, ps.nominal, ps.g_nominal, x0, kAlpha);
    ps.v_robust = backup_value_at(ps.r_robust.v, ps.mdp, ps.robust, ps.g_robust, x0, kAlpha);
    ps.v_dd = backup_value_at(ps.r_dd.v, ps.mdp, ps.decision_dependent, ps.g_dd, x0, kAlpha);
    return ps;
}

void write_scale_outputs(const PaperScale& ps, const fs::path& dir) {
    fs::create_directories(dir);
    write_result_csv(ps.r_nominal, ps.mdp, ps.g_nominal, (dir / "value_nominal.csv").string());
    write_result_csv(ps.r_robust, ps.mdp, ps.g_robust, (dir / "value_robust.csv").string());
    write_result_csv(ps.r_dd, ps.mdp, ps.g_dd, (dir / "value_dd.csv").string());
    write_solve_summary(ps.r_nominal, R"({"case": "nominal"})", 0.0,
                        (dir / "summary_nominal.json").string());
    write_solve_summary(ps.r_robust, R"({"case": "robust"})", 0.0,
                        (dir / "summary_robust.json").string());
    write_solve_summary(ps.r_dd, R"({"case": "dd"})", 0.0, (dir / "summary_dd.json").string());
}

void criterion_8() {
    const auto t0 = clock_type::now();
    GridSpec spec;
    spec.obstacles.clear();
    spec.obstacle_count = 80;
    const Mdp mdp = build_gridworld(spec, kObstacleSeed);
    const AmbiguitySpec amb = AmbiguitySpec::rn(2.0);
    const ConfidenceGrid grid = ConfidenceGrid::make(21, 1e-4, 2.0);
    SolverConfig cfg;
    cfg.epsilon = 1e-6;
    const SolveResult from_zero = value_iteration(mdp, amb, grid, cfg);
    const SolveResult from_top = value_iteration_from(
        ValueFunction(mdp.n_states(), grid.size(), mdp.value_bound()), mdp, amb, grid, cfg);
    const double gap = sup_norm_diff(from_zero.v, from_top.v);
    const double tolerance = 2.0 * cfg.epsilon / (1.0 - mdp.gamma());
    const double elapsed = seconds_since(t0);
    report(8, "fixed point independent of the initial table",
           from_zero.converged && from_top.converged && gap <= tolerance,
           "sup gap = " + fmt(gap) + " <= " + fmt(tolerance), elapsed);
}

void criterion_9(const PaperScale& ps, const fs::path& out_dir) {
    const bool converged =
        ps.r_nominal.converged && ps.r_robust.converged && ps.r_dd.converged;
    const bool fast = ps.solve_seconds < 600.0;
    const bool ordered = ps.v_robust >= ps.v_nominal && ps.v_dd >= ps.v_nominal;
    write_scale_outputs(ps, out_dir);
    report(9, "paper-scale solves converge and robust values dominate",
           converged && fast && ordered,
           "V*: nominal " + fmt(ps.v_nominal) + ", K=2 " + fmt(ps.v_robust) + ", dd " +
               fmt(ps.v_dd) + "; " + fmt(ps.solve_seconds) + "s for 3 solves",
           ps.solve_seconds);
}

void criterion_10(const PaperScale& ps, const fs::path& out_dir) {
    const auto t0 = clock_type::now();
    fs::create_directories(out_dir);
    const Policy policy(ps.mdp, ps.robust, ps.g_robust, ps.r_robust);
    RolloutConfig cfg;
    cfg.episodes = 10000;
    cfg.horizon = 400;
    bool all_within = true;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (std::uint64_t k = 0; k < 20; ++k) {
        const SampledKernel kernel = sample_kernel(ps.mdp, ps.robust, 1000 + k);
        cfg.seed = 2000 + k;
        const RolloutReport rep = run_rollout(ps.mdp, policy, KernelSource::sampled(kernel, 1000 + k),
                                              ps.mdp.start_state(), kAlpha, cfg);
        write_rollout_report(rep, (out_dir / ("rollout_" + std::to_string(k) + ".json")).string());
        const double se = bootstrap_cvar_se(rep.cost_samples, kAlpha, 200, 3000 + k);
        const double margin = ps.v_robust + 3.0 * se - rep.empirical_cvar;
        worst_margin = std::min(worst_margin, margin);
        if (margin < 0.0) all_within = false;
    }
    const double elapsed = seconds_since(t0);
    const bool pass = all_within && elapsed < 300.0;
    report(10, "sampled-kernel tail risk stays below the robust value", pass,
           "worst margin = " + fmt(worst_margin) + " over 20 kernels", elapsed);
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

bool summaries_match_modulo_walltime(const fs::path& a, const fs::path& b) {
    auto ja = nlohmann::ordered_json::parse(read_file(a));
    auto jb = nlohmann::ordered_json::parse(read_file(b));
    ja.erase("wall_time_seconds");
    jb.erase("wall_time_seconds");
    return ja.dump() == jb.dump();
}

void criterion_11(const fs::path& run1, const fs::path& run2) {
    const auto t0 = clock_type::now();

    // repeat the entire 9-10 pipeline with the same seeds
    const PaperScale again = solve_paper_scale();
    write_scale_outputs(again, run2);
    const Policy policy(again.mdp, again.robust, again.g_robust, again.r_robust);
    RolloutConfig cfg;
    cfg.episodes = 10000;
    cfg.horizon = 400;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const SampledKernel kernel = sample_kernel(again.mdp, again.robust, 1000 + k);
        cfg.seed = 2000 + k;
        const RolloutReport rep = run_rollout(again.mdp, policy, KernelSource::sampled(kernel, 1000 + k),
                                              again.mdp.start_state(), kAlpha, cfg);
        write_rollout_report(rep, (run2 / ("rollout_" + std::to_string(k) + ".json")).string());
    }

    bool identical = true;
    std::string first_diff;
    for (const char* name : {"value_nominal.csv", "value_robust.csv", "value_dd.csv"}) {
        if (read_file(run1 / name) != read_file(run2 / name)) {
            identical = false;
            first_diff = name;
            break;
        }
    }
    for (int k = 0; identical && k < 20; ++k) {
        const std::string name = "rollout_" + std::to_string(k) + ".json";
        if (read_file(run1 / name) != read_file(run2 / name)) {
            identical = false;
            first_diff = name;
        }
    }
    for (const char* name : {"summary_nominal.json", "summary_robust.json", "summary_dd.json"}) {
        if (identical && !summaries_match_modulo_walltime(run1 / name, run2 / name)) {
            identical = false;
            first_diff = name;
        }
    }
    const double elapsed = seconds_since(t0);
    report(11, "repeated runs produce byte-identical outputs", identical,
           identical ? "3 value tables, 20 rollout reports, 3 summaries"
                     : "first difference in " + first_diff,
           elapsed);
}

} // namespace

int main() {
    std::printf("acceptance suite\n");
    const auto t0 = clock_type::now();

    criterion_1();
    const auto instances = make_risk_instances();
    criterion_2(instances);
    criterion_3(instances);
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();

    const fs::path base = fs::temp_directory_path() / "ncvar_acceptance";
    fs::remove_all(base);
    const fs::path run1 = base / "run1";
    const fs::path run2 = base / "run2";
    const PaperScale ps = solve_paper_scale();
    criterion_9(ps, run1);
    criterion_10(ps, run1);
    criterion_11(run1, run2);

    std::printf("%d of 11 criteria passed in %.1fs\n", 11 - failures, seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
