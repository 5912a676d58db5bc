#include "ncvar/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "ncvar/common.hpp"
#include "ncvar/envelope.hpp"

namespace ncvar {

int SolveResult::action_at(int x, int node) const {
    return greedy_action[std::size_t(x) * std::size_t(v.n_nodes()) + std::size_t(node)];
}

std::span<const double> SolveResult::xi_at(int x, int node) const {
    const std::size_t k = std::size_t(x) * std::size_t(v.n_nodes()) + std::size_t(node);
    return {xi.data() + xi_offset[k], xi_offset[k + 1] - xi_offset[k]};
}

namespace {

struct SweepWorkspace {
    EnvelopeWorkspace env;
    std::vector<double> probs;
    std::vector<PiecewiseLinearCurve> curves;
    std::vector<double> inner;
    std::vector<double> best;
};

void require_solvable(const Mdp& mdp, const AmbiguitySpec& ambiguity) {
    ambiguity.check(mdp);
    if (!ambiguity.solvable_by_value_iteration())
        throw ValidationError(
            "KL ambiguity is handled by the confidence-level reduction, not by value iteration");
    for (int x = 0; x < mdp.n_states(); ++x)
        if (mdp.n_actions(x) == 0)
            throw ValidationError("state " + std::to_string(x) + " has no actions");
}

// Backs up every node of one state from the level-scaled table
// g_table[x * N + j] = node_j * v(x, j), writing N values into `out`.
void backup_state(const Mdp& mdp, const AmbiguitySpec& ambiguity, const ConfidenceGrid& grid,
                  const ValueFunction& vin, const std::vector<double>& g_table, int x,
                  std::span<double> out, SweepWorkspace& ws) {
    const int n_nodes = grid.size();
    const auto& nodes = grid.nodes();
    const double gamma = mdp.gamma();
    ws.best.assign(std::size_t(n_nodes), std::numeric_limits<double>::infinity());

    for (int a = 0; a < mdp.n_actions(x); ++a) {
        const auto& row = mdp.transitions(x, a);
        const std::size_t m = row.size();
        const double cost = mdp.cost(x, a);

        ws.probs.resize(m);
        ws.curves.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            ws.probs[j] = row[j].prob;
            const double* g_row = g_table.data() + std::size_t(row[j].state) * std::size_t(n_nodes);
            ws.curves[j] = PiecewiseLinearCurve{{nodes.data(), std::size_t(n_nodes)},
                                                {g_row, std::size_t(n_nodes)}};
        }

        // node 0 is the worst-case (essential supremum) row
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m; ++j)
            if (row[j].prob > 0.0) worst = std::max(worst, vin.at(row[j].state, 0));
        const double q0 = cost + gamma * worst;
        if (q0 < ws.best[0]) ws.best[0] = q0;

        const double budget = ambiguity.budget(x, a);
        const double cap = std::min(budget, grid.y_max());
        // nodes up to the cap admit a feasible envelope; one greedy pass
        // serves them all because the allocation grows monotonically in the
        // level
        int n_feasible = 0;
        while (n_feasible + 1 < n_nodes && nodes[std::size_t(n_feasible + 1)] <= cap)
            ++n_feasible;
        if (n_feasible > 0) {
            ws.inner.resize(std::size_t(n_feasible));
            maximize_envelope_at_levels(ws.probs, ws.curves, cap,
                                        {nodes.data() + 1, std::size_t(n_feasible)}, ws.inner,
                                        nullptr, ws.env);
            for (int i = 1; i <= n_feasible; ++i) {
                const double q = cost + gamma * ws.inner[std::size_t(i - 1)];
                if (q < ws.best[std::size_t(i)]) ws.best[std::size_t(i)] = q;
            }
        }
        // levels above the budget: empty envelope, use the expectation
        for (int i = n_feasible + 1; i < n_nodes; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j)
                acc += row[j].prob * g_table[std::size_t(row[j].state) * std::size_t(n_nodes) +
                                             std::size_t(i)];
            const double q = cost + gamma * acc / nodes[std::size_t(i)];
            if (q < ws.best[std::size_t(i)]) ws.best[std::size_t(i)] = q;
        }
    }
    std::copy(ws.best.begin(), ws.best.end(), out.begin());
}

std::vector<double> level_scaled_table(const ValueFunction& v, const ConfidenceGrid& grid) {
    const int n_nodes = grid.size();
    std::vector<double> g(std::size_t(v.n_states()) * std::size_t(n_nodes));
    for (int x = 0; x < v.n_states(); ++x)
        for (int i = 0; i < n_nodes; ++i)
            g[std::size_t(x) * std::size_t(n_nodes) + std::size_t(i)] = grid.node(i) * v.at(x, i);
    return g;
}

} // namespace

namespace {

// raw Jacobi sweep followed by the concave-hull projection; the projection
// is the identity wherever the backed-up profile is already concave (always
// true for constant budgets) and bridges the convex kinks the expectation
// extension can introduce above a decision-dependent budget
ValueFunction sweep_and_project(const ValueFunction& v, const Mdp& mdp,
                                const AmbiguitySpec& ambiguity, const ConfidenceGrid& grid,
                                int threads, double* adjustment_out) {
    const int n_states = mdp.n_states();
    ValueFunction out(n_states, grid.size());
    const std::vector<double> g_table = level_scaled_table(v, grid);

    const int n_threads = std::clamp(threads, 1, std::max(1, n_states));
    auto run_range = [&](int x_begin, int x_end) {
        SweepWorkspace ws;
        for (int x = x_begin; x < x_end; ++x)
            backup_state(mdp, ambiguity, grid, v, g_table, x, out.row(x), ws);
    };
    if (n_threads == 1) {
        run_range(0, n_states);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(std::size_t(n_threads - 1));
        const int chunk = (n_states + n_threads - 1) / n_threads;
        for (int t = 1; t < n_threads; ++t) {
            const int b = std::min(t * chunk, n_states);
            const int e = std::min((t + 1) * chunk, n_states);
            if (b < e) pool.emplace_back(run_range, b, e);
        }
        run_range(0, std::min(chunk, n_states));
    }
    const double fix = enforce_concavity(out, grid);
    if (adjustment_out) *adjustment_out = fix;
    return out;
}

} // namespace

ValueFunction apply_bellman(const ValueFunction& v, const Mdp& mdp,
                            const AmbiguitySpec& ambiguity, const ConfidenceGrid& grid,
                            int threads) {
    require_solvable(mdp, ambiguity);
    if (v.n_states() != mdp.n_states() || v.n_nodes() != grid.size())
        throw ValidationError("value table shape does not match the MDP and grid");
    return sweep_and_project(v, mdp, ambiguity, grid, threads, nullptr);
}

BackupResult bellman(const ValueFunction& v, const Mdp& mdp, const AmbiguitySpec& ambiguity,
                     const ConfidenceGrid& grid, int x, int node) {
    require_solvable(mdp, ambiguity);
    if (x < 0 || x >= mdp.n_states()) throw std::domain_error("state index out of range");
    if (node < 0 || node >= grid.size()) throw std::domain_error("grid node index out of range");

    const double gamma = mdp.gamma();
    BackupResult best;
    best.value = std::numeric_limits<double>::infinity();
    best.action = -1;

    for (int a = 0; a < mdp.n_actions(x); ++a) {
        const auto& row = mdp.transitions(x, a);
        const double cost = mdp.cost(x, a);
        double q;
        std::vector<double> xi;
        if (node == 0) {
            double worst = -std::numeric_limits<double>::infinity();
            for (const Transition& t : row)
                if (t.prob > 0.0) worst = std::max(worst, v.at(t.state, 0));
            q = cost + gamma * worst;
        } else {
            const std::size_t m = row.size();
            std::vector<double> probs(m);
            std::vector<std::vector<double>> g_rows(m);
            std::vector<PiecewiseLinearCurve> curves(m);
            for (std::size_t j = 0; j < m; ++j) {
                probs[j] = row[j].prob;
                g_rows[j].resize(std::size_t(grid.size()));
                for (int i = 0; i < grid.size(); ++i)
                    g_rows[j][std::size_t(i)] = grid.node(i) * v.at(row[j].state, i);
                curves[j] = PiecewiseLinearCurve{
                    {grid.nodes().data(), std::size_t(grid.size())},
                    {g_rows[j].data(), g_rows[j].size()}};
            }
            EnvelopeProblem problem;
            problem.level = grid.node(node);
            problem.budget = ambiguity.budget(x, a);
            problem.probs = probs;
            problem.curves = curves;
            EnvelopeSolution sol = maximize_envelope(problem);
            q = cost + gamma * sol.value;
            xi = std::move(sol.xi);
        }
        if (q < best.value) {
            best.value = q;
            best.action = a;
            best.xi = std::move(xi);
        }
    }
    return best;
}

double backup_value_at(const ValueFunction& v, const Mdp& mdp, const AmbiguitySpec& ambiguity,
                       const ConfidenceGrid& grid, int x, double level) {
    require_solvable(mdp, ambiguity);
    if (x < 0 || x >= mdp.n_states()) throw std::domain_error("state index out of range");
    if (!(level > 0.0) || level > grid.y_max())
        throw std::domain_error("confidence level must lie in (0, y_max]");

    const int n = grid.size();
    const double gamma = mdp.gamma();
    double best = std::numeric_limits<double>::infinity();
    EnvelopeWorkspace ws;
    for (int a = 0; a < mdp.n_actions(x); ++a) {
        const auto& row = mdp.transitions(x, a);
        const std::size_t m = row.size();
        std::vector<double> probs(m, 0.0);
        std::vector<std::vector<double>> g_rows(m);
        std::vector<PiecewiseLinearCurve> curves(m);
        for (std::size_t j = 0; j < m; ++j) {
            probs[j] = row[j].prob;
            g_rows[j].resize(std::size_t(n));
            for (int i = 0; i < n; ++i)
                g_rows[j][std::size_t(i)] = grid.node(i) * v.at(row[j].state, i);
            curves[j] = PiecewiseLinearCurve{{grid.nodes().data(), std::size_t(n)},
                                             {g_rows[j].data(), g_rows[j].size()}};
        }
        EnvelopeProblem problem;
        problem.level = level;
        problem.budget = ambiguity.budget(x, a);
        problem.probs = probs;
        problem.curves = curves;
        const EnvelopeSolution sol = maximize_envelope(problem);
        best = std::min(best, mdp.cost(x, a) + gamma * sol.value);
    }
    return best;
}

SolveResult extract_policy_tables(ValueFunction v, const Mdp& mdp,
                                  const AmbiguitySpec& ambiguity, const ConfidenceGrid& grid) {
    require_solvable(mdp, ambiguity);
    if (v.n_states() != mdp.n_states() || v.n_nodes() != grid.size())
        throw ValidationError("value table shape does not match the MDP and grid");

    SolveResult result;
    const int n_states = v.n_states();
    const int n_nodes = grid.size();
    const auto& nodes = grid.nodes();
    const double gamma = mdp.gamma();
    const std::vector<double> g_table = level_scaled_table(v, grid);

    result.greedy_action.assign(std::size_t(n_states) * std::size_t(n_nodes), -1);
    result.xi_offset.assign(std::size_t(n_states) * std::size_t(n_nodes) + 1, 0);

    SweepWorkspace ws;
    std::vector<std::vector<double>> xi_per_action; // [a] -> n_feasible rows of m entries
    std::vector<int> feasible_per_action;
    std::vector<double> best_value;
    std::vector<int> best_action;

    for (int x = 0; x < n_states; ++x) {
        const int n_actions = mdp.n_actions(x);
        xi_per_action.resize(std::size_t(n_actions));
        feasible_per_action.assign(std::size_t(n_actions), 0);
        best_value.assign(std::size_t(n_nodes), std::numeric_limits<double>::infinity());
        best_action.assign(std::size_t(n_nodes), -1);

        for (int a = 0; a < n_actions; ++a) {
            const auto& row = mdp.transitions(x, a);
            const std::size_t m = row.size();
            const double cost = mdp.cost(x, a);

            ws.probs.resize(m);
            ws.curves.resize(m);
            for (std::size_t j = 0; j < m; ++j) {
                ws.probs[j] = row[j].prob;
                const double* g_row =
                    g_table.data() + std::size_t(row[j].state) * std::size_t(n_nodes);
                ws.curves[j] = PiecewiseLinearCurve{{nodes.data(), std::size_t(n_nodes)},
                                                    {g_row, std::size_t(n_nodes)}};
            }

            double worst = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < m; ++j)
                if (row[j].prob > 0.0) worst = std::max(worst, v.at(row[j].state, 0));
            const double q0 = cost + gamma * worst;
            if (q0 < best_value[0]) {
                best_value[0] = q0;
                best_action[0] = a;
            }

            const double budget = ambiguity.budget(x, a);
            const double cap = std::min(budget, grid.y_max());
            int n_feasible = 0;
            while (n_feasible + 1 < n_nodes && nodes[std::size_t(n_feasible + 1)] <= cap)
                ++n_feasible;
            feasible_per_action[std::size_t(a)] = n_feasible;
            if (n_feasible > 0) {
                ws.inner.resize(std::size_t(n_feasible));
                xi_per_action[std::size_t(a)].resize(std::size_t(n_feasible) * m);
                maximize_envelope_at_levels(ws.probs, ws.curves, cap,
                                            {nodes.data() + 1, std::size_t(n_feasible)}, ws.inner,
                                            xi_per_action[std::size_t(a)].data(), ws.env);
                for (int i = 1; i <= n_feasible; ++i) {
                    const double q = cost + gamma * ws.inner[std::size_t(i - 1)];
                    if (q < best_value[std::size_t(i)]) {
                        best_value[std::size_t(i)] = q;
                        best_action[std::size_t(i)] = a;
                    }
                }
            }
            for (int i = n_feasible + 1; i < n_nodes; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < m; ++j)
                    acc += row[j].prob * g_table[std::size_t(row[j].state) * std::size_t(n_nodes) +
                                                 std::size_t(i)];
                const double q = cost + gamma * acc / nodes[std::size_t(i)];
                if (q < best_value[std::size_t(i)]) {
                    best_value[std::size_t(i)] = q;
                    best_action[std::size_t(i)] = a;
                }
            }
        }

        for (int i = 0; i < n_nodes; ++i) {
            const std::size_t k = std::size_t(x) * std::size_t(n_nodes) + std::size_t(i);
            const int a = best_action[std::size_t(i)];
            result.greedy_action[k] = a;
            if (i > 0) {
                const std::size_t m = mdp.transitions(x, a).size();
                if (i <= feasible_per_action[std::size_t(a)]) {
                    const double* row_xi =
                        xi_per_action[std::size_t(a)].data() + std::size_t(i - 1) * m;
                    result.xi.insert(result.xi.end(), row_xi, row_xi + m);
                } else {
                    result.xi.insert(result.xi.end(), m, 1.0); // expectation extension
                }
            }
            result.xi_offset[k + 1] = std::uint32_t(result.xi.size());
        }
    }
    result.v = std::move(v);
    return result;
}

SolveResult value_iteration(const Mdp& mdp, const AmbiguitySpec& ambiguity,
                            const ConfidenceGrid& grid, const SolverConfig& config) {
    return value_iteration_from(ValueFunction(mdp.n_states(), grid.size(), 0.0), mdp, ambiguity,
                                grid, config);
}

SolveResult value_iteration_from(ValueFunction v0, const Mdp& mdp,
                                 const AmbiguitySpec& ambiguity, const ConfidenceGrid& grid,
                                 const SolverConfig& config) {
    require_solvable(mdp, ambiguity);
    if (!(config.epsilon > 0.0)) throw ValidationError("convergence threshold must be positive");
    if (config.max_sweeps < 1) throw ValidationError("need at least one sweep");

    ValueFunction v = std::move(v0);
    double residual = std::numeric_limits<double>::infinity();
    double worst_gap = 0.0;
    double worst_fix = 0.0;
    int sweeps = 0;
    bool converged = false;
    while (sweeps < config.max_sweeps) {
        double fix = 0.0;
        ValueFunction next = sweep_and_project(v, mdp, ambiguity, grid, config.threads, &fix);
        residual = sup_norm_diff(next, v);
        v = std::move(next);
        ++sweeps;
        worst_fix = std::max(worst_fix, fix);
        if (config.track_concavity)
            worst_gap = std::max(worst_gap, check_concavity(v, grid).worst_gap);
        if (residual < config.epsilon) {
            converged = true;
            break;
        }
    }

    SolveResult result = extract_policy_tables(std::move(v), mdp, ambiguity, grid);
    result.iterations = sweeps;
    result.final_residual = residual;
    result.converged = converged;
    result.max_concavity_gap = worst_gap;
    result.max_concavity_adjustment = worst_fix;
    return result;
}

ConfidenceGrid grid_for(const AmbiguitySpec& ambiguity, int n, double y_min) {
    return ConfidenceGrid::make(n, y_min, std::max(1.0, ambiguity.max_budget()));
}

} // namespace ncvar
