#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ncvar/confidence_grid.hpp"
#include "ncvar/mdp.hpp"
#include "ncvar/value_function.hpp"

namespace ncvar {

struct SolverConfig {
    double epsilon = 1e-6;  ///< sup-norm residual threshold
    int max_sweeps = 2000;
    int threads = 1;        ///< data-parallel sweep width; output is identical for any value
    bool track_concavity = true; ///< run the concavity diagnostic after every sweep
};

/// Converged value table with the greedy policy and the envelope maximizers
/// needed to execute it and to build the worst-case kernel.
struct SolveResult {
    ValueFunction v;
    std::vector<int> greedy_action;       ///< [x * n_nodes + node]
    std::vector<std::uint32_t> xi_offset; ///< [x * n_nodes + node] -> start in xi
    std::vector<double> xi;               ///< maximizers, aligned with transitions(x, action)
    int iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
    double max_concavity_gap = 0.0;        ///< worst post-sweep concavity defect seen
    double max_concavity_adjustment = 0.0; ///< largest hull lift applied by any sweep

    int action_at(int x, int node) const;
    std::span<const double> xi_at(int x, int node) const; ///< empty at node 0
};

/// Single-point backup of the interpolated Bellman operator at state x and
/// grid node index `node`. Node 0 is the worst-case row: min over actions of
/// cost + gamma * max over the successor support of V(., 0). Positive nodes
/// run the envelope maximization; an empty envelope (level above the budget)
/// degrades to the plain expectation. Ties pick the lowest action index.
struct BackupResult {
    double value = 0.0;
    int action = 0;
    std::vector<double> xi; ///< empty at node 0
};
BackupResult bellman(const ValueFunction& v, const Mdp& mdp, const AmbiguitySpec& ambiguity,
                     const ConfidenceGrid& grid, int x, int node);

/// One full Jacobi application of the interpolated operator.
ValueFunction apply_bellman(const ValueFunction& v, const Mdp& mdp,
                            const AmbiguitySpec& ambiguity, const ConfidenceGrid& grid,
                            int threads = 1);

/// Value of a state at an arbitrary confidence level in (0, y_max]: one
/// application of the interpolated backup at the exact level. Sharper than
/// reading the chord of the stored profile between nodes, and identical to
/// the stored values at the nodes of a converged table (up to the residual).
double backup_value_at(const ValueFunction& v, const Mdp& mdp, const AmbiguitySpec& ambiguity,
                       const ConfidenceGrid& grid, int x, double level);

/// Greedy actions and maximizers recomputed from a given value table by one
/// backup pass; used after loading a table from disk.
SolveResult extract_policy_tables(ValueFunction v, const Mdp& mdp,
                                  const AmbiguitySpec& ambiguity, const ConfidenceGrid& grid);

/// Value iteration from V0 = 0 (resp. a caller-supplied V0, which must have
/// a concave level * value profile for the envelope step to stay exact).
/// Runs until the sup-norm residual drops below epsilon or max_sweeps is
/// hit; non-convergence is reported in the result, not thrown.
SolveResult value_iteration(const Mdp& mdp, const AmbiguitySpec& ambiguity,
                            const ConfidenceGrid& grid, const SolverConfig& config = {});
SolveResult value_iteration_from(ValueFunction v0, const Mdp& mdp,
                                 const AmbiguitySpec& ambiguity, const ConfidenceGrid& grid,
                                 const SolverConfig& config = {});

/// Grid sized for an ambiguity model: the top node reaches max(1, k_max) so
/// updated confidence levels stay on the grid.
ConfidenceGrid grid_for(const AmbiguitySpec& ambiguity, int n = 21, double y_min = 1e-4);

} // namespace ncvar
