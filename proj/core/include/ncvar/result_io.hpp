#pragma once

#include <string>
#include <vector>

#include "ncvar/confidence_grid.hpp"
#include "ncvar/mdp.hpp"
#include "ncvar/rollout.hpp"
#include "ncvar/solver.hpp"

namespace ncvar {

/// One line per augmented grid point with header
/// `state,row,col,y,value,action`; row/col are -1 for non-grid states.
/// Numbers use shortest round-trip decimal form.
void write_result_csv(const SolveResult& result, const Mdp& mdp, const ConfidenceGrid& grid,
                      const std::string& path);

struct LoadedResult {
    ValueFunction v;
    std::vector<int> greedy_action;
};

/// Reads a table written by write_result_csv back; the level column must
/// match the grid nodes exactly.
LoadedResult load_result_csv(const std::string& path, int n_states, const ConfidenceGrid& grid);

/// Solve metadata as JSON: iterations, residual, convergence, the caller's
/// configuration echo (JSON text) and the wall time.
void write_solve_summary(const SolveResult& result, const std::string& config_echo_json,
                         double wall_seconds, const std::string& path);

void write_rollout_report(const RolloutReport& report, const std::string& path);

/// One cost per line, shortest round-trip decimal.
void write_cost_samples(const RolloutReport& report, const std::string& path);

} // namespace ncvar
