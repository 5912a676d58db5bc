#pragma once

#include <span>
#include <vector>

#include "ncvar/confidence_grid.hpp"
#include "ncvar/envelope.hpp"
#include "ncvar/mdp.hpp"
#include "ncvar/solver.hpp"

namespace ncvar {

/// Scratch buffers for Policy::decide; one per thread when episodes run in
/// parallel.
struct PolicyWorkspace {
    EnvelopeWorkspace env;
    std::vector<double> probs;
    std::vector<PiecewiseLinearCurve> curves;
    std::vector<double> xi;
};

/// Executes the greedy policy of a solved result on the augmented state
/// (state, confidence level). At grid nodes the stored tables are used
/// directly; between nodes the candidate actions of the two bracketing nodes
/// are re-evaluated through the interpolated backup at the exact level and
/// the cheaper one wins. The caller keeps the MDP, ambiguity, grid and
/// result alive for the Policy's lifetime.
class Policy {
public:
    Policy(const Mdp& mdp, const AmbiguitySpec& ambiguity, const ConfidenceGrid& grid,
           const SolveResult& result);

    struct Decision {
        int action = 0;
        /// Maximizing density ratio, aligned with transitions(x, action);
        /// valid until the workspace is reused.
        std::span<const double> xi;
    };
    Decision decide(int x, double y, PolicyWorkspace& ws) const;

    struct Step {
        int action = 0;
        double y_next = 0.0;
    };
    /// Action at (x, y) plus the confidence-level update after observing the
    /// next state: y * xi(next), clamped to [y_min, y_max].
    Step step(int x, double y, int observed_next) const;

    const ConfidenceGrid& grid() const { return grid_; }
    const Mdp& mdp() const { return mdp_; }

private:
    double action_value(int x, int a, double y, PolicyWorkspace& ws,
                        std::vector<double>* xi_out) const;

    const Mdp& mdp_;
    const AmbiguitySpec& ambiguity_;
    const ConfidenceGrid& grid_;
    const SolveResult& result_;
    std::vector<double> g_table_; // node_j * V(x, j), row per state
};

/// Worst-case transition rows reconstructed from the stored maximizers:
/// Q(x'|x) = xi*(x, node, a*) * P(x'|x, a*) at each augmented grid node.
class AdversarialKernel {
public:
    AdversarialKernel(const Mdp& mdp, const ConfidenceGrid& grid, const SolveResult& result);
    /// Throws std::domain_error when no maximizer is stored at the node
    /// (node 0 has none).
    std::vector<Transition> row(int x, int node) const;

private:
    const Mdp& mdp_;
    const ConfidenceGrid& grid_;
    const SolveResult& result_;
};

} // namespace ncvar
