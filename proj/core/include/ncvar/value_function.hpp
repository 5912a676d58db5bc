#pragma once

#include <span>
#include <vector>

#include "ncvar/confidence_grid.hpp"

namespace ncvar {

/// Table V(x, y_i) on the augmented state space: one row per MDP state, one
/// column per confidence-grid node. Column 0 (level 0) stores the worst-case
/// value; interpolation never reads it because level * value vanishes there.
class ValueFunction {
public:
    ValueFunction() = default;
    ValueFunction(int n_states, int n_nodes, double init = 0.0)
        : n_states_(n_states), n_nodes_(n_nodes),
          data_(std::size_t(n_states) * std::size_t(n_nodes), init) {}

    int n_states() const { return n_states_; }
    int n_nodes() const { return n_nodes_; }

    double& at(int x, int i) { return data_[index(x, i)]; }
    double at(int x, int i) const { return data_[index(x, i)]; }

    std::span<const double> row(int x) const {
        return {data_.data() + index(x, 0), std::size_t(n_nodes_)};
    }
    std::span<double> row(int x) {
        return {data_.data() + index(x, 0), std::size_t(n_nodes_)};
    }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    std::size_t index(int x, int i) const {
        return std::size_t(x) * std::size_t(n_nodes_) + std::size_t(i);
    }
    int n_states_ = 0;
    int n_nodes_ = 0;
    std::vector<double> data_;
};

/// Piecewise-linear interpolation of the product level * value:
/// returns y_i V(x,y_i) + (y_{i+1} V(x,y_{i+1}) - y_i V(x,y_i)) * (y - y_i)
/// / (y_{i+1} - y_i) on the bracketing nodes, and 0 at y = 0. Throws
/// std::domain_error for y outside [0, y_max].
double interpolate(const ValueFunction& v, const ConfidenceGrid& grid, int x, double y);

/// One concavity defect: at node i of a state, the forward slope of
/// y_i V(x, y_i) exceeds the backward slope by `gap`.
struct ConcavityReport {
    struct Violation {
        int state = 0;
        int node = 0;
        double gap = 0.0;
    };
    std::vector<Violation> violations;
    double worst_gap = 0.0;
    bool ok() const { return violations.empty(); }
};

/// Verifies that y_i V(x, y_i) is concave in the node index for every state,
/// within tol on slope differences.
ConcavityReport check_concavity(const ValueFunction& v, const ConfidenceGrid& grid,
                                double tol = 1e-9);

/// Replaces each state's level-scaled profile by its upper concave hull.
/// Profiles that are already concave pass through bit-identical; convex
/// kinks (which the expectation extension can create at levels above a
/// state-action budget) are bridged from above, the conservative direction
/// for a cost. Returns the largest upward adjustment applied to any value.
double enforce_concavity(ValueFunction& v, const ConfidenceGrid& grid);

/// Sup-norm distance between two tables of identical shape.
double sup_norm_diff(const ValueFunction& a, const ValueFunction& b);

} // namespace ncvar
