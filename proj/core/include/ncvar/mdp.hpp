#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ncvar {

/// One sparse kernel entry: successor state and its probability.
struct Transition {
    int state = 0;
    double prob = 0.0;
    bool operator==(const Transition&) const = default;
};

/// Cost and successor row of one (state, action) pair.
struct ActionModel {
    double cost = 0.0;
    std::vector<Transition> next;
    bool operator==(const ActionModel&) const = default;
};

struct Cell {
    int row = 0;
    int col = 0;
    bool operator==(const Cell&) const = default;
};

/// Geometry a grid-built MDP remembers about itself, enough to render
/// heatmaps and map cells to states. Obstacles are resolved coordinates.
struct GridMeta {
    int rows = 0;
    int cols = 0;
    Cell start;
    Cell goal;
    std::vector<Cell> obstacles;
    double move_cost = 1.0;
    double collision_cost = 40.0;
    double intended_prob = 0.95;
    bool operator==(const GridMeta&) const = default;

    int cell_state(int r, int c) const { return r * cols + c; }
    int terminal_state() const { return rows * cols; }
};

inline constexpr double kRowSumTol = 1e-10;

/// Tabular MDP: per-state action lists with deterministic costs and sparse
/// transition rows, a discount in [0, 1) and a start state. Immutable once
/// built, so it can be shared read-only across solver threads.
class Mdp {
public:
    Mdp() = default;
    Mdp(int n_states, double gamma, int start_state);

    int n_states() const { return int(states_.size()); }
    int n_actions(int x) const { return int(states_[std::size_t(x)].size()); }
    double gamma() const { return gamma_; }
    int start_state() const { return start_; }

    double cost(int x, int a) const { return states_[std::size_t(x)][std::size_t(a)].cost; }
    const std::vector<Transition>& transitions(int x, int a) const {
        return states_[std::size_t(x)][std::size_t(a)].next;
    }
    const std::vector<ActionModel>& actions(int x) const { return states_[std::size_t(x)]; }

    void add_action(int x, ActionModel model);
    void set_grid(GridMeta meta) { grid_ = std::move(meta); }
    const std::optional<GridMeta>& grid() const { return grid_; }

    double max_abs_cost() const;
    /// |V| can never exceed this under any policy: max |C| / (1 - gamma).
    double value_bound() const;

    bool operator==(const Mdp&) const = default;

private:
    std::vector<std::vector<ActionModel>> states_;
    double gamma_ = 0.95;
    int start_ = 0;
    std::optional<GridMeta> grid_;
};

/// Structural findings of validate(); empty lists mean a well-formed model.
struct MdpDiagnostics {
    std::vector<std::pair<int, int>> bad_row_sums;   // (state, action)
    std::vector<std::pair<int, int>> negative_probs; // (state, action)
    bool goal_unreachable = false;
    double max_abs_cost = 0.0;
    bool cost_bounded = true;

    bool ok() const {
        return bad_row_sums.empty() && negative_probs.empty() && !goal_unreachable && cost_bounded;
    }
    std::string to_string() const;
};

/// Checks kernel rows, cost boundedness and (for grid MDPs) that the
/// terminal state is reachable from the start by positive-probability moves.
MdpDiagnostics validate(const Mdp& mdp);

/// How the transition kernel may deviate from nominal.
enum class AmbiguityKind {
    none,                  ///< kernel known exactly
    rn_fixed,              ///< density ratio within [0, K] for all (x, a)
    kl_fixed,              ///< KL divergence within ln(kappa) for all (x, a)
    rn_decision_dependent, ///< density ratio within [0, kappa(x, a)]
};

std::string to_string(AmbiguityKind kind);
AmbiguityKind ambiguity_kind_from_string(const std::string& name);

/// Uncertainty model attached to an Mdp. For rn_fixed, K is the ratio cap;
/// for kl_fixed, K stores kappa (the divergence budget is ln kappa); for
/// rn_decision_dependent, budget_field holds kappa(x, a) and k_max bounds it.
struct AmbiguitySpec {
    AmbiguityKind kind = AmbiguityKind::none;
    double K = 1.0;
    std::vector<std::vector<double>> budget_field;
    double k_max = 1.0;

    /// Density-ratio cap the envelope uses for (x, a); 1 when there is no
    /// uncertainty. Not meaningful for kl_fixed.
    double budget(int x, int a) const;
    /// Largest budget value anywhere; drives the top of the level grid.
    double max_budget() const;
    bool solvable_by_value_iteration() const { return kind != AmbiguityKind::kl_fixed; }

    /// Throws ValidationError unless budgets satisfy 1 <= kappa <= k_max and
    /// the field (when present) matches the MDP's shape.
    void check(const Mdp& mdp) const;

    static AmbiguitySpec none();
    static AmbiguitySpec rn(double K);
    static AmbiguitySpec kl(double kappa);
    static AmbiguitySpec decision_dependent(std::vector<std::vector<double>> field, double k_max);
};

/// Decision-dependent budget field with kappa(x, a) drawn uniformly from
/// [lo, hi], deterministic in the seed.
AmbiguitySpec make_uniform_budget(const Mdp& mdp, double lo, double hi, std::uint64_t seed);

} // namespace ncvar
