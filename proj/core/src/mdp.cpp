#include "ncvar/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "ncvar/common.hpp"
#include "ncvar/rng.hpp"

namespace ncvar {

Mdp::Mdp(int n_states, double gamma, int start_state)
    : states_(std::size_t(n_states)), gamma_(gamma), start_(start_state) {
    if (n_states < 1) throw ValidationError("MDP needs at least one state");
    if (!(gamma >= 0.0) || gamma >= 1.0)
        throw ValidationError("discount factor must lie in [0, 1)");
    if (start_state < 0 || start_state >= n_states)
        throw ValidationError("start state out of range");
}

void Mdp::add_action(int x, ActionModel model) {
    if (x < 0 || x >= n_states()) throw ValidationError("state index out of range");
    for (const Transition& t : model.next) {
        if (t.state < 0 || t.state >= n_states())
            throw ValidationError("transition target out of range");
    }
    states_[std::size_t(x)].push_back(std::move(model));
}

double Mdp::max_abs_cost() const {
    double m = 0.0;
    for (const auto& acts : states_)
        for (const auto& a : acts) m = std::max(m, std::fabs(a.cost));
    return m;
}

double Mdp::value_bound() const { return max_abs_cost() / (1.0 - gamma_); }

std::string MdpDiagnostics::to_string() const {
    std::ostringstream out;
    if (ok()) return "ok";
    for (auto [x, a] : bad_row_sums) out << "row sum violation at state " << x << " action " << a << "\n";
    for (auto [x, a] : negative_probs) out << "negative probability at state " << x << " action " << a << "\n";
    if (goal_unreachable) out << "goal state unreachable from start\n";
    if (!cost_bounded) out << "cost table is unbounded\n";
    return out.str();
}

MdpDiagnostics validate(const Mdp& mdp) {
    MdpDiagnostics diag;
    for (int x = 0; x < mdp.n_states(); ++x) {
        for (int a = 0; a < mdp.n_actions(x); ++a) {
            double sum = 0.0;
            bool negative = false;
            for (const Transition& t : mdp.transitions(x, a)) {
                if (t.prob < 0.0) negative = true;
                sum += t.prob;
            }
            if (negative) diag.negative_probs.emplace_back(x, a);
            if (std::fabs(sum - 1.0) > kRowSumTol) diag.bad_row_sums.emplace_back(x, a);
            if (!std::isfinite(mdp.cost(x, a))) diag.cost_bounded = false;
            diag.max_abs_cost = std::max(diag.max_abs_cost, std::fabs(mdp.cost(x, a)));
        }
    }
    if (mdp.grid()) {
        // breadth-first search over positive-probability edges
        const int goal = mdp.grid()->terminal_state();
        std::vector<char> seen(std::size_t(mdp.n_states()), 0);
        std::queue<int> queue;
        queue.push(mdp.start_state());
        seen[std::size_t(mdp.start_state())] = 1;
        while (!queue.empty()) {
            int x = queue.front();
            queue.pop();
            if (x == goal) break;
            for (int a = 0; a < mdp.n_actions(x); ++a)
                for (const Transition& t : mdp.transitions(x, a))
                    if (t.prob > 0.0 && !seen[std::size_t(t.state)]) {
                        seen[std::size_t(t.state)] = 1;
                        queue.push(t.state);
                    }
        }
        diag.goal_unreachable = !seen[std::size_t(goal)];
    }
    return diag;
}

std::string to_string(AmbiguityKind kind) {
    switch (kind) {
    case AmbiguityKind::none: return "none";
    case AmbiguityKind::rn_fixed: return "rn_fixed";
    case AmbiguityKind::kl_fixed: return "kl_fixed";
    case AmbiguityKind::rn_decision_dependent: return "rn_decision_dependent";
    }
    return "unknown";
}

AmbiguityKind ambiguity_kind_from_string(const std::string& name) {
    if (name == "none") return AmbiguityKind::none;
    if (name == "rn_fixed") return AmbiguityKind::rn_fixed;
    if (name == "kl_fixed") return AmbiguityKind::kl_fixed;
    if (name == "rn_decision_dependent") return AmbiguityKind::rn_decision_dependent;
    throw ValidationError("unknown ambiguity kind: " + name);
}

double AmbiguitySpec::budget(int x, int a) const {
    switch (kind) {
    case AmbiguityKind::none: return 1.0;
    case AmbiguityKind::rn_fixed: return K;
    case AmbiguityKind::rn_decision_dependent:
        return budget_field[std::size_t(x)][std::size_t(a)];
    case AmbiguityKind::kl_fixed:
        throw ValidationError("KL ambiguity has no density-ratio budget");
    }
    return 1.0;
}

double AmbiguitySpec::max_budget() const {
    switch (kind) {
    case AmbiguityKind::none: return 1.0;
    case AmbiguityKind::rn_fixed: return K;
    case AmbiguityKind::rn_decision_dependent: return k_max;
    case AmbiguityKind::kl_fixed: return 1.0;
    }
    return 1.0;
}

void AmbiguitySpec::check(const Mdp& mdp) const {
    switch (kind) {
    case AmbiguityKind::none: return;
    case AmbiguityKind::rn_fixed:
    case AmbiguityKind::kl_fixed:
        if (!(K >= 1.0) || !std::isfinite(K))
            throw ValidationError("fixed uncertainty budget must be >= 1");
        return;
    case AmbiguityKind::rn_decision_dependent:
        if (!(k_max >= 1.0)) throw ValidationError("budget upper bound must be >= 1");
        if (int(budget_field.size()) != mdp.n_states())
            throw ValidationError("budget field shape does not match the MDP");
        for (int x = 0; x < mdp.n_states(); ++x) {
            if (int(budget_field[std::size_t(x)].size()) != mdp.n_actions(x))
                throw ValidationError("budget field shape does not match the MDP");
            for (double v : budget_field[std::size_t(x)])
                if (!std::isfinite(v) || v < 1.0 || v > k_max)
                    throw ValidationError("budget entries must satisfy 1 <= kappa <= k_max");
        }
        return;
    }
}

AmbiguitySpec AmbiguitySpec::none() { return {}; }

AmbiguitySpec AmbiguitySpec::rn(double K) {
    AmbiguitySpec spec;
    spec.kind = AmbiguityKind::rn_fixed;
    spec.K = K;
    spec.k_max = K;
    return spec;
}

AmbiguitySpec AmbiguitySpec::kl(double kappa) {
    AmbiguitySpec spec;
    spec.kind = AmbiguityKind::kl_fixed;
    spec.K = kappa;
    spec.k_max = kappa;
    return spec;
}

AmbiguitySpec AmbiguitySpec::decision_dependent(std::vector<std::vector<double>> field,
                                                double k_max) {
    AmbiguitySpec spec;
    spec.kind = AmbiguityKind::rn_decision_dependent;
    spec.budget_field = std::move(field);
    spec.k_max = k_max;
    return spec;
}

AmbiguitySpec make_uniform_budget(const Mdp& mdp, double lo, double hi, std::uint64_t seed) {
    if (!(lo >= 1.0) || !(hi >= lo))
        throw ValidationError("uniform budget range must satisfy 1 <= lo <= hi");
    Rng rng(seed);
    std::vector<std::vector<double>> field(std::size_t(mdp.n_states()));
    for (int x = 0; x < mdp.n_states(); ++x) {
        field[std::size_t(x)].resize(std::size_t(mdp.n_actions(x)));
        for (int a = 0; a < mdp.n_actions(x); ++a)
            field[std::size_t(x)][std::size_t(a)] = rng.next_range(lo, hi);
    }
    return AmbiguitySpec::decision_dependent(std::move(field), hi);
}

} // namespace ncvar
