#include "ncvar/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ncvar/common.hpp"

namespace ncvar {

Policy::Policy(const Mdp& mdp, const AmbiguitySpec& ambiguity, const ConfidenceGrid& grid,
               const SolveResult& result)
    : mdp_(mdp), ambiguity_(ambiguity), grid_(grid), result_(result) {
    ambiguity.check(mdp);
    if (result.v.n_states() != mdp.n_states() || result.v.n_nodes() != grid.size())
        throw ValidationError("solve result does not match the MDP and grid");
    const int n = grid.size();
    g_table_.resize(std::size_t(mdp.n_states()) * std::size_t(n));
    for (int x = 0; x < mdp.n_states(); ++x)
        for (int i = 0; i < n; ++i)
            g_table_[std::size_t(x) * std::size_t(n) + std::size_t(i)] =
                grid.node(i) * result.v.at(x, i);
}

double Policy::action_value(int x, int a, double y, PolicyWorkspace& ws,
                            std::vector<double>* xi_out) const {
    const auto& row = mdp_.transitions(x, a);
    const std::size_t m = row.size();
    const int n = grid_.size();
    ws.probs.resize(m);
    ws.curves.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        ws.probs[j] = row[j].prob;
        const double* g_row = g_table_.data() + std::size_t(row[j].state) * std::size_t(n);
        ws.curves[j] = PiecewiseLinearCurve{{grid_.nodes().data(), std::size_t(n)},
                                            {g_row, std::size_t(n)}};
    }

    const double budget = ambiguity_.budget(x, a);
    double value;
    if (budget < y) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j)
            acc += ws.probs[j] * curve_value(ws.curves[j], y);
        value = acc / y;
        if (xi_out) xi_out->assign(m, 1.0);
    } else {
        const double cap = std::min(budget, grid_.y_max());
        const double levels[1] = {y};
        double out = 0.0;
        if (xi_out) xi_out->resize(m);
        maximize_envelope_at_levels(ws.probs, ws.curves, cap, levels, {&out, 1},
                                    xi_out ? xi_out->data() : nullptr, ws.env);
        value = out;
    }
    return mdp_.cost(x, a) + mdp_.gamma() * value;
}

Policy::Decision Policy::decide(int x, double y, PolicyWorkspace& ws) const {
    if (x < 0 || x >= mdp_.n_states()) throw std::domain_error("state index out of range");
    if (!(y > 0.0) || y > grid_.y_max())
        throw std::domain_error("confidence level must lie in (0, y_max]");

    const int n = grid_.size();
    const int lo = grid_.lower_index(y);
    if (y == grid_.node(lo) && lo > 0) {
        // exactly on a node: stored tables
        ws.xi.assign(result_.xi_at(x, lo).begin(), result_.xi_at(x, lo).end());
        return {result_.action_at(x, lo), ws.xi};
    }

    // between nodes: candidates are the greedy actions of both bracket
    // nodes, judged by the interpolated backup at the exact level
    const int hi = std::min(lo + 1, n - 1);
    int candidates[2] = {result_.action_at(x, lo), result_.action_at(x, hi)};
    if (candidates[1] < candidates[0]) std::swap(candidates[0], candidates[1]);
    const int n_cand = candidates[0] == candidates[1] ? 1 : 2;

    int best_action = -1;
    double best_q = std::numeric_limits<double>::infinity();
    std::vector<double> xi_tmp;
    for (int c = 0; c < n_cand; ++c) {
        std::vector<double> xi_here;
        const double q = action_value(x, candidates[c], y, ws, &xi_here);
        if (q < best_q) {
            best_q = q;
            best_action = candidates[c];
            xi_tmp = std::move(xi_here);
        }
    }
    ws.xi = std::move(xi_tmp);
    return {best_action, ws.xi};
}

Policy::Step Policy::step(int x, double y, int observed_next) const {
    PolicyWorkspace ws;
    const Decision d = decide(x, y, ws);
    const auto& row = mdp_.transitions(x, d.action);
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (row[j].state == observed_next) {
            const double y_next = std::clamp(y * d.xi[j], grid_.y_min(), grid_.y_max());
            return {d.action, y_next};
        }
    }
    throw std::domain_error("observed successor is outside the nominal support");
}

AdversarialKernel::AdversarialKernel(const Mdp& mdp, const ConfidenceGrid& grid,
                                     const SolveResult& result)
    : mdp_(mdp), grid_(grid), result_(result) {
    if (result.v.n_states() != mdp.n_states() || result.v.n_nodes() != grid.size())
        throw ValidationError("solve result does not match the MDP and grid");
}

std::vector<Transition> AdversarialKernel::row(int x, int node) const {
    if (x < 0 || x >= mdp_.n_states()) throw std::domain_error("state index out of range");
    if (node < 0 || node >= grid_.size()) throw std::domain_error("grid node index out of range");
    const auto xi = result_.xi_at(x, node);
    if (xi.empty()) throw std::domain_error("no stored maximizer at this grid node");
    const int a = result_.action_at(x, node);
    const auto& nominal = mdp_.transitions(x, a);
    std::vector<Transition> out(nominal.size());
    for (std::size_t j = 0; j < nominal.size(); ++j)
        out[j] = {nominal[j].state, nominal[j].prob * xi[j]};
    return out;
}

} // namespace ncvar
