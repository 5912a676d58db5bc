#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "ncvar/common.hpp"

namespace ncvar::testing {

double cvar_by_t_minimization(const DiscreteDistribution& dist, double alpha) {
    const auto objective = [&](double t) {
        double tail = 0.0;
        for (std::size_t i = 0; i < dist.size(); ++i)
            tail += dist.probs()[i] * std::max(dist.outcomes()[i] - t, 0.0);
        return t + tail / alpha;
    };
    double lo = dist.min_outcome();
    double hi = dist.max_outcome();
    double best = std::numeric_limits<double>::infinity();
    double best_t = lo;
    for (int pass = 0; pass < 3; ++pass) {
        const int n = 20000;
        const double step = (hi - lo) / n;
        for (int k = 0; k <= n; ++k) {
            const double t = lo + step * k;
            const double v = objective(t);
            if (v < best) {
                best = v;
                best_t = t;
            }
        }
        lo = best_t - 2.0 * step;
        hi = best_t + 2.0 * step;
        if (step == 0.0) break;
    }
    // the minimizer is a grid outcome (a VaR); probe them exactly as well
    for (double z : dist.outcomes()) best = std::min(best, objective(z));
    return best;
}

namespace {

double eval_objective(const std::vector<double>& probs, double level,
                      const std::vector<OwnedCurve>& curves, const std::vector<double>& ratios) {
    double acc = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j)
        acc += probs[j] * curve_value(curves[j].view(), level * ratios[j]);
    return acc / level;
}

std::vector<double> kink_ratios(const OwnedCurve& curve, double level, double cap) {
    std::vector<double> ks{0.0, cap};
    for (double knot : curve.knots) {
        const double r = knot / level;
        if (r > 0.0 && r < cap) ks.push_back(r);
    }
    return ks;
}

std::vector<double> finalize_candidates(std::vector<double> cand, double cap, int uniform_n) {
    for (int k = 0; k <= uniform_n; ++k) cand.push_back(cap * double(k) / double(uniform_n));
    std::vector<double> out;
    for (double c : cand)
        if (c >= -1e-12 && c <= cap + 1e-12) out.push_back(std::clamp(c, 0.0, cap));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

double oracle_envelope_max(const std::vector<double>& probs, double level, double budget,
                           const std::vector<OwnedCurve>& curves, int grid_per_dim) {
    const std::size_t m = probs.size();
    if (budget < level) {
        // empty constraint set: expectation extension
        return eval_objective(probs, level, curves, std::vector<double>(m, 1.0));
    }
    double domain = std::numeric_limits<double>::infinity();
    for (const auto& c : curves) domain = std::min(domain, c.knots.back());
    const double cap = std::min(budget, domain) / level;

    if (m == 1) return eval_objective(probs, level, curves, {1.0 / probs[0]});

    std::vector<std::vector<double>> kinks(m);
    for (std::size_t j = 0; j < m; ++j) kinks[j] = kink_ratios(curves[j], level, cap);

    double best = -std::numeric_limits<double>::infinity();
    if (m == 2) {
        std::vector<double> cand = kinks[0];
        for (double k1 : kinks[1]) cand.push_back((1.0 - probs[1] * k1) / probs[0]);
        cand = finalize_candidates(std::move(cand), cap, grid_per_dim);
        for (double r0 : cand) {
            const double r1 = (1.0 - probs[0] * r0) / probs[1];
            if (r1 < -1e-12 || r1 > cap + 1e-12) continue;
            best = std::max(best,
                            eval_objective(probs, level, curves, {r0, std::clamp(r1, 0.0, cap)}));
        }
        return best;
    }
    if (m == 3) {
        std::vector<double> cand0 = kinks[0];
        for (double k1 : kinks[1])
            for (double k2 : kinks[2])
                cand0.push_back((1.0 - probs[1] * k1 - probs[2] * k2) / probs[0]);
        std::vector<double> cand1 = kinks[1];
        for (double k0 : kinks[0])
            for (double k2 : kinks[2])
                cand1.push_back((1.0 - probs[0] * k0 - probs[2] * k2) / probs[1]);
        cand0 = finalize_candidates(std::move(cand0), cap, grid_per_dim);
        cand1 = finalize_candidates(std::move(cand1), cap, grid_per_dim);
        for (double r0 : cand0) {
            for (double r1 : cand1) {
                const double r2 = (1.0 - probs[0] * r0 - probs[1] * r1) / probs[2];
                if (r2 < -1e-12 || r2 > cap + 1e-12) continue;
                best = std::max(best, eval_objective(probs, level, curves,
                                                     {r0, r1, std::clamp(r2, 0.0, cap)}));
            }
        }
        return best;
    }
    throw ValidationError("oracle supports at most 3 successors");
}

std::vector<double> reference_expected_value_iteration(const Mdp& mdp, double tol,
                                                       int max_sweeps) {
    std::vector<double> v(std::size_t(mdp.n_states()), 0.0);
    std::vector<double> next(v.size(), 0.0);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double residual = 0.0;
        for (int x = 0; x < mdp.n_states(); ++x) {
            double best = std::numeric_limits<double>::infinity();
            for (int a = 0; a < mdp.n_actions(x); ++a) {
                double acc = mdp.cost(x, a);
                for (const Transition& t : mdp.transitions(x, a))
                    acc += mdp.gamma() * t.prob * v[std::size_t(t.state)];
                best = std::min(best, acc);
            }
            next[std::size_t(x)] = best;
            residual = std::max(residual, std::fabs(best - v[std::size_t(x)]));
        }
        std::swap(v, next);
        if (residual < tol) return v;
    }
    throw NumericError("reference value iteration did not converge");
}

DiscreteDistribution random_distribution(Rng& rng, int max_outcomes) {
    const int n = 1 + int(rng.next_below(std::uint64_t(max_outcomes)));
    std::vector<double> outcomes(std::size_t(n), 0.0);
    std::vector<double> probs(std::size_t(n), 0.0);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        outcomes[std::size_t(i)] = rng.next_range(-5.0, 10.0);
        probs[std::size_t(i)] = rng.next_unit() + 0.02;
        total += probs[std::size_t(i)];
    }
    for (double& p : probs) p /= total;
    return DiscreteDistribution(std::move(outcomes), std::move(probs));
}

Mdp random_mdp(Rng& rng, int n_states, int n_actions, double gamma) {
    Mdp mdp(n_states, gamma, 0);
    for (int x = 0; x < n_states; ++x) {
        for (int a = 0; a < n_actions; ++a) {
            ActionModel model;
            model.cost = rng.next_unit();
            double total = 0.0;
            std::vector<double> w(std::size_t(n_states), 0.0);
            for (int s = 0; s < n_states; ++s) {
                w[std::size_t(s)] = rng.next_unit() + 0.05;
                total += w[std::size_t(s)];
            }
            for (int s = 0; s < n_states; ++s)
                model.next.push_back({s, w[std::size_t(s)] / total});
            mdp.add_action(x, std::move(model));
        }
    }
    return mdp;
}

ValueFunction random_concave_value_function(Rng& rng, int n_states, const ConfidenceGrid& grid,
                                            double scale) {
    ValueFunction v(n_states, grid.size());
    for (int x = 0; x < n_states; ++x) {
        double slope = rng.next_range(0.0, scale);
        double g = 0.0;
        for (int i = 1; i < grid.size(); ++i) {
            g += slope * (grid.node(i) - grid.node(i - 1));
            v.at(x, i) = g / grid.node(i);
            slope -= rng.next_range(0.0, scale * 0.3);
        }
        v.at(x, 0) = v.at(x, 1) + rng.next_range(0.0, scale * 0.2);
    }
    return v;
}

OwnedCurve random_concave_curve(Rng& rng, double u_max, int n_knots, double slope_scale) {
    OwnedCurve curve;
    curve.knots.push_back(0.0);
    std::set<double> interior;
    while (int(interior.size()) < n_knots - 2)
        interior.insert(rng.next_range(u_max * 0.05, u_max * 0.95));
    for (double u : interior) curve.knots.push_back(u);
    curve.knots.push_back(u_max);

    curve.values.push_back(0.0);
    double slope = rng.next_range(0.0, slope_scale);
    for (std::size_t k = 1; k < curve.knots.size(); ++k) {
        curve.values.push_back(curve.values.back() +
                               slope * (curve.knots[k] - curve.knots[k - 1]));
        slope -= rng.next_range(0.0, slope_scale * 0.5);
    }
    return curve;
}

} // namespace ncvar::testing
