#include "ncvar/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ncvar/common.hpp"

namespace ncvar {

namespace {

void require_alpha(double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::domain_error("confidence level must lie in (0, 1]");
}

// Outcome indices ordered by outcome descending; equal outcomes keep input
// order, so ties always resolve the same way.
std::vector<std::size_t> descending_order(const std::vector<double>& outcomes) {
    std::vector<std::size_t> order(outcomes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return outcomes[a] > outcomes[b]; });
    return order;
}

} // namespace

BudgetVector::BudgetVector(std::vector<double> values, double k_max)
    : values_(std::move(values)), k_max_(k_max) {
    if (values_.empty()) throw ValidationError("budget vector is empty");
    if (!(k_max_ >= 1.0)) throw ValidationError("budget upper bound must be >= 1");
    for (double v : values_) {
        if (!std::isfinite(v) || v < 1.0 || v > k_max_)
            throw ValidationError("budget entries must satisfy 1 <= kappa <= k_max");
    }
}

BudgetVector BudgetVector::constant(double kappa, std::size_t n, double k_max) {
    return BudgetVector(std::vector<double>(n, kappa), k_max);
}

double cvar(const DiscreteDistribution& dist, double alpha) {
    require_alpha(alpha);
    const auto& z = dist.outcomes();
    const auto& p = dist.probs();
    const auto order = descending_order(z);

    double remaining = alpha;
    double acc = 0.0;
    for (std::size_t i : order) {
        const double take = std::min(p[i], remaining);
        if (take > 0.0) {
            acc += take * z[i];
            remaining -= take;
        }
        if (remaining <= 0.0) break;
    }
    return acc / alpha;
}

DualResult max_expectation_under_ratio_bound(const DiscreteDistribution& dist,
                                             std::span<const double> ratio_bound) {
    const auto& z = dist.outcomes();
    const auto& p = dist.probs();
    if (ratio_bound.size() != p.size())
        throw ValidationError("ratio bound length does not match the distribution");

    double total_cap = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(ratio_bound[i] >= 0.0))
            throw ValidationError("ratio bounds must be non-negative");
        total_cap += p[i] * ratio_bound[i];
    }
    if (total_cap < 1.0 - kMassTol)
        throw ValidationError("density-ratio bounds admit no probability measure (E_P[bound] < 1)");

    const auto order = descending_order(z);
    std::vector<double> mass(p.size(), 0.0);
    double remaining = 1.0;
    double value = 0.0;
    for (std::size_t i : order) {
        if (remaining <= 0.0) break;
        if (p[i] < kProbFloor) continue;
        const double take = std::min(p[i] * ratio_bound[i], remaining);
        mass[i] = take;
        value += take * z[i];
        remaining -= take;
    }
    // total_cap may sit a hair below 1; stretch the filled mass back to 1
    if (remaining > 0.0) {
        const double scale = 1.0 / (1.0 - remaining);
        value *= scale;
        for (double& m : mass) m *= scale;
    }

    DualResult result;
    result.value = value;
    result.density.resize(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        result.density[i] = p[i] < kProbFloor ? 0.0 : mass[i] / p[i];
    return result;
}

DualResult cvar_dual(const DiscreteDistribution& dist, double alpha) {
    require_alpha(alpha);
    std::vector<double> bound(dist.size(), 1.0 / alpha);
    return max_expectation_under_ratio_bound(dist, bound);
}

DualResult ncvar(const DiscreteDistribution& dist, double alpha, const BudgetVector& budget) {
    require_alpha(alpha);
    if (budget.values().size() != dist.size())
        throw ValidationError("budget vector length does not match the distribution");
    std::vector<double> bound(dist.size());
    for (std::size_t i = 0; i < bound.size(); ++i)
        bound[i] = budget.values()[i] / alpha;
    return max_expectation_under_ratio_bound(dist, bound);
}

DualResult ncvar(const DiscreteDistribution& dist, double alpha, double budget) {
    return ncvar(dist, alpha, BudgetVector::constant(budget, dist.size()));
}

double evar(const DiscreteDistribution& dist, double alpha) {
    require_alpha(alpha);
    if (alpha == 1.0) return dist.mean();

    const auto& z = dist.outcomes();
    const auto& p = dist.probs();
    const double z_max = dist.max_outcome();
    const double log_alpha = std::log(alpha);

    // (ln E[e^{tZ}] - ln alpha) / t, evaluated with a max-shift so the
    // exponentials cannot overflow.
    const auto objective = [&](double t) {
        double acc = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i)
            acc += p[i] * std::exp(t * (z[i] - z_max));
        const double value = z_max + (std::log(acc) - log_alpha) / t;
        if (!std::isfinite(value)) throw NumericError("entropic risk objective is not finite");
        return value;
    };

    // Bracket the minimum: the objective blows up as t -> 0+ and tends to the
    // largest outcome as t -> inf, so grow the right edge until it turns up.
    const double t_lo = 1e-8;
    const double t_cap = 1e14;
    double t_hi = 1.0;
    double f_hi = objective(t_hi);
    while (t_hi < t_cap) {
        const double t_next = t_hi * 4.0;
        const double f_next = objective(t_next);
        t_hi = t_next;
        if (f_next > f_hi) {
            f_hi = f_next;
            break;
        }
        f_hi = f_next;
    }

    // Golden-section on the log axis; the objective is unimodal in t.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = std::log(t_lo), hi = std::log(t_hi);
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = objective(std::exp(c));
    double fd = objective(std::exp(d));
    double best = std::min(std::min(fc, fd), f_hi);
    int iterations = 0;
    const int max_iterations = 400;
    while (hi - lo > 1e-12 && std::fabs(fc - fd) > 1e-12) {
        if (++iterations > max_iterations)
            throw NumericError("entropic risk minimization did not converge");
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = objective(std::exp(c));
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = objective(std::exp(d));
        }
        best = std::min(best, std::min(fc, fd));
    }
    return best;
}

double rn_reduction(double alpha, double K) {
    require_alpha(alpha);
    if (!(K >= 1.0) || !std::isfinite(K))
        throw std::domain_error("uncertainty budget K must be >= 1");
    return alpha / K;
}

double kl_reduction(double alpha, double kappa) {
    require_alpha(alpha);
    if (!(kappa >= 1.0) || !std::isfinite(kappa))
        throw std::domain_error("uncertainty budget kappa must be >= 1");
    return alpha / std::pow(kappa, 1.0 / alpha);
}

} // namespace ncvar
