#pragma once

#include <limits>
#include <vector>

#include "ncvar/distribution.hpp"

namespace ncvar {

/// Value of a dual risk maximization together with one maximizing density
/// ratio. `density[i]` is Q(i)/P(i), aligned with the distribution's outcome
/// order; outcomes with probability below kProbFloor get ratio 0.
struct DualResult {
    double value = 0.0;
    std::vector<double> density;
};

/// Per-outcome uncertainty budget. Every entry must satisfy
/// 1 <= kappa <= k_max (validated on construction).
class BudgetVector {
public:
    explicit BudgetVector(std::vector<double> values,
                          double k_max = std::numeric_limits<double>::infinity());
    static BudgetVector constant(double kappa, std::size_t n,
                                 double k_max = std::numeric_limits<double>::infinity());

    const std::vector<double>& values() const { return values_; }
    double k_max() const { return k_max_; }

private:
    std::vector<double> values_;
    double k_max_;
};

/// Conditional value-at-risk of the cost Z at confidence level alpha in
/// (0, 1]: the mean of the worst alpha-tail, computed exactly by filling
/// probability mass alpha from the largest outcomes downward.
double cvar(const DiscreteDistribution& dist, double alpha);

/// Dual form of cvar: maximizes E_Q[Z] over density ratios Q/P in
/// [0, 1/alpha] with unit total mass. Value equals cvar(dist, alpha).
DualResult cvar_dual(const DiscreteDistribution& dist, double alpha);

/// Entropic value-at-risk: inf over t > 0 of (ln E[e^{tZ}] - ln alpha) / t,
/// solved by bracketing plus golden-section search on the log-t axis to a
/// 1e-9 objective tolerance. alpha = 1 returns the mean.
double evar(const DiscreteDistribution& dist, double alpha);

/// Risk measure whose dual envelope caps the density ratio per outcome at
/// budget(i)/alpha. Solved exactly as a fractional knapsack. With a unit
/// budget this is cvar; with a constant budget k it equals cvar at
/// confidence level alpha/k.
DualResult ncvar(const DiscreteDistribution& dist, double alpha, const BudgetVector& budget);
DualResult ncvar(const DiscreteDistribution& dist, double alpha, double budget);

/// Maximize E_Q[Z] over densities with Q(i)/P(i) in [0, ratio_bound[i]] and
/// unit mass. The shared engine behind cvar_dual and ncvar. Throws
/// ValidationError when the bound set admits no density (E_P[bound] < 1).
DualResult max_expectation_under_ratio_bound(const DiscreteDistribution& dist,
                                             std::span<const double> ratio_bound);

/// Confidence-level shift for a fixed density-ratio uncertainty budget
/// K >= 1: the robust problem at level alpha equals the nominal problem at
/// alpha / K.
double rn_reduction(double alpha, double K);

/// Confidence-level shift for a fixed KL uncertainty budget ln(kappa),
/// kappa >= 1: the robust problem at level alpha maps to an entropic-risk
/// problem at alpha / kappa^(1/alpha).
double kl_reduction(double alpha, double kappa);

} // namespace ncvar
