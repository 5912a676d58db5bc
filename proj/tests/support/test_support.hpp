#pragma once

#include <cstdint>
#include <vector>

#include "ncvar/distribution.hpp"
#include "ncvar/envelope.hpp"
#include "ncvar/mdp.hpp"
#include "ncvar/rng.hpp"
#include "ncvar/value_function.hpp"

namespace ncvar::testing {

// ---------------------------------------------------------------------------
// independent oracles (no shared code with the library paths they check)
// ---------------------------------------------------------------------------

/// cvar via direct minimization of t + E[(Z-t)^+] / alpha over a fine t-grid
/// refined around the best coarse point.
double cvar_by_t_minimization(const DiscreteDistribution& dist, double alpha);

/// Owned piecewise-linear curve for envelope oracle problems.
struct OwnedCurve {
    std::vector<double> knots;
    std::vector<double> values;
    PiecewiseLinearCurve view() const { return {knots, values}; }
};

/// Brute-force envelope maximum for up to 3 successors: exhaustive search
/// over a grid of feasible density ratios that is augmented with every kink
/// coordinate (own knots and values implied by the other coordinates'
/// knots), so the true vertex optimum lies on the grid.
double oracle_envelope_max(const std::vector<double>& probs, double level, double budget,
                           const std::vector<OwnedCurve>& curves, int grid_per_dim = 100);

/// Plain risk-neutral value iteration (expected cost), run to tolerance tol.
std::vector<double> reference_expected_value_iteration(const Mdp& mdp, double tol,
                                                       int max_sweeps = 100000);

// ---------------------------------------------------------------------------
// deterministic random instances
// ---------------------------------------------------------------------------

DiscreteDistribution random_distribution(Rng& rng, int max_outcomes = 12);

/// Dense random MDP: every action reaches every state with positive
/// probability, costs in [0, 1].
Mdp random_mdp(Rng& rng, int n_states, int n_actions, double gamma);

/// Value table whose level-scaled profile node * V(x, node) is concave per
/// state, as value iteration maintains. Magnitudes up to `scale`.
ValueFunction random_concave_value_function(Rng& rng, int n_states, const ConfidenceGrid& grid,
                                            double scale);

/// Random concave curve through (0, 0) on [0, u_max] with n_knots knots.
OwnedCurve random_concave_curve(Rng& rng, double u_max, int n_knots, double slope_scale);

} // namespace ncvar::testing
