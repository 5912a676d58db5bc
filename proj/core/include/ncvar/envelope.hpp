#pragma once

#include <span>
#include <vector>

namespace ncvar {

/// Concave piecewise-linear function through (knots[k], values[k]). Knots
/// increase and start at 0 with value 0; for solver curves the knots are the
/// confidence-grid nodes and the values are node * V(successor, node).
struct PiecewiseLinearCurve {
    std::span<const double> knots;
    std::span<const double> values;
};

/// Linear evaluation at u in [knots.front(), knots.back()].
double curve_value(const PiecewiseLinearCurve& curve, double u);

/// Inner maximization of one Bellman backup: maximize
///   sum_j probs[j] * curves[j](level * xi[j]) / level
/// over density ratios xi >= 0 with sum_j probs[j] * xi[j] = 1 and
/// xi[j] <= budget / level. When budget < level the constraint set is empty
/// and the backup degrades to the plain expectation (xi = 1).
struct EnvelopeProblem {
    double level = 1.0;  ///< current confidence level y, > 0
    double budget = 1.0; ///< density-ratio budget kappa(x, a)
    std::span<const double> probs;
    std::span<const PiecewiseLinearCurve> curves;
};

struct EnvelopeSolution {
    double value = 0.0;
    std::vector<double> xi;
    bool expectation_fallback = false;
};

/// Exact solution by greedy marginal allocation over curve segments sorted
/// by slope, valid because the curves are concave. Throws NumericError when
/// a consumed curve turns out non-concave beyond 1e-9, ValidationError on
/// shape mismatches.
EnvelopeSolution maximize_envelope(const EnvelopeProblem& problem);

/// Reusable buffers for the allocation sweep.
class EnvelopeWorkspace {
public:
    void reserve(std::size_t n_successors);
    std::vector<int> segment;
    std::vector<double> allocation;
    std::vector<double> slope;
};

/// Engine shared by maximize_envelope and the solver sweep: runs one greedy
/// pass and reads off the optimum at every requested level. `levels` must be
/// ascending, positive, and bounded by min(cap, knots.back()). Writes the
/// objective per level into values_out; when xi_out is non-null it receives
/// the maximizers row by row (stride = probs.size()).
void maximize_envelope_at_levels(std::span<const double> probs,
                                 std::span<const PiecewiseLinearCurve> curves, double cap,
                                 std::span<const double> levels, std::span<double> values_out,
                                 double* xi_out, EnvelopeWorkspace& ws);

} // namespace ncvar
