#include "ncvar/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ncvar/common.hpp"

namespace ncvar {

double curve_value(const PiecewiseLinearCurve& curve, double u) {
    const auto& k = curve.knots;
    const auto& g = curve.values;
    if (k.size() < 2) throw ValidationError("curve needs at least two knots");
    if (u <= k.front()) return g.front();
    if (u >= k.back()) return g.back();
    const auto it = std::upper_bound(k.begin(), k.end(), u);
    const std::size_t s = std::size_t(it - k.begin()) - 1;
    const double slope = (g[s + 1] - g[s]) / (k[s + 1] - k[s]);
    return g[s] + slope * (u - k[s]);
}

void EnvelopeWorkspace::reserve(std::size_t n) {
    segment.assign(n, 0);
    allocation.assign(n, 0.0);
    slope.assign(n, 0.0);
}

namespace {

constexpr double kConcavitySlack = 1e-9;

double segment_slope(const PiecewiseLinearCurve& c, std::size_t s) {
    return (c.values[s + 1] - c.values[s]) / (c.knots[s + 1] - c.knots[s]);
}

} // namespace

void maximize_envelope_at_levels(std::span<const double> probs,
                                 std::span<const PiecewiseLinearCurve> curves, double cap,
                                 std::span<const double> levels, std::span<double> values_out,
                                 double* xi_out, EnvelopeWorkspace& ws) {
    const std::size_t n = probs.size();
    if (curves.size() != n || n == 0)
        throw ValidationError("envelope needs one curve per successor");
    if (values_out.size() != levels.size())
        throw ValidationError("envelope output size mismatch");
    if (!(cap > 0.0)) throw ValidationError("envelope cap must be positive");

    ws.reserve(n);
    double mass = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (curves[j].knots.size() < 2 || curves[j].knots.size() != curves[j].values.size())
            throw ValidationError("malformed successor curve");
        if (curves[j].knots.back() < cap)
            throw ValidationError("successor curve does not cover the allocation cap");
        ws.slope[j] = segment_slope(curves[j], 0);
    }

    for (std::size_t k = 0; k < levels.size(); ++k) {
        const double level = levels[k];
        double need = level - mass;
        while (need > 0.0) {
            // next unit of mass goes to the steepest unexhausted curve
            std::size_t best = n;
            double best_slope = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j) {
                if (ws.allocation[j] >= cap || probs[j] <= 0.0) continue;
                if (ws.slope[j] > best_slope) {
                    best_slope = ws.slope[j];
                    best = j;
                }
            }
            if (best == n) break; // everything capped; only rounding mass is left
            const auto& curve = curves[best];
            std::size_t s = std::size_t(ws.segment[best]);
            const double seg_end = std::min(curve.knots[s + 1], cap);
            const double room = (seg_end - ws.allocation[best]) * probs[best];
            const double take = std::min(room, need);
            ws.allocation[best] += take / probs[best];
            mass += take;
            need -= take;
            if (take >= room) {
                // segment (or cap) exhausted: snap and advance
                ws.allocation[best] = seg_end;
                if (seg_end < cap && s + 2 < curve.knots.size()) {
                    ws.segment[best] = int(s + 1);
                    const double next_slope = segment_slope(curve, s + 1);
                    if (next_slope > ws.slope[best] + kConcavitySlack)
                        throw NumericError("non-concave value curve at successor " +
                                           std::to_string(best));
                    ws.slope[best] = next_slope;
                } else if (seg_end >= cap) {
                    ws.slope[best] = -std::numeric_limits<double>::infinity();
                }
            }
        }
        // evaluate the objective directly from the allocations
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const auto& curve = curves[j];
            const std::size_t s = std::size_t(ws.segment[j]);
            const double g = curve.values[s] + segment_slope(curve, s) * (ws.allocation[j] - curve.knots[s]);
            total += probs[j] * g;
        }
        values_out[k] = total / level;
        if (xi_out != nullptr) {
            double* row = xi_out + k * n;
            for (std::size_t j = 0; j < n; ++j)
                row[j] = probs[j] <= 0.0 ? 1.0 : ws.allocation[j] / level;
        }
    }
}

EnvelopeSolution maximize_envelope(const EnvelopeProblem& problem) {
    const std::size_t n = problem.probs.size();
    if (problem.curves.size() != n || n == 0)
        throw ValidationError("envelope needs one curve per successor");
    if (!(problem.level > 0.0))
        throw ValidationError("envelope level must be positive");

    EnvelopeSolution solution;
    solution.xi.assign(n, 1.0);

    if (problem.budget < problem.level) {
        // empty constraint set: extend by the plain expectation
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            total += problem.probs[j] * curve_value(problem.curves[j], problem.level);
        solution.value = total / problem.level;
        solution.expectation_fallback = true;
        return solution;
    }

    double domain = std::numeric_limits<double>::infinity();
    for (const auto& c : problem.curves) domain = std::min(domain, c.knots.back());
    const double cap = std::min(problem.budget, domain);
    if (cap < problem.level)
        throw ValidationError("successor curves do not cover the requested level");

    EnvelopeWorkspace ws;
    const double levels[1] = {problem.level};
    double value = 0.0;
    maximize_envelope_at_levels(problem.probs, problem.curves, cap, levels, {&value, 1},
                                solution.xi.data(), ws);
    solution.value = value;
    return solution;
}

} // namespace ncvar
