#include "ncvar/value_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ncvar {

double interpolate(const ValueFunction& v, const ConfidenceGrid& grid, int x, double y) {
    if (x < 0 || x >= v.n_states()) throw std::domain_error("state index out of range");
    if (y == 0.0) return 0.0;
    const int i = grid.lower_index(y); // throws when y is outside [0, y_max]
    const double y_i = grid.node(i);
    if (y == y_i || i + 1 >= grid.size()) return y_i * v.at(x, i);
    const double y_j = grid.node(i + 1);
    const double g_i = y_i * v.at(x, i);
    const double g_j = y_j * v.at(x, i + 1);
    return g_i + (g_j - g_i) * (y - y_i) / (y_j - y_i);
}

ConcavityReport check_concavity(const ValueFunction& v, const ConfidenceGrid& grid, double tol) {
    ConcavityReport report;
    const int n = grid.size();
    for (int x = 0; x < v.n_states(); ++x) {
        double prev_slope = 0.0;
        for (int i = 0; i + 1 < n; ++i) {
            const double g_i = grid.node(i) * v.at(x, i);
            const double g_j = grid.node(i + 1) * v.at(x, i + 1);
            const double slope = (g_j - g_i) / (grid.node(i + 1) - grid.node(i));
            if (i > 0) {
                const double gap = slope - prev_slope;
                if (gap > tol) {
                    report.violations.push_back({x, i, gap});
                    report.worst_gap = std::max(report.worst_gap, gap);
                }
            }
            prev_slope = slope;
        }
    }
    return report;
}

double enforce_concavity(ValueFunction& v, const ConfidenceGrid& grid) {
    const int n = grid.size();
    double worst_fix = 0.0;
    std::vector<double> g(std::size_t(n), 0.0);
    std::vector<int> hull;
    hull.reserve(std::size_t(n));
    for (int x = 0; x < v.n_states(); ++x) {
        g[0] = 0.0; // level 0 contributes nothing to the profile
        for (int i = 1; i < n; ++i) g[std::size_t(i)] = grid.node(i) * v.at(x, i);

        // upper hull by monotone chain; collinear points stay as vertices so
        // concave profiles are never rewritten
        hull.clear();
        for (int i = 0; i < n; ++i) {
            while (hull.size() >= 2) {
                const int a = hull[hull.size() - 2];
                const int b = hull[hull.size() - 1];
                const double cross =
                    (grid.node(b) - grid.node(a)) * (g[std::size_t(i)] - g[std::size_t(a)]) -
                    (g[std::size_t(b)] - g[std::size_t(a)]) * (grid.node(i) - grid.node(a));
                if (cross > 0.0)
                    hull.pop_back();
                else
                    break;
            }
            hull.push_back(i);
        }
        if (int(hull.size()) == n) continue; // already concave

        std::size_t seg = 0;
        for (int i = 1; i < n; ++i) {
            while (hull[seg + 1] < i) ++seg;
            const int a = hull[seg];
            const int b = hull[seg + 1];
            if (b == i || a == i) continue; // hull vertex keeps its exact value
            const double t = (grid.node(i) - grid.node(a)) / (grid.node(b) - grid.node(a));
            const double lifted = g[std::size_t(a)] + t * (g[std::size_t(b)] - g[std::size_t(a)]);
            if (lifted > g[std::size_t(i)]) {
                worst_fix = std::max(worst_fix, lifted - g[std::size_t(i)]);
                v.at(x, i) = lifted / grid.node(i);
            }
        }
    }
    return worst_fix;
}

double sup_norm_diff(const ValueFunction& a, const ValueFunction& b) {
    double norm = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k)
        norm = std::max(norm, std::fabs(a.data()[k] - b.data()[k]));
    return norm;
}

} // namespace ncvar
