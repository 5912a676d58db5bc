#include "ncvar/confidence_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ncvar {

ConfidenceGrid ConfidenceGrid::make(int n, double y_min, double y_max) {
    if (n < 3) throw std::domain_error("confidence grid needs at least 3 nodes");
    if (!(y_min > 0.0) || !(y_max > y_min))
        throw std::domain_error("confidence grid needs 0 < y_min < y_max");
    if (y_max < 1.0) throw std::domain_error("the confidence grid must reach level 1");

    ConfidenceGrid grid;
    grid.theta_ = std::pow(y_max / y_min, 1.0 / double(n - 2));
    grid.nodes_.resize(std::size_t(n));
    grid.nodes_[0] = 0.0;
    for (int i = 1; i < n; ++i)
        grid.nodes_[std::size_t(i)] = y_min * std::pow(grid.theta_, double(i - 1));
    grid.nodes_.back() = y_max; // pin the top node exactly
    return grid;
}

int ConfidenceGrid::lower_index(double y) const {
    if (!(y >= 0.0) || y > y_max())
        throw std::domain_error("confidence level outside the grid range");
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), y);
    return int(it - nodes_.begin()) - 1;
}

} // namespace ncvar
