#pragma once

#include <vector>

namespace ncvar {

/// Sampled confidence-level axis: node 0 at level 0, then a geometric ladder
/// y_min, theta*y_min, ... ending exactly at y_max. The top extends past 1
/// when decision-dependent budgets can push updated levels above 1.
class ConfidenceGrid {
public:
    /// n >= 3 nodes total, 0 < y_min < y_max; theta = (y_max/y_min)^(1/(n-2)).
    /// Throws std::domain_error on invalid bounds.
    static ConfidenceGrid make(int n, double y_min, double y_max);

    const std::vector<double>& nodes() const { return nodes_; }
    int size() const { return int(nodes_.size()); }
    double node(int i) const { return nodes_[std::size_t(i)]; }
    double theta() const { return theta_; }
    double y_min() const { return nodes_[1]; }
    double y_max() const { return nodes_.back(); }

    /// Largest index i with node(i) <= y. Requires 0 <= y <= y_max.
    int lower_index(double y) const;

private:
    std::vector<double> nodes_;
    double theta_ = 0.0;
};

} // namespace ncvar
