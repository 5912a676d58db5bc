#include "ncvar/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ncvar/common.hpp"

namespace ncvar {

DiscreteDistribution::DiscreteDistribution(std::vector<double> outcomes,
                                           std::vector<double> probs)
    : outcomes_(std::move(outcomes)), probs_(std::move(probs)) {
    if (outcomes_.empty() || outcomes_.size() != probs_.size())
        throw ValidationError("distribution needs equally sized, non-empty outcome/prob lists");
    double total = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        if (!std::isfinite(outcomes_[i]))
            throw ValidationError("distribution outcome is not finite");
        if (!(probs_[i] >= 0.0))
            throw ValidationError("distribution probability is negative");
        total += probs_[i];
    }
    if (std::fabs(total - 1.0) > kMassTol)
        throw ValidationError("distribution probabilities do not sum to 1");
}

DiscreteDistribution DiscreteDistribution::empirical(std::span<const double> samples) {
    if (samples.empty())
        throw ValidationError("empirical distribution needs at least one sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> outcomes;
    std::vector<double> probs;
    const double w = 1.0 / double(sorted.size());
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        outcomes.push_back(sorted[i]);
        probs.push_back(w * double(j - i));
        i = j;
    }
    // remove accumulated rounding in the last atom
    double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    probs.back() += 1.0 - total;
    return DiscreteDistribution(std::move(outcomes), std::move(probs));
}

double DiscreteDistribution::mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) m += probs_[i] * outcomes_[i];
    return m;
}

double DiscreteDistribution::min_outcome() const {
    return *std::min_element(outcomes_.begin(), outcomes_.end());
}

double DiscreteDistribution::max_outcome() const {
    return *std::max_element(outcomes_.begin(), outcomes_.end());
}

} // namespace ncvar
