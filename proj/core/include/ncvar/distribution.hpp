#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ncvar {

/// Probability mass below this threshold is treated as zero when forming
/// density ratios, so degenerate atoms cannot blow up dual variables.
inline constexpr double kProbFloor = 1e-15;

/// Tolerance on the total probability mass of a distribution.
inline constexpr double kMassTol = 1e-12;

/// A finite real-valued random variable: outcome/probability pairs in the
/// order they were given. Outcomes are not deduplicated or sorted on
/// construction, so several variables can share one sample space.
class DiscreteDistribution {
public:
    /// Throws ValidationError unless both lists have equal length >= 1,
    /// every probability is >= 0 and the total mass is 1 within 1e-12.
    DiscreteDistribution(std::vector<double> outcomes, std::vector<double> probs);

    /// Equal-weight distribution of a sample set; duplicate values merged.
    /// Outcomes come out sorted ascending. Throws ValidationError when empty.
    static DiscreteDistribution empirical(std::span<const double> samples);

    const std::vector<double>& outcomes() const { return outcomes_; }
    const std::vector<double>& probs() const { return probs_; }
    std::size_t size() const { return outcomes_.size(); }

    double mean() const;
    double min_outcome() const;
    double max_outcome() const;

private:
    std::vector<double> outcomes_;
    std::vector<double> probs_;
};

} // namespace ncvar
