#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncvar/mdp.hpp"
#include "ncvar/policy.hpp"

namespace ncvar {

/// Transition kernel with the same sparsity pattern as the nominal one:
/// probs[x][a][j] replaces transitions(x, a)[j].prob.
struct SampledKernel {
    std::vector<std::vector<std::vector<double>>> probs;
};

/// Draws a kernel inside the density-ratio ambiguity set: every row
/// satisfies row[j] <= budget(x, a) * nominal[j] and sums to one. Random
/// ratios are repaired by cap-respecting water-filling, deterministic per
/// seed. Requires an rn_fixed or rn_decision_dependent ambiguity.
SampledKernel sample_kernel(const Mdp& mdp, const AmbiguitySpec& ambiguity, std::uint64_t seed);

enum class KernelKind { nominal, sampled, adversarial };

struct KernelSource {
    KernelKind kind = KernelKind::nominal;
    const SampledKernel* kernel = nullptr;
    std::string descriptor = "nominal";

    static KernelSource nominal() { return {}; }
    static KernelSource sampled(const SampledKernel& k, std::uint64_t seed);
    static KernelSource adversarial();
};

struct RolloutConfig {
    int episodes = 10000;
    int horizon = 400;
    std::uint64_t seed = 1;
};

struct RolloutReport {
    int n_episodes = 0;
    int horizon = 0;
    double alpha = 1.0;
    std::string kernel_descriptor;
    std::vector<double> cost_samples; ///< one discounted total per episode
    double empirical_mean = 0.0;
    double empirical_cvar = 0.0; ///< cvar of the samples at `alpha`
};

/// Rolls the policy out from `start` at initial confidence level
/// `alpha_start`. Episode e draws from Rng(seed).split(e), so serial and
/// parallel schedules agree. The confidence level always follows the
/// policy's own maximizer; only the sampling distribution of the next state
/// depends on the kernel source. Episodes stop early in zero-cost absorbing
/// states. Requires gamma^horizon * C_max / (1 - gamma) < 1e-6 so truncation
/// cannot move any sample visibly.
RolloutReport run_rollout(const Mdp& mdp, const Policy& policy, const KernelSource& source,
                          int start, double alpha_start, const RolloutConfig& config);

/// Standard error of the empirical cvar under resampling with replacement;
/// deterministic per seed.
double bootstrap_cvar_se(std::span<const double> samples, double alpha, int resamples,
                         std::uint64_t seed);

} // namespace ncvar
