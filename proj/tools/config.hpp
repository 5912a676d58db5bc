#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "ncvar/gridworld.hpp"
#include "ncvar/mdp.hpp"

namespace ncvar::cli {

struct AmbiguityConfig {
    AmbiguityKind kind = AmbiguityKind::none;
    double K = 1.0;       // rn_fixed
    double kappa = 1.0;   // kl_fixed
    double k_min = 1.0;   // rn_decision_dependent
    double k_max = 1.0;
    std::uint64_t seed = 0;

    /// Resolves the budget field against a concrete MDP.
    AmbiguitySpec resolve(const Mdp& mdp, std::optional<std::uint64_t> seed_override) const;
};

struct ExperimentConfig {
    GridSpec grid;
    std::optional<std::uint64_t> grid_seed;
    std::optional<std::string> mdp_file;
    AmbiguityConfig ambiguity;
    double alpha = 0.48;
    int ygrid_n = 21;
    double ygrid_y_min = 1e-4;
    double solver_epsilon = 1e-6;
    int solver_max_sweeps = 2000;
    int rollout_episodes = 10000;
    int rollout_horizon = 400;
    std::uint64_t rollout_seed = 1;
    int sampled_kernels = 3;
    bool write_samples = false;
    std::string output_dir = "out";

    nlohmann::ordered_json echo; ///< the parsed document, for summaries
};

ExperimentConfig load_experiment_config(const std::string& path);

/// Builds or loads the MDP named by the config. `seed_override` replaces the
/// grid obstacle seed when present.
Mdp resolve_mdp(const ExperimentConfig& config, std::optional<std::uint64_t> seed_override);

} // namespace ncvar::cli
