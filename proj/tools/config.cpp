#include "config.hpp"

#include <fstream>

#include "ncvar/common.hpp"
#include "ncvar/mdp_io.hpp"

namespace ncvar::cli {

using json = nlohmann::ordered_json;

AmbiguitySpec AmbiguityConfig::resolve(const Mdp& mdp,
                                       std::optional<std::uint64_t> seed_override) const {
    switch (kind) {
    case AmbiguityKind::none: return AmbiguitySpec::none();
    case AmbiguityKind::rn_fixed: return AmbiguitySpec::rn(K);
    case AmbiguityKind::kl_fixed: return AmbiguitySpec::kl(kappa);
    case AmbiguityKind::rn_decision_dependent:
        return make_uniform_budget(mdp, k_min, k_max, seed_override.value_or(seed));
    }
    return AmbiguitySpec::none();
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }

    ExperimentConfig cfg;
    cfg.echo = j;
    try {
        if (j.contains("grid")) {
            const GridSpecFile file = grid_spec_from_json_text(j["grid"].dump());
            cfg.grid = file.spec;
            cfg.grid_seed = file.seed;
        }
        if (j.contains("mdp_file")) cfg.mdp_file = j["mdp_file"].get<std::string>();
        if (j.contains("ambiguity")) {
            const json& a = j["ambiguity"];
            cfg.ambiguity.kind = ambiguity_kind_from_string(a.value("kind", "none"));
            if (a.contains("K")) cfg.ambiguity.K = a["K"].get<double>();
            if (a.contains("kappa")) cfg.ambiguity.kappa = a["kappa"].get<double>();
            if (a.contains("k_min")) cfg.ambiguity.k_min = a["k_min"].get<double>();
            if (a.contains("k_max")) cfg.ambiguity.k_max = a["k_max"].get<double>();
            if (a.contains("seed")) cfg.ambiguity.seed = a["seed"].get<std::uint64_t>();
        }
        if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
        if (j.contains("ygrid")) {
            cfg.ygrid_n = j["ygrid"].value("n", cfg.ygrid_n);
            cfg.ygrid_y_min = j["ygrid"].value("y_min", cfg.ygrid_y_min);
        }
        if (j.contains("solver")) {
            cfg.solver_epsilon = j["solver"].value("epsilon", cfg.solver_epsilon);
            cfg.solver_max_sweeps = j["solver"].value("max_sweeps", cfg.solver_max_sweeps);
        }
        if (j.contains("rollout")) {
            const json& r = j["rollout"];
            cfg.rollout_episodes = r.value("episodes", cfg.rollout_episodes);
            cfg.rollout_horizon = r.value("horizon", cfg.rollout_horizon);
            cfg.rollout_seed = r.value("seed", cfg.rollout_seed);
            cfg.sampled_kernels = r.value("sampled_kernels", cfg.sampled_kernels);
            cfg.write_samples = r.value("write_samples", cfg.write_samples);
        }
        if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }

    if (!(cfg.alpha > 0.0) || cfg.alpha > 1.0)
        throw ValidationError("alpha must lie in (0, 1]");
    return cfg;
}

Mdp resolve_mdp(const ExperimentConfig& config, std::optional<std::uint64_t> seed_override) {
    if (config.mdp_file) return load_mdp(*config.mdp_file);
    std::optional<std::uint64_t> seed = seed_override ? seed_override : config.grid_seed;
    if (config.grid.obstacle_count && !seed)
        throw ValidationError("a seed is required when obstacles are given as a count");
    return build_gridworld(config.grid, seed.value_or(0));
}

} // namespace ncvar::cli
