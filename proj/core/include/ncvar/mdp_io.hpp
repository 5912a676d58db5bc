#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ncvar/gridworld.hpp"
#include "ncvar/mdp.hpp"

namespace ncvar {

/// JSON layout: n_states, gamma, start_state, cost[x][a], kernel[x][a] as
/// [[successor, prob], ...] rows, plus an optional grid block. Numbers are
/// written in shortest round-trip decimal form, so save -> load -> save is
/// byte-stable and probabilities survive exactly.
void save_mdp(const Mdp& mdp, const std::string& path);

/// Throws ParseError on malformed files (with byte position) and
/// ValidationError when the decoded model violates MDP invariants.
Mdp load_mdp(const std::string& path);

/// A grid recipe read from JSON. Keys: rows, cols, start [r,c], goal [r,c],
/// obstacles [[r,c],...] or obstacle_count plus seed, move_cost,
/// collision_cost, intended_prob, gamma.
struct GridSpecFile {
    GridSpec spec;
    std::optional<std::uint64_t> seed;
};

GridSpecFile load_grid_spec(const std::string& path);
GridSpecFile grid_spec_from_json_text(const std::string& text);

} // namespace ncvar
