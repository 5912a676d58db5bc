#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ncvar/mdp.hpp"

namespace ncvar {

/// Movement actions of the grid world, in index order.
enum GridAction : int { east = 0, south = 1, west = 2, north = 3 };
inline constexpr int kGridActions = 4;
const char* grid_action_name(int a);

/// Construction recipe for a grid-world MDP. Obstacles are either explicit
/// coordinates or a count drawn uniformly (without replacement) over free
/// cells from a seed.
struct GridSpec {
    int rows = 64;
    int cols = 53;
    Cell start{60, 50};
    Cell goal{60, 2};
    std::vector<Cell> obstacles;         // explicit coordinates, or:
    std::optional<int> obstacle_count;   // sampled with the builder seed
    double move_cost = 1.0;
    double collision_cost = 40.0;
    double intended_prob = 0.95;
    double gamma = 0.95;
};

/// Builds the grid MDP: one state per cell plus one absorbing terminal
/// state. Each move goes to the intended neighbor with probability
/// intended_prob and to each of the other three neighbors with equal shares
/// of the remainder; moves off the grid stay in place. Stepping out of an
/// obstacle cell costs collision_cost, out of any other cell move_cost, so a
/// collision adds exactly collision_cost to the path once the agent passes
/// through. The goal cell forwards to the terminal state at zero cost.
Mdp build_gridworld(const GridSpec& spec, std::uint64_t seed = 0);

} // namespace ncvar
