#include "ncvar/gridworld.hpp"

#include <algorithm>
#include <set>

#include "ncvar/common.hpp"
#include "ncvar/rng.hpp"

namespace ncvar {

const char* grid_action_name(int a) {
    switch (a) {
    case east: return "east";
    case south: return "south";
    case west: return "west";
    case north: return "north";
    }
    return "?";
}

namespace {

constexpr int kRowDelta[kGridActions] = {0, 1, 0, -1};
constexpr int kColDelta[kGridActions] = {1, 0, -1, 0};

bool inside(const GridSpec& spec, Cell c) {
    return c.row >= 0 && c.row < spec.rows && c.col >= 0 && c.col < spec.cols;
}

std::vector<Cell> resolve_obstacles(const GridSpec& spec, std::uint64_t seed) {
    if (!spec.obstacle_count) {
        std::set<std::pair<int, int>> unique;
        std::vector<Cell> cells;
        for (Cell c : spec.obstacles) {
            if (!inside(spec, c)) throw ValidationError("obstacle outside the grid");
            if (c == spec.goal) throw ValidationError("goal cell cannot be an obstacle");
            if (unique.insert({c.row, c.col}).second) cells.push_back(c);
        }
        return cells;
    }

    const int count = *spec.obstacle_count;
    if (count < 0) throw ValidationError("obstacle count must be non-negative");
    std::vector<Cell> free_cells;
    for (int r = 0; r < spec.rows; ++r)
        for (int c = 0; c < spec.cols; ++c) {
            Cell cell{r, c};
            if (cell == spec.start || cell == spec.goal) continue;
            free_cells.push_back(cell);
        }
    if (count > int(free_cells.size()))
        throw ValidationError("obstacle count exceeds the number of free cells");

    // partial Fisher-Yates: the first `count` entries are a uniform sample
    // without replacement
    Rng rng(seed);
    for (int i = 0; i < count; ++i) {
        const auto j = std::size_t(i) + rng.next_below(free_cells.size() - std::size_t(i));
        std::swap(free_cells[std::size_t(i)], free_cells[j]);
    }
    free_cells.resize(std::size_t(count));
    return free_cells;
}

} // namespace

Mdp build_gridworld(const GridSpec& spec, std::uint64_t seed) {
    if (spec.rows < 1 || spec.cols < 1) throw ValidationError("grid must have positive size");
    if (!inside(spec, spec.start) || !inside(spec, spec.goal))
        throw ValidationError("start and goal must lie inside the grid");
    if (spec.start == spec.goal) throw ValidationError("start and goal must differ");
    if (!(spec.intended_prob > 0.0) || spec.intended_prob > 1.0)
        throw ValidationError("intended move probability must lie in (0, 1]");
    if (!(spec.gamma >= 0.0) || spec.gamma >= 1.0)
        throw ValidationError("discount factor must lie in [0, 1)");

    const std::vector<Cell> obstacles = resolve_obstacles(spec, seed);

    GridMeta meta;
    meta.rows = spec.rows;
    meta.cols = spec.cols;
    meta.start = spec.start;
    meta.goal = spec.goal;
    meta.obstacles = obstacles;
    meta.move_cost = spec.move_cost;
    meta.collision_cost = spec.collision_cost;
    meta.intended_prob = spec.intended_prob;

    std::vector<char> is_obstacle(std::size_t(spec.rows * spec.cols), 0);
    for (Cell c : obstacles) is_obstacle[std::size_t(meta.cell_state(c.row, c.col))] = 1;

    const int n_cells = spec.rows * spec.cols;
    const int terminal = n_cells;
    Mdp mdp(n_cells + 1, spec.gamma, meta.cell_state(spec.start.row, spec.start.col));

    const double stray = (1.0 - spec.intended_prob) / 3.0;
    for (int r = 0; r < spec.rows; ++r) {
        for (int c = 0; c < spec.cols; ++c) {
            const int x = meta.cell_state(r, c);
            const bool at_goal = Cell{r, c} == spec.goal;
            for (int a = 0; a < kGridActions; ++a) {
                ActionModel model;
                if (at_goal) {
                    model.cost = 0.0;
                    model.next.push_back({terminal, 1.0});
                } else {
                    model.cost = is_obstacle[std::size_t(x)] ? spec.collision_cost : spec.move_cost;
                    // accumulate over the four move directions; off-grid
                    // moves collapse onto the current cell
                    double probs_by_state[5] = {0, 0, 0, 0, 0}; // e, s, w, n, self
                    int targets[5] = {0, 0, 0, 0, x};
                    for (int dir = 0; dir < kGridActions; ++dir) {
                        const Cell dest{r + kRowDelta[dir], c + kColDelta[dir]};
                        const double p = dir == a ? spec.intended_prob : stray;
                        if (inside(spec, dest)) {
                            targets[dir] = meta.cell_state(dest.row, dest.col);
                            probs_by_state[dir] = p;
                        } else {
                            targets[dir] = x;
                            probs_by_state[4] += p;
                        }
                    }
                    for (int k = 0; k < 5; ++k) {
                        if (probs_by_state[k] <= 0.0) continue;
                        bool merged = false;
                        for (Transition& t : model.next)
                            if (t.state == targets[k]) {
                                t.prob += probs_by_state[k];
                                merged = true;
                                break;
                            }
                        if (!merged) model.next.push_back({targets[k], probs_by_state[k]});
                    }
                }
                mdp.add_action(x, std::move(model));
            }
        }
    }
    for (int a = 0; a < kGridActions; ++a) {
        ActionModel absorb;
        absorb.cost = 0.0;
        absorb.next.push_back({terminal, 1.0});
        mdp.add_action(terminal, std::move(absorb));
    }
    mdp.set_grid(std::move(meta));
    return mdp;
}

} // namespace ncvar
