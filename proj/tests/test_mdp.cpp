#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ncvar/common.hpp"
#include "ncvar/gridworld.hpp"
#include "ncvar/mdp.hpp"
#include "ncvar/image.hpp"
#include "ncvar/mdp_io.hpp"

using namespace ncvar;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

GridSpec small_spec() {
    GridSpec spec;
    spec.rows = 4;
    spec.cols = 5;
    spec.start = {3, 4};
    spec.goal = {0, 0};
    spec.obstacles = {{1, 1}, {2, 3}};
    spec.gamma = 0.9;
    return spec;
}

} // namespace

TEST_CASE("gridworld rows are stochastic and costs follow the cells") {
    const Mdp mdp = build_gridworld(small_spec());
    REQUIRE(mdp.n_states() == 4 * 5 + 1);
    for (int x = 0; x < mdp.n_states(); ++x) {
        REQUIRE(mdp.n_actions(x) == 4);
        for (int a = 0; a < 4; ++a) {
            double sum = 0.0;
            for (const Transition& t : mdp.transitions(x, a)) {
                CHECK(t.prob >= 0.0);
                CHECK(t.prob <= 1.0);
                sum += t.prob;
            }
            CHECK(std::fabs(sum - 1.0) <= 1e-12);
        }
    }
    const GridMeta& meta = *mdp.grid();
    // obstacle cells carry the collision cost, other cells the move cost
    CHECK(mdp.cost(meta.cell_state(1, 1), 0) == 40.0);
    CHECK(mdp.cost(meta.cell_state(3, 4), 2) == 1.0);
    CHECK(mdp.cost(meta.cell_state(0, 0), 0) == 0.0); // goal cell
    CHECK(mdp.cost(meta.terminal_state(), 0) == 0.0);
    // goal forwards to the absorbing state
    CHECK(mdp.transitions(meta.cell_state(0, 0), 2) ==
          std::vector<Transition>{{meta.terminal_state(), 1.0}});
}

TEST_CASE("default grid spec matches the experiment layout") {
    GridSpec spec; // defaults
    spec.obstacle_count = 80;
    spec.obstacles.clear();
    const Mdp mdp = build_gridworld(spec, 2024);
    CHECK(mdp.n_states() == 64 * 53 + 1);
    CHECK(mdp.grid()->obstacles.size() == 80);
    CHECK(mdp.grid()->start == Cell{60, 50});
    CHECK(mdp.grid()->goal == Cell{60, 2});
    CHECK(mdp.grid()->collision_cost == 40.0);
    CHECK(mdp.grid()->move_cost == 1.0);
    CHECK(mdp.grid()->intended_prob == 0.95);

    // sampled placement avoids start and goal and never repeats
    std::set<std::pair<int, int>> seen;
    for (const Cell& c : mdp.grid()->obstacles) {
        CHECK(c != spec.start);
        CHECK(c != spec.goal);
        CHECK(seen.insert({c.row, c.col}).second);
    }

    // deterministic per seed, different across seeds
    const Mdp again = build_gridworld(spec, 2024);
    CHECK(again == mdp);
    const Mdp other = build_gridworld(spec, 2025);
    CHECK(!(other == mdp));
}

TEST_CASE("tiny deterministic grid moves as expected") {
    GridSpec spec;
    spec.rows = 1;
    spec.cols = 2;
    spec.start = {0, 0};
    spec.goal = {0, 1};
    spec.obstacles.clear();
    spec.intended_prob = 1.0;
    const Mdp mdp = build_gridworld(spec);
    // action east from the start lands on the goal cell deterministically
    CHECK(mdp.transitions(0, east) == std::vector<Transition>{{1, 1.0}});
    CHECK(mdp.cost(0, east) == 1.0);
    // off-grid moves stay in place
    CHECK(mdp.transitions(0, west) == std::vector<Transition>{{0, 1.0}});
}

TEST_CASE("gridworld rejects invalid specs") {
    GridSpec spec = small_spec();
    spec.goal = spec.start;
    CHECK_THROWS_AS(build_gridworld(spec), ValidationError);

    spec = small_spec();
    spec.obstacles = {{9, 9}};
    CHECK_THROWS_AS(build_gridworld(spec), ValidationError);

    spec = small_spec();
    spec.obstacles = {spec.goal};
    CHECK_THROWS_AS(build_gridworld(spec), ValidationError);

    spec = small_spec();
    spec.obstacles.clear();
    spec.obstacle_count = 4 * 5; // only 18 free cells
    CHECK_THROWS_AS(build_gridworld(spec, 1), ValidationError);

    spec = small_spec();
    spec.intended_prob = 0.0;
    CHECK_THROWS_AS(build_gridworld(spec), ValidationError);
}

TEST_CASE("validate flags broken kernels and unreachable goals") {
    const Mdp good = build_gridworld(small_spec());
    CHECK(validate(good).ok());

    // scale one row: row-sum violation
    Mdp scaled = good;
    {
        Mdp rebuilt(good.n_states(), good.gamma(), good.start_state());
        for (int x = 0; x < good.n_states(); ++x)
            for (int a = 0; a < good.n_actions(x); ++a) {
                ActionModel m;
                m.cost = good.cost(x, a);
                m.next = good.transitions(x, a);
                if (x == 7 && a == 1)
                    for (Transition& t : m.next) t.prob *= 0.9;
                rebuilt.add_action(x, m);
            }
        rebuilt.set_grid(*good.grid());
        scaled = rebuilt;
    }
    const auto diag = validate(scaled);
    CHECK(!diag.ok());
    REQUIRE(diag.bad_row_sums.size() == 1);
    CHECK(diag.bad_row_sums[0] == std::pair<int, int>{7, 1});

    // goal enclosed by zero-probability transitions: BFS cannot reach it
    Mdp walled(4, 0.9, 0);
    for (int x = 0; x < 4; ++x) {
        ActionModel m;
        m.cost = 1.0;
        m.next = {{x == 3 ? 3 : (x + 1) % 3, 1.0}}; // states 0-2 cycle, 3 self-loops
        walled.add_action(x, m);
    }
    GridMeta meta;
    meta.rows = 1;
    meta.cols = 3; // terminal_state() == 3
    meta.start = {0, 0};
    meta.goal = {0, 2};
    walled.set_grid(meta);
    CHECK(validate(walled).goal_unreachable);
}

TEST_CASE("mdp json round-trip is exact and byte-stable") {
    const Mdp mdp = build_gridworld(small_spec(), 7);
    const auto path = temp_file("ncvar_test_mdp.json");
    save_mdp(mdp, path.string());
    const Mdp loaded = load_mdp(path.string());
    CHECK(loaded == mdp);

    const auto path2 = temp_file("ncvar_test_mdp2.json");
    save_mdp(loaded, path2.string());
    CHECK(read_file(path) == read_file(path2));
    std::filesystem::remove(path);
    std::filesystem::remove(path2);
}

TEST_CASE("truncated and malformed files raise parse errors") {
    const Mdp mdp = build_gridworld(small_spec());
    const auto path = temp_file("ncvar_trunc.json");
    save_mdp(mdp, path.string());
    std::string text = read_file(path);
    {
        std::ofstream out(path, std::ios::binary);
        out << text.substr(0, text.size() / 2);
    }
    CHECK_THROWS_AS(load_mdp(path.string()), ParseError);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_mdp("/nonexistent/nowhere.json"), ParseError);
}

TEST_CASE("hand-written two-state file loads to the expected tables") {
    const auto path = temp_file("ncvar_two_state.json");
    {
        std::ofstream out(path);
        out << R"({
            "n_states": 2,
            "gamma": 0.5,
            "start_state": 0,
            "cost": [[1.0, 2.0], [0.0]],
            "kernel": [
                [[[0, 0.25], [1, 0.75]], [[1, 1.0]]],
                [[[1, 1.0]]]
            ]
        })";
    }
    const Mdp mdp = load_mdp(path.string());
    CHECK(mdp.n_states() == 2);
    CHECK(mdp.gamma() == 0.5);
    CHECK(mdp.n_actions(0) == 2);
    CHECK(mdp.n_actions(1) == 1);
    CHECK(mdp.cost(0, 1) == 2.0);
    CHECK(mdp.transitions(0, 0) == std::vector<Transition>{{0, 0.25}, {1, 0.75}});
    std::filesystem::remove(path);
}

TEST_CASE("loading rejects invariant violations") {
    const auto path = temp_file("ncvar_bad_mdp.json");
    {
        std::ofstream out(path);
        out << R"({"n_states": 1, "gamma": 0.9, "start_state": 0,
                   "cost": [[1.0]], "kernel": [[[[0, 0.7]]]]})";
    }
    CHECK_THROWS_AS(load_mdp(path.string()), ValidationError);
    std::filesystem::remove(path);
}

TEST_CASE("grid spec json parsing") {
    const auto file = grid_spec_from_json_text(R"({
        "rows": 8, "cols": 9, "start": [7, 8], "goal": [0, 0],
        "obstacle_count": 5, "seed": 11,
        "move_cost": 1.0, "collision_cost": 40.0,
        "intended_prob": 0.95, "gamma": 0.95
    })");
    CHECK(file.spec.rows == 8);
    CHECK(file.spec.obstacle_count == 5);
    REQUIRE(file.seed.has_value());
    CHECK(*file.seed == 11);
    const Mdp mdp = build_gridworld(file.spec, *file.seed);
    CHECK(mdp.n_states() == 8 * 9 + 1);

    CHECK_THROWS_AS(grid_spec_from_json_text("{"), ParseError);
    CHECK_THROWS_AS(grid_spec_from_json_text(
                        R"({"obstacles": [[1, 1]], "obstacle_count": 2})"),
                    ValidationError);
}

TEST_CASE("image writers and gray normalization") {
    // a flat value range maps to an all-zero image
    CHECK(normalize_to_gray({3.0, 3.0, 3.0}) == std::vector<std::uint8_t>{0, 0, 0});
    CHECK(normalize_to_gray({0.0, 5.0, 10.0}) == std::vector<std::uint8_t>{0, 128, 255});

    const auto pgm_path = temp_file("ncvar_img.pgm");
    write_pgm(pgm_path.string(), 3, 2, {0, 10, 20, 30, 40, 255});
    const std::string pgm = read_file(pgm_path);
    CHECK(pgm == "P2\n3 2\n255\n0 10 20\n30 40 255\n");

    const auto ppm_path = temp_file("ncvar_img.ppm");
    write_ppm(ppm_path.string(), 2, 1, {{{255, 0, 0}}, {{0, 0, 0}}});
    CHECK(read_file(ppm_path) == "P3\n2 1\n255\n255 0 0 0 0 0\n");

    CHECK_THROWS_AS(write_pgm(pgm_path.string(), 2, 2, {1, 2}), ValidationError);
    std::filesystem::remove(pgm_path);
    std::filesystem::remove(ppm_path);
}

TEST_CASE("ambiguity specs validate budgets") {
    const Mdp mdp = build_gridworld(small_spec());
    CHECK_NOTHROW(AmbiguitySpec::rn(2.0).check(mdp));
    CHECK_THROWS_AS(AmbiguitySpec::rn(0.5).check(mdp), ValidationError);

    const AmbiguitySpec dd = make_uniform_budget(mdp, 1.0, 2.0, 99);
    CHECK_NOTHROW(dd.check(mdp));
    CHECK(dd.max_budget() == 2.0);
    for (int x = 0; x < mdp.n_states(); ++x)
        for (int a = 0; a < mdp.n_actions(x); ++a) {
            CHECK(dd.budget(x, a) >= 1.0);
            CHECK(dd.budget(x, a) <= 2.0);
        }
    // deterministic in the seed
    const AmbiguitySpec dd2 = make_uniform_budget(mdp, 1.0, 2.0, 99);
    CHECK(dd.budget_field == dd2.budget_field);

    AmbiguitySpec broken = dd;
    broken.budget_field[3][2] = 0.5;
    CHECK_THROWS_AS(broken.check(mdp), ValidationError);
}
