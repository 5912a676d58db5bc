#include "ncvar/mdp_io.hpp"

#include <fstream>

#include <json.hpp>

#include "ncvar/common.hpp"

namespace ncvar {

using json = nlohmann::ordered_json;

namespace {

json cell_to_json(const Cell& c) { return json::array({c.row, c.col}); }

Cell cell_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw ParseError("expected a [row, col] pair");
    return Cell{j[0].get<int>(), j[1].get<int>()};
}

json parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_file(const std::string& path, const json& j, int indent = -1) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << j.dump(indent);
    out << '\n';
}

} // namespace

void save_mdp(const Mdp& mdp, const std::string& path) {
    json j;
    j["n_states"] = mdp.n_states();
    j["gamma"] = mdp.gamma();
    j["start_state"] = mdp.start_state();
    json cost = json::array();
    json kernel = json::array();
    for (int x = 0; x < mdp.n_states(); ++x) {
        json cost_row = json::array();
        json kernel_row = json::array();
        for (int a = 0; a < mdp.n_actions(x); ++a) {
            cost_row.push_back(mdp.cost(x, a));
            json row = json::array();
            for (const Transition& t : mdp.transitions(x, a))
                row.push_back(json::array({t.state, t.prob}));
            kernel_row.push_back(std::move(row));
        }
        cost.push_back(std::move(cost_row));
        kernel.push_back(std::move(kernel_row));
    }
    j["cost"] = std::move(cost);
    j["kernel"] = std::move(kernel);
    if (mdp.grid()) {
        const GridMeta& g = *mdp.grid();
        json grid;
        grid["rows"] = g.rows;
        grid["cols"] = g.cols;
        grid["start"] = cell_to_json(g.start);
        grid["goal"] = cell_to_json(g.goal);
        json obstacles = json::array();
        for (const Cell& c : g.obstacles) obstacles.push_back(cell_to_json(c));
        grid["obstacles"] = std::move(obstacles);
        grid["move_cost"] = g.move_cost;
        grid["collision_cost"] = g.collision_cost;
        grid["intended_prob"] = g.intended_prob;
        j["grid"] = std::move(grid);
    }
    write_file(path, j);
}

Mdp load_mdp(const std::string& path) {
    const json j = parse_file(path);
    try {
        const int n_states = j.at("n_states").get<int>();
        const double gamma = j.at("gamma").get<double>();
        const int start = j.at("start_state").get<int>();
        Mdp mdp(n_states, gamma, start);

        const json& cost = j.at("cost");
        const json& kernel = j.at("kernel");
        if (int(cost.size()) != n_states || int(kernel.size()) != n_states)
            throw ValidationError("cost/kernel tables do not match n_states");
        for (int x = 0; x < n_states; ++x) {
            const json& cost_row = cost[std::size_t(x)];
            const json& kernel_row = kernel[std::size_t(x)];
            if (cost_row.size() != kernel_row.size())
                throw ValidationError("cost and kernel disagree on the action count");
            for (std::size_t a = 0; a < cost_row.size(); ++a) {
                ActionModel model;
                model.cost = cost_row[a].get<double>();
                for (const json& entry : kernel_row[a]) {
                    if (!entry.is_array() || entry.size() != 2)
                        throw ParseError(path + ": kernel entries must be [successor, prob]");
                    model.next.push_back({entry[0].get<int>(), entry[1].get<double>()});
                }
                mdp.add_action(x, std::move(model));
            }
        }
        if (j.contains("grid")) {
            const json& g = j.at("grid");
            GridMeta meta;
            meta.rows = g.at("rows").get<int>();
            meta.cols = g.at("cols").get<int>();
            meta.start = cell_from_json(g.at("start"));
            meta.goal = cell_from_json(g.at("goal"));
            for (const json& c : g.at("obstacles")) meta.obstacles.push_back(cell_from_json(c));
            meta.move_cost = g.at("move_cost").get<double>();
            meta.collision_cost = g.at("collision_cost").get<double>();
            meta.intended_prob = g.at("intended_prob").get<double>();
            mdp.set_grid(std::move(meta));
        }

        MdpDiagnostics diag = validate(mdp);
        if (!diag.bad_row_sums.empty() || !diag.negative_probs.empty() || !diag.cost_bounded)
            throw ValidationError(path + ": " + diag.to_string());
        return mdp;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

GridSpecFile grid_spec_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("grid spec: ") + e.what());
    }
    try {
        GridSpecFile file;
        GridSpec& spec = file.spec;
        if (j.contains("rows")) spec.rows = j["rows"].get<int>();
        if (j.contains("cols")) spec.cols = j["cols"].get<int>();
        if (j.contains("start")) spec.start = cell_from_json(j["start"]);
        if (j.contains("goal")) spec.goal = cell_from_json(j["goal"]);
        if (j.contains("obstacles")) {
            for (const json& c : j["obstacles"]) spec.obstacles.push_back(cell_from_json(c));
        }
        if (j.contains("obstacle_count")) spec.obstacle_count = j["obstacle_count"].get<int>();
        if (j.contains("seed")) file.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("move_cost")) spec.move_cost = j["move_cost"].get<double>();
        if (j.contains("collision_cost")) spec.collision_cost = j["collision_cost"].get<double>();
        if (j.contains("intended_prob")) spec.intended_prob = j["intended_prob"].get<double>();
        if (j.contains("gamma")) spec.gamma = j["gamma"].get<double>();
        if (spec.obstacle_count && !spec.obstacles.empty())
            throw ValidationError("give either explicit obstacles or an obstacle count, not both");
        return file;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("grid spec: ") + e.what());
    }
}

GridSpecFile load_grid_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return grid_spec_from_json_text(text);
}

} // namespace ncvar
