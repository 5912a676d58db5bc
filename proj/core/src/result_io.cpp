#include "ncvar/result_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ncvar/common.hpp"

namespace ncvar {

namespace {

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw NumericError("cannot format a real number");
    return std::string(buf, ptr);
}

double parse_double(const std::string& token, const std::string& path) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw ParseError(path + ": bad number '" + token + "'");
    return v;
}

int parse_int(const std::string& token, const std::string& path) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw ParseError(path + ": bad integer '" + token + "'");
    return v;
}

} // namespace

void write_result_csv(const SolveResult& result, const Mdp& mdp, const ConfidenceGrid& grid,
                      const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << "state,row,col,y,value,action\n";
    const int n_nodes = grid.size();
    for (int x = 0; x < result.v.n_states(); ++x) {
        int row = -1, col = -1;
        if (mdp.grid() && x < mdp.grid()->rows * mdp.grid()->cols) {
            row = x / mdp.grid()->cols;
            col = x % mdp.grid()->cols;
        }
        for (int i = 0; i < n_nodes; ++i) {
            out << x << ',' << row << ',' << col << ',' << format_double(grid.node(i)) << ','
                << format_double(result.v.at(x, i)) << ',' << result.action_at(x, i) << '\n';
        }
    }
}

LoadedResult load_result_csv(const std::string& path, int n_states, const ConfidenceGrid& grid) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "state,row,col,y,value,action")
        throw ParseError(path + ": missing result header");

    LoadedResult loaded;
    loaded.v = ValueFunction(n_states, grid.size());
    loaded.greedy_action.assign(std::size_t(n_states) * std::size_t(grid.size()), 0);

    std::size_t count = 0;
    const std::size_t expected = std::size_t(n_states) * std::size_t(grid.size());
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string token;
        std::vector<std::string> cols;
        while (std::getline(fields, token, ',')) cols.push_back(token);
        if (cols.size() != 6) throw ParseError(path + ": expected 6 columns");
        if (count >= expected) throw ParseError(path + ": more rows than grid points");
        const int x = int(count) / grid.size();
        const int i = int(count) % grid.size();
        if (parse_int(cols[0], path) != x) throw ParseError(path + ": rows out of order");
        const double y = parse_double(cols[3], path);
        if (y != grid.node(i)) throw ParseError(path + ": level column does not match the grid");
        loaded.v.at(x, i) = parse_double(cols[4], path);
        loaded.greedy_action[count] = parse_int(cols[5], path);
        ++count;
    }
    if (count != expected) throw ParseError(path + ": fewer rows than grid points");
    return loaded;
}

void write_solve_summary(const SolveResult& result, const std::string& config_echo_json,
                         double wall_seconds, const std::string& path) {
    nlohmann::ordered_json j;
    j["iterations"] = result.iterations;
    j["final_residual"] = result.final_residual;
    j["converged"] = result.converged;
    j["max_concavity_gap"] = result.max_concavity_gap;
    try {
        j["config"] = nlohmann::ordered_json::parse(config_echo_json);
    } catch (const nlohmann::json::parse_error&) {
        j["config"] = config_echo_json;
    }
    j["wall_time_seconds"] = wall_seconds;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

void write_rollout_report(const RolloutReport& report, const std::string& path) {
    nlohmann::ordered_json j;
    j["kernel"] = report.kernel_descriptor;
    j["n_episodes"] = report.n_episodes;
    j["horizon"] = report.horizon;
    j["alpha"] = report.alpha;
    j["empirical_mean"] = report.empirical_mean;
    j["empirical_cvar"] = report.empirical_cvar;
    j["cost_samples"] = report.cost_samples;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    out << j.dump() << '\n';
}

void write_cost_samples(const RolloutReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path + " for writing");
    for (double c : report.cost_samples) out << format_double(c) << '\n';
}

} // namespace ncvar
