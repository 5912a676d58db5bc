#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace ncvar::cli {

struct GlobalOptions {
    std::optional<std::string> output_dir;
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

int cmd_build_env(const std::string& config_path, const GlobalOptions& opts);
int cmd_reduce(double alpha, double budget, const std::string& kind);
int cmd_solve(const std::string& config_path, const GlobalOptions& opts);
int cmd_render(const std::string& config_path, const GlobalOptions& opts);
int cmd_evaluate(const std::string& config_path, const GlobalOptions& opts);

} // namespace ncvar::cli
