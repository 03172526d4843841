#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "wpc/resolvent.hpp"

namespace wpc {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct RunConfig {
    int n = 3;
    int i_max = 4;
    int trend_n = 12;
    int quadrature_order = 0;  // 0 selects the order from the largest label
    double tol_solver = 1e-9;
    double tol_eigen = 1e-9;
    double tol_kernel = 1e-7;
    std::string route = "collocation";
    std::filesystem::path tensor;  // empty: <cache_dir>/tensor-N<n>.jsonl
    std::filesystem::path cache_dir = "wp-cache";
    std::filesystem::path report;  // empty: standard output
    std::filesystem::path out_dir = "plots";
    int jobs = 1;
    bool timings = false;
};

/// Reads a flat TOML table whose keys match the RunConfig fields. Unknown keys
/// and type mismatches raise ConfigError naming the key.
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});
RunConfig parse_config(const std::string& toml_text, RunConfig base = {});

/// Range checks and writability of the output locations.
void validate(const RunConfig& c);

SolverConfig solver_config(const RunConfig& c);
std::filesystem::path tensor_path(const RunConfig& c);

nlohmann::json to_json(const RunConfig& c);

}  // namespace wpc
