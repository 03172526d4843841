#include "wpc/run_config.hpp"

#include <unistd.h>

#include <fstream>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "wpc/wp_tensor.hpp"

namespace wpc {

namespace {

template <class T>
T read(const toml::node& node, const std::string& key) {
    if constexpr (std::is_same_v<T, bool>) {
        if (auto v = node.value_exact<bool>()) return *v;
        throw ConfigError(key, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
        if (auto v = node.value_exact<int64_t>()) return static_cast<T>(*v);
        throw ConfigError(key, "expected an integer");
    } else if constexpr (std::is_floating_point_v<T>) {
        if (auto v = node.value<double>()) return *v;
        throw ConfigError(key, "expected a number");
    } else {
        if (auto v = node.value_exact<std::string>()) return *v;
        throw ConfigError(key, "expected a string");
    }
}

RunConfig apply_table(const toml::table& table, RunConfig c) {
    for (const auto& [k, node] : table) {
        const std::string key(k.str());
        if (key == "n") c.n = read<int>(node, key);
        else if (key == "i_max") c.i_max = read<int>(node, key);
        else if (key == "trend_n") c.trend_n = read<int>(node, key);
        else if (key == "quadrature_order") c.quadrature_order = read<int>(node, key);
        else if (key == "tol_solver") c.tol_solver = read<double>(node, key);
        else if (key == "tol_eigen") c.tol_eigen = read<double>(node, key);
        else if (key == "tol_kernel") c.tol_kernel = read<double>(node, key);
        else if (key == "route") c.route = read<std::string>(node, key);
        else if (key == "tensor") c.tensor = read<std::string>(node, key);
        else if (key == "cache_dir") c.cache_dir = read<std::string>(node, key);
        else if (key == "report") c.report = read<std::string>(node, key);
        else if (key == "out_dir") c.out_dir = read<std::string>(node, key);
        else if (key == "jobs") c.jobs = read<int>(node, key);
        else if (key == "timings") c.timings = read<bool>(node, key);
        else throw ConfigError(key, "unknown configuration key");
    }
    return c;
}

bool writable_dir(const std::filesystem::path& dir) {
    const std::filesystem::path d = dir.empty() ? std::filesystem::path(".") : dir;
    std::error_code ec;
    if (!std::filesystem::exists(d, ec)) return writable_dir(std::filesystem::absolute(d).parent_path());
    return std::filesystem::is_directory(d, ec) && ::access(d.c_str(), W_OK) == 0;
}

void require_writable_file(const std::filesystem::path& p, const std::string& field) {
    if (p.empty()) return;
    std::error_code ec;
    if (std::filesystem::is_directory(p, ec)) throw ConfigError(field, "'" + p.string() + "' is a directory");
    if (!writable_dir(p.parent_path())) throw ConfigError(field, "'" + p.string() + "' is not writable");
}

}  // namespace

RunConfig parse_config(const std::string& toml_text, RunConfig base) {
    try {
        return apply_table(toml::parse(toml_text), std::move(base));
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << e.description() << " at line " << e.source().begin.line;
        throw ConfigError("config", msg.str());
    }
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), std::move(base));
}

void validate(const RunConfig& c) {
    if (c.n < 1) throw ConfigError("n", "truncation must be >= 1, got " + std::to_string(c.n));
    if (c.n > 8) throw ConfigError("n", "truncations above 8 are outside the supported range");
    if (c.i_max < 0 || c.i_max > 6) throw ConfigError("i_max", "must lie in [0, 6], got " + std::to_string(c.i_max));
    if (c.trend_n < 1 || c.trend_n > 64) throw ConfigError("trend_n", "must lie in [1, 64]");
    if (c.quadrature_order != 0 && (c.quadrature_order < 8 || c.quadrature_order > 512))
        throw ConfigError("quadrature_order", "must be 0 (automatic) or lie in [8, 512]");
    if (!(c.tol_solver > 0.0)) throw ConfigError("tol_solver", "tolerance must be positive");
    if (!(c.tol_eigen > 0.0)) throw ConfigError("tol_eigen", "tolerance must be positive");
    if (!(c.tol_kernel > 0.0)) throw ConfigError("tol_kernel", "tolerance must be positive");
    if (c.jobs < 1 || c.jobs > 256) throw ConfigError("jobs", "must lie in [1, 256]");
    try {
        route_from_string(c.route);
    } catch (const std::exception&) {
        throw ConfigError("route", "expected 'collocation' or 'kernel', got '" + c.route + "'");
    }
    if (!writable_dir(c.cache_dir)) throw ConfigError("cache_dir", "'" + c.cache_dir.string() + "' is not writable");
    if (!writable_dir(c.out_dir)) throw ConfigError("out_dir", "'" + c.out_dir.string() + "' is not writable");
    require_writable_file(c.tensor, "tensor");
    require_writable_file(c.report, "report");
}

SolverConfig solver_config(const RunConfig& c) {
    SolverConfig s;
    s.tolerance = c.tol_solver;
    s.route = route_from_string(c.route);
    s.quadrature_order = c.quadrature_order;
    return s;
}

std::filesystem::path tensor_path(const RunConfig& c) {
    return c.tensor.empty() ? cache_path(c.cache_dir, c.n) : c.tensor;
}

nlohmann::json to_json(const RunConfig& c) {
    return {{"n", c.n},
            {"i_max", c.i_max},
            {"trend_n", c.trend_n},
            {"quadrature_order", c.quadrature_order},
            {"tol_solver", c.tol_solver},
            {"tol_eigen", c.tol_eigen},
            {"tol_kernel", c.tol_kernel},
            {"route", c.route},
            {"tensor", tensor_path(c).string()},
            {"jobs", c.jobs}};
}

}  // namespace wpc
