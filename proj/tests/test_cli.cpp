#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "wpc/oracle_suites.hpp"
#include "wpc/report.hpp"

using namespace wpc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("wp-cli-test-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int wp(const std::string& args) {
    const std::string cmd = std::string(WP_BINARY) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

int count_lines(const fs::path& p) {
    std::ifstream in(p);
    int n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

}  // namespace

TEST_CASE("configuration parsing and validation") {
    RunConfig c = parse_config("n = 2\ni_max = 3\ntol_solver = 1e-8\nroute = \"kernel\"\n");
    CHECK(c.n == 2);
    CHECK(c.i_max == 3);
    CHECK(c.tol_solver == 1e-8);
    CHECK(solver_config(c).route == ResolventRoute::Kernel);

    try {
        parse_config("jobs = \"four\"\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "jobs");
    }
    CHECK_THROWS_AS(parse_config("colour = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("n = [\n"), ConfigError);

    const auto field_of = [](RunConfig bad) {
        try {
            validate(bad);
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string();
    };
    RunConfig bad;
    bad.n = 0;
    CHECK(field_of(bad) == "n");
    bad = {};
    bad.tol_eigen = 0.0;
    CHECK(field_of(bad) == "tol_eigen");
    bad = {};
    bad.tol_solver = -1.0;
    CHECK(field_of(bad) == "tol_solver");
    bad = {};
    bad.route = "shooting";
    CHECK(field_of(bad) == "route");
    bad = {};
    bad.report = "/proc/version/report.json";
    CHECK(field_of(bad) == "report");
}

TEST_CASE("pipeline report is deterministic and exports plot data") {
    const fs::path dir = scratch("pipeline");
    RunConfig c;
    c.n = 3;
    c.i_max = 2;
    c.trend_n = 6;
    c.cache_dir = dir / "cache";
    c.out_dir = dir;
    const PipelineResult first = run_pipeline("verify", c, {true, true, true});
    CHECK(first.pass);
    CHECK(first.report.at("verdicts").at("kernel_dim").at("value") == 6);
    CHECK(first.report.at("verdicts").at("nonpositive").at("pass") == true);
    CHECK(first.report.at("verdicts").at("bound").at("pass") == true);
    CHECK(first.report.at("verdicts").at("noncompactness").at("pass") == true);
    CHECK_FALSE(first.report.contains("timings"));
    const PipelineResult second = run_pipeline("verify", c, {true, true, true});
    CHECK(first.report.dump() == second.report.dump());
    CHECK(first.report.at("tensor_hash") == TensorCache::load(tensor_path(c)).content_hash());

    const auto files = export_plots(first.report, dir / "plots");
    CHECK(files.size() == 4);
    CHECK(count_lines(dir / "plots" / "eigenvalues.csv") == 16);
    CHECK(slurp(dir / "plots" / "dyadic.csv").find("reference") != std::string::npos);
    CHECK(slurp(dir / "plots" / "dyadic.csv").find("9.3132257461547852e-10") != std::string::npos);

    CHECK_THROWS_AS(export_plots(nlohmann::json::object(), dir), std::invalid_argument);
    CHECK_THROWS_AS(export_plots({{"schema", "wp-report"}, {"spectra", {{{"n", 1}}}}}, dir), std::invalid_argument);

    c.timings = true;
    CHECK(run_pipeline("verify", c, {true, false, false}).report.contains("timings"));
}

TEST_CASE("beta oracle suite") {
    const SuiteResult r = beta_suite_result();
    CHECK(r.pass);
    CHECK(r.detail.at("value_at_1") == "1/56");
    CHECK_THROWS_AS(run_suite("gamma"), std::invalid_argument);
}

TEST_CASE("command-line exit codes") {
    const fs::path dir = scratch("exit");
    const std::string cache = "--cache-dir " + (dir / "cache").string();
    CHECK(wp("tensor --n 0 " + cache) == 2);
    CHECK(wp("frobnicate") == 2);
    CHECK(wp("oracle --suite beta") == 0);
    CHECK(wp("oracle --suite gamma") == 2);
    CHECK(wp("tensor --n 2 " + cache) == 0);
    CHECK(fs::exists(dir / "cache" / "tensor-N2.jsonl"));
    CHECK(wp("operator --n 2 " + cache + " --out " + (dir / "q2.csv").string()) == 0);
    CHECK(count_lines(dir / "q2.csv") == 6);
    CHECK(fs::exists(dir / "q2.json"));
    CHECK(wp("operator --n 3 " + cache + " --tensor " + (dir / "missing.jsonl").string() + " --out " +
             (dir / "q3.csv").string()) == 2);
    const std::string report = (dir / "r.json").string();
    CHECK(wp("verify --n 2 --i-max 1 " + cache + " --report " + report) == 0);
    CHECK(wp("export-plots --report " + report + " --out " + (dir / "plots").string()) == 0);
    CHECK(count_lines(dir / "plots" / "eigenvalues.csv") == 7);
    std::ofstream(dir / "empty.json") << "{}";
    CHECK(wp("export-plots --report " + (dir / "empty.json").string()) == 2);
    std::ofstream(dir / "bad.toml") << "n = -1\n";
    CHECK(wp("--config " + (dir / "bad.toml").string() + " verify " + cache) == 2);
    std::ofstream(dir / "good.toml") << "n = 2\ni_max = 1\n";
    CHECK(wp("--config " + (dir / "good.toml").string() + " spectra " + cache + " --report " +
             (dir / "s.json").string()) == 0);
}
