#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "wpc/oracle_suites.hpp"
#include "wpc/report.hpp"

using namespace wpc;

namespace {

enum Exit { kOk = 0, kVerdictFailed = 1, kConfigError = 2, kRuntimeError = 3 };

struct Flags {
    std::string config;
    int n = 0, i_max = 0, jobs = 0, quadrature_order = 0, trend_n = 0;
    double tol_solver = 0, tol_eigen = 0, tol_kernel = 0;
    std::string tensor, report, route, cache_dir, out;
    bool timings = false;
};

// Options shared by the pipeline subcommands; values only override the
// configuration when given on the command line.
struct Bound {
    CLI::Option *n = nullptr, *i_max = nullptr, *jobs = nullptr, *order = nullptr, *trend = nullptr;
    CLI::Option *tol_solver = nullptr, *tol_eigen = nullptr, *tol_kernel = nullptr;
    CLI::Option *tensor = nullptr, *report = nullptr, *route = nullptr, *cache_dir = nullptr, *out = nullptr;
    CLI::Option* timings = nullptr;
};

Bound add_common(CLI::App* app, Flags& f) {
    Bound b;
    b.n = app->add_option("--n", f.n, "truncation rank");
    b.i_max = app->add_option("--i-max", f.i_max, "largest dyadic block index");
    b.tensor = app->add_option("--tensor", f.tensor, "tensor cache file (JSONL)");
    b.report = app->add_option("--report", f.report, "report path (default: stdout)");
    b.jobs = app->add_option("--jobs", f.jobs, "worker threads");
    b.tol_solver = app->add_option("--tol-solver", f.tol_solver, "resolvent residual tolerance");
    b.tol_eigen = app->add_option("--tol-eigen", f.tol_eigen, "eigenvalue sign tolerance");
    b.tol_kernel = app->add_option("--tol-kernel", f.tol_kernel, "kernel eigenvalue tolerance");
    b.route = app->add_option("--route", f.route, "resolvent route: collocation or kernel");
    b.order = app->add_option("--quadrature-order", f.quadrature_order, "radial rule order (0 = automatic)");
    b.trend = app->add_option("--trend-n", f.trend_n, "largest label for the sectional curvature trend");
    b.cache_dir = app->add_option("--cache-dir", f.cache_dir, "directory for default cache files");
    b.timings = app->add_flag("--timings", f.timings, "include wall-clock timings in the report");
    return b;
}

RunConfig resolve(const Flags& f, const Bound& b) {
    RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
    if (b.n && b.n->count()) c.n = f.n;
    if (b.i_max && b.i_max->count()) c.i_max = f.i_max;
    if (b.jobs && b.jobs->count()) c.jobs = f.jobs;
    if (b.order && b.order->count()) c.quadrature_order = f.quadrature_order;
    if (b.trend && b.trend->count()) c.trend_n = f.trend_n;
    if (b.tol_solver && b.tol_solver->count()) c.tol_solver = f.tol_solver;
    if (b.tol_eigen && b.tol_eigen->count()) c.tol_eigen = f.tol_eigen;
    if (b.tol_kernel && b.tol_kernel->count()) c.tol_kernel = f.tol_kernel;
    if (b.tensor && b.tensor->count()) c.tensor = f.tensor;
    if (b.report && b.report->count()) c.report = f.report;
    if (b.route && b.route->count()) c.route = f.route;
    if (b.cache_dir && b.cache_dir->count()) c.cache_dir = f.cache_dir;
    if (b.timings && b.timings->count()) c.timings = true;
    validate(c);
    return c;
}

void emit(const nlohmann::json& j, const std::filesystem::path& path) {
    if (path.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_json(j, path);
}

int run_tensor(const RunConfig& c) {
    const std::filesystem::path path = tensor_path(c);
    TensorCache cache = load_cache_or_empty(path);
    TensorEngine engine(c.n, solver_config(c));
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const BlockOutcome o = engine.compute_block(c.n, cache, c.jobs, path);
    cache.save(path);
    emit({{"tensor", path.string()},
          {"truncation", cache.truncation()},
          {"entries", cache.size()},
          {"computed", o.computed},
          {"solves", o.solves},
          {"tensor_hash", cache.content_hash()}},
         c.report);
    return kOk;
}

int run_operator(const RunConfig& c, const std::string& out) {
    if (out.empty()) throw ConfigError("out", "an output CSV path is required");
    const std::filesystem::path path = tensor_path(c);
    if (!std::filesystem::exists(path)) throw ConfigError("tensor", "no tensor cache at '" + path.string() + "'");
    const TensorCache cache = TensorCache::load(path);
    const OperatorMatrix m = assemble_matrix(c.n, cache, c.jobs);
    std::filesystem::path csv(out);
    if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
    m.write_csv(csv);
    std::filesystem::path side = csv;
    side.replace_extension(".json");
    if (side == csv) side += ".json";
    nlohmann::json meta = m.sidecar();
    meta["tensor_hash"] = cache.content_hash();
    write_json(meta, side);
    std::cout << csv.string() << "\n" << side.string() << "\n";
    return kOk;
}

int run_sections(const std::string& name, const RunConfig& c, const ReportSections& s) {
    const PipelineResult r = run_pipeline(name, c, s);
    emit(r.report, c.report);
    return r.pass ? kOk : kVerdictFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Truncated Weil-Petersson curvature operator: tensors, spectra and verdicts"};
    app.require_subcommand(1);
    Flags f;
    app.add_option("--config", f.config, "TOML configuration file")->check(CLI::ExistingFile);

    auto* tensor = app.add_subcommand("tensor", "compute and cache the tensor block of rank n");
    const Bound b_tensor = add_common(tensor, f);
    auto* op = app.add_subcommand("operator", "export the assembled operator matrix as CSV");
    const Bound b_op = add_common(op, f);
    op->add_option("--out", f.out, "CSV output path");
    auto* spectra = app.add_subcommand("spectra", "eigenvalues and sign/bound/kernel verdicts for ranks 1..n");
    const Bound b_spectra = add_common(spectra, f);
    auto* verify = app.add_subcommand("verify", "every check in one report; nonzero exit on any failure");
    const Bound b_verify = add_common(verify, f);
    auto* noncompact = app.add_subcommand("noncompact", "dyadic A_i diagnostics and projected spectra");
    const Bound b_noncompact = add_common(noncompact, f);
    auto* oracle = app.add_subcommand("oracle", "independent cross-checks");
    std::string suite;
    oracle->add_option("--suite", suite, "beta, resolvent or form")
        ->required()
        ->check(CLI::IsMember({"beta", "resolvent", "form"}));
    oracle->add_option("--report", f.report, "report path (default: stdout)");
    auto* plots = app.add_subcommand("export-plots", "CSV plot data from a report");
    std::string plot_report, plot_dir = "plots";
    plots->add_option("--report", plot_report, "report JSON")->required();
    plots->add_option("--out", plot_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*tensor) return run_tensor(resolve(f, b_tensor));
        if (*op) return run_operator(resolve(f, b_op), f.out);
        if (*spectra) return run_sections("spectra", resolve(f, b_spectra), {true, false, false});
        if (*verify) return run_sections("verify", resolve(f, b_verify), {true, true, true});
        if (*noncompact) return run_sections("noncompact", resolve(f, b_noncompact), {false, true, false});
        if (*oracle) {
            const SuiteResult r = run_suite(suite);
            emit(to_json(r), f.report);
            return r.pass ? kOk : kVerdictFailed;
        }
        if (*plots) {
            std::ifstream in(plot_report);
            if (!in) throw ConfigError("report", "cannot read '" + plot_report + "'");
            nlohmann::json report;
            try {
                report = nlohmann::json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                throw ConfigError("report", std::string("malformed JSON: ") + e.what());
            }
            for (const auto& p : export_plots(report, plot_dir)) std::cout << p.string() << "\n";
            return kOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const MissingEntryError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const CacheFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "failed: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kConfigError;
}
