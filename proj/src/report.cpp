#include "wpc/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>

namespace wpc {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

TensorCache load_cache_or_empty(const std::filesystem::path& path) {
    std::error_code ec;
    if (std::filesystem::exists(path, ec)) return TensorCache::load(path);
    return TensorCache{};
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

PipelineResult run_pipeline(const std::string& command, const RunConfig& config, const ReportSections& sections) {
    validate(config);
    nlohmann::json timings = nlohmann::json::object();
    const std::filesystem::path path = tensor_path(config);
    TensorCache cache = load_cache_or_empty(path);

    int labels = sections.spectra ? config.n : 1;
    if (sections.noncompactness) labels = std::max(labels, (1 << (config.i_max + 1)) - 1);
    if (sections.trend) labels = std::max(labels, config.trend_n);

    auto t0 = clock_type::now();
    TensorEngine engine(labels, solver_config(config));
    std::vector<TensorIndex> wanted;
    if (sections.spectra) wanted = canonical_tuples(config.n);
    if (sections.noncompactness) {
        const auto slice = dyadic_slice(config.i_max);
        wanted.insert(wanted.end(), slice.begin(), slice.end());
    }
    if (sections.trend)
        for (int k = 1; k <= config.trend_n; ++k) wanted.push_back({k, k, k, k});
    const BlockOutcome outcome = engine.compute_entries(wanted, cache, config.jobs, path);
    if (sections.spectra) cache.set_truncation(std::max(cache.truncation(), config.n));
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    cache.save(path);
    timings["tensor"] = seconds_since(t0);
    timings["entries_computed"] = outcome.computed;

    nlohmann::json report = {{"schema", kReportSchema},
                             {"schema_version", kReportSchemaVersion},
                             {"command", command},
                             {"config", to_json(config)},
                             {"tensor_hash", cache.content_hash()},
                             {"tensor_entries", cache.size()}};
    nlohmann::json verdicts = nlohmann::json::object();
    bool pass = true;

    if (sections.spectra) {
        t0 = clock_type::now();
        nlohmann::json spectra = nlohmann::json::array();
        bool nonpositive = true, bounded = true, monotone = true, kernel_ok = true;
        double lambda_max = -std::numeric_limits<double>::infinity(), worst_abs_min = 0.0, previous = 0.0;
        nlohmann::json kernel_rows = nlohmann::json::array();
        SpectralReport top;
        for (int k = 1; k <= config.n; ++k) {
            const SpectralReport s = analyze(assemble_matrix(k, cache, config.jobs), config.tol_eigen, config.tol_kernel);
            spectra.push_back(to_json(s));
            nonpositive = nonpositive && s.nonpositive.pass;
            bounded = bounded && s.bound.pass;
            kernel_ok = kernel_ok && s.kernel.pass;
            lambda_max = std::max(lambda_max, s.lambda_max);
            worst_abs_min = std::max(worst_abs_min, s.bound.abs_lambda_min);
            if (s.bound.abs_lambda_min < previous) monotone = false;
            previous = s.bound.abs_lambda_min;
            kernel_rows.push_back({{"n", k}, {"dimension", s.kernel.dimension}, {"expected", s.kernel.expected},
                                   {"gap_ok", s.kernel.gap_ok}});
            top = s;
        }
        verdicts["nonpositive"] = {{"pass", nonpositive}, {"lambda_max", lambda_max}, {"tolerance", config.tol_eigen}};
        verdicts["bound"] = {{"pass", bounded && monotone},
                             {"abs_lambda_min", worst_abs_min},
                             {"bound", operator_norm_bound()},
                             {"monotone_in_n", monotone}};
        verdicts["kernel_dim"] = {{"pass", kernel_ok},
                                  {"value", top.kernel.dimension},
                                  {"expected", top.kernel.expected},
                                  {"tolerance", config.tol_kernel},
                                  {"per_truncation", kernel_rows}};
        pass = pass && nonpositive && bounded && monotone && kernel_ok;
        report["spectra"] = spectra;
        timings["spectra"] = seconds_since(t0);
    }

    if (sections.noncompactness) {
        t0 = clock_type::now();
        const NoncompactnessReport r = noncompactness_evidence(config.i_max, cache);
        report["noncompactness"] = to_json(r);
        double min_neg_q = std::numeric_limits<double>::infinity();
        for (const auto& row : r.rows) min_neg_q = std::min(min_neg_q, row.neg_q);
        verdicts["noncompactness"] = {{"pass", r.pass},
                                      {"i_max", r.i_max},
                                      {"min_neg_q", min_neg_q},
                                      {"reference", dyadic_reference()},
                                      {"final_bound_met", r.final_bound_met}};
        pass = pass && r.pass;
        timings["noncompactness"] = seconds_since(t0);
    }

    if (sections.trend) {
        const SectionalTrend s = holomorphic_sectional_trend(config.trend_n, cache);
        report["sectional_trend"] = {{"n_max", config.trend_n},
                                     {"values", s.values},
                                     {"positive", s.positive},
                                     {"strictly_decreasing", s.strictly_decreasing}};
    }

    report["verdicts"] = verdicts;
    report["pass"] = pass;
    if (config.timings) report["timings"] = timings;
    return {report, pass};
}

std::vector<std::filesystem::path> export_plots(const nlohmann::json& report, const std::filesystem::path& dir) {
    if (!report.is_object() || report.empty()) throw std::invalid_argument("export_plots: empty report");
    if (report.value("schema", "") != kReportSchema)
        throw std::invalid_argument("export_plots: not a wp report (schema field missing or wrong)");
    const bool has_spectra = report.contains("spectra") && report["spectra"].is_array() && !report["spectra"].empty();
    const bool has_trend = report.contains("sectional_trend");
    const bool has_dyadic = report.contains("noncompactness");
    if (!has_spectra && !has_trend && !has_dyadic)
        throw std::invalid_argument("export_plots: report has no spectra, trend or noncompactness data");

    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    const auto open = [&](const std::string& name) {
        written.push_back(dir / name);
        std::ofstream out(written.back());
        if (!out) throw std::runtime_error("cannot write " + written.back().string());
        return out;
    };

    try {
        if (has_spectra) {
            const auto& spectra = report["spectra"];
            const auto& top = *std::max_element(spectra.begin(), spectra.end(), [](const auto& a, const auto& b) {
                return a.at("n").template get<int>() < b.at("n").template get<int>();
            });
            auto out = open("eigenvalues.csv");
            out << "index,eigenvalue\n";
            int idx = 0;
            for (const auto& e : top.at("eigenvalues")) out << idx++ << "," << fmt17(e.get<double>()) << "\n";

            auto mins = open("lambda_min.csv");
            mins << "n,lambda_min,bound\n";
            for (const auto& s : spectra)
                mins << s.at("n").get<int>() << "," << fmt17(s.at("lambda_min").get<double>()) << ","
                     << fmt17(operator_norm_bound()) << "\n";
        }
        if (has_trend) {
            auto out = open("sectional_curvature.csv");
            out << "n,R_nnnn,sectional_curvature\n";
            int k = 1;
            for (const auto& v : report["sectional_trend"].at("values")) {
                const double r = v.get<double>();
                out << k++ << "," << fmt17(r) << "," << fmt17(-r) << "\n";
            }
        }
        if (has_dyadic) {
            auto out = open("dyadic.csv");
            out << "i,neg_q,d_term,area_bound,final_bound,reference\n";
            for (const auto& row : report["noncompactness"].at("rows"))
                out << row.at("i").get<int>() << "," << fmt17(row.at("neg_q").get<double>()) << ","
                    << fmt17(row.at("d_term").get<double>()) << "," << fmt17(row.at("area_bound").get<double>())
                    << "," << fmt17(dyadic_final_bound()) << "," << fmt17(dyadic_reference()) << "\n";
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("export_plots: malformed report: ") + e.what());
    }
    return written;
}

}  // namespace wpc
