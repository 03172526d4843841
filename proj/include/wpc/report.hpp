#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wpc/run_config.hpp"
#include "wpc/spectral_analysis.hpp"

namespace wpc {

inline constexpr const char* kReportSchema = "wp-report";
inline constexpr int kReportSchemaVersion = 1;

/// Which sections a pipeline run produces.
struct ReportSections {
    bool spectra = false;
    bool noncompactness = false;
    bool trend = false;
};

struct PipelineResult {
    nlohmann::json report;
    bool pass = false;
};

/// Loads the cache at the configured path (empty when absent), computes every
/// missing entry the requested sections need, saves the cache back and
/// evaluates the verdicts.
PipelineResult run_pipeline(const std::string& command, const RunConfig& config, const ReportSections& sections);

TensorCache load_cache_or_empty(const std::filesystem::path& path);

/// Plot data from a report: eigenvalues.csv (largest truncation),
/// lambda_min.csv, sectional_curvature.csv and dyadic.csv, when the report has
/// the corresponding sections. Throws std::invalid_argument on malformed or
/// empty reports.
std::vector<std::filesystem::path> export_plots(const nlohmann::json& report, const std::filesystem::path& dir);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace wpc
