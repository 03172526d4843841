#pragma once

#include <string>

#include <json.hpp>

namespace wpc {

/// Result of one cross-route comparison suite.
struct SuiteResult {
    std::string name;
    bool pass = false;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    nlohmann::json detail;
};

/// Exact rational check of 6! m! / (m+7)! >= 45 / (2^17 m^7) for m in [1, m_max].
SuiteResult beta_suite_result(int m_max = 1000);

/// D on basis products mu_i conj(mu_j) by collocation, finite differences and
/// Green-kernel quadrature, compared at several radii.
SuiteResult resolvent_suite(int inputs = 10, double tolerance = 1e-6);

/// Tensor-route quadratic form against direct double quadrature on random
/// bivectors at n = 2 and n = 3.
SuiteResult form_suite(int vectors = 20, unsigned seed = 1, double tolerance = 1e-6);

/// Dispatches on "beta", "resolvent" or "form"; throws std::invalid_argument otherwise.
SuiteResult run_suite(const std::string& name);

nlohmann::json to_json(const SuiteResult& r);

}  // namespace wpc
