#include "wpc/oracle_suites.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "wpc/oracle.hpp"
#include "wpc/resolvent.hpp"
#include "wpc/wedge_operator.hpp"

namespace wpc {

SuiteResult beta_suite_result(int m_max) {
    const oracle::BetaSuite b = oracle::beta_suite(m_max);
    SuiteResult r;
    r.name = "beta";
    r.pass = b.pass;
    r.detail = {{"m_min", 1}, {"m_max", b.m_max}, {"first_failure", b.first_failure},
                {"value_at_1", oracle::beta_integral_exact(1).str()}};
    return r;
}

SuiteResult resolvent_suite(int inputs, double tolerance) {
    static const std::pair<int, int> pairs[] = {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {1, 3},
                                                {3, 1}, {2, 3}, {3, 3}, {2, 4}, {4, 4}};
    if (inputs < 1 || inputs > 10) throw std::invalid_argument("resolvent_suite: inputs must lie in [1, 10]");
    const auto rule = std::make_shared<const QuadratureRule>(gauss_jacobi(48));
    const Resolvent collocation(rule);
    const KernelResolvent kernel;
    const double radii[] = {0.15, 0.45, 0.75, 0.9};

    SuiteResult r;
    r.name = "resolvent";
    r.tolerance = tolerance;
    r.detail = nlohmann::json::array();
    for (int t = 0; t < inputs; ++t) {
        const auto [i, j] = pairs[t];
        const SeparableFunction f = SeparableFunction::basis_product(rule, i, j);
        const SeparableFunction df = collocation.apply(f);
        const int mode = j - i;
        const double amp = 0.0625 * std::sqrt((2.0 * std::pow(i + 1.0, 3) - 2.0 * (i + 1.0)) *
                                              (2.0 * std::pow(j + 1.0, 3) - 2.0 * (j + 1.0))) / kPi;
        // |mu_i conj(mu_j)| = amp (1 - r^2)^4 r^{(i-1)+(j-1)}
        const auto profile = [&, i = i, j = j](double s) {
            const double c = 1.0 / std::cosh(0.5 * s);
            return amp * std::pow(c, 8) * std::pow(std::tanh(0.5 * s), i + j - 2);
        };
        const oracle::FdSolution fd = oracle::fd_resolvent_extrapolated(profile, std::abs(mode), 2048);
        double worst = 0.0;
        for (double rad : radii) {
            const double a = df(cplx(rad, 0.0)).real();
            const double b = fd.at_radius(rad);
            const double c = kernel.apply_at(f, cplx(rad, 0.0)).real();
            worst = std::max({worst, std::abs(a - b), std::abs(a - c), std::abs(b - c)});
        }
        r.max_deviation = std::max(r.max_deviation, worst);
        r.detail.push_back({{"i", i}, {"j", j}, {"mode", mode}, {"max_deviation", worst}});
    }
    r.pass = r.max_deviation <= tolerance;
    return r;
}

SuiteResult form_suite(int vectors, unsigned seed, double tolerance) {
    if (vectors < 1) throw std::invalid_argument("form_suite: vectors must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    SuiteResult r;
    r.name = "form";
    r.tolerance = tolerance;
    r.detail = nlohmann::json::array();
    for (int n = 2; n <= 3; ++n) {
        TensorEngine engine(n);
        TensorCache cache;
        engine.compute_block(n, cache, 1);
        std::vector<WedgeVector> vs;
        for (int k = 0; k < vectors; ++k) {
            WedgeVector v(n);
            for (int a = 0; a < v.dimension(); ++a) v.coefficients()[a] = nd(rng);
            vs.push_back(v);
        }
        const auto direct = oracle::direct_quadratic_forms(vs);
        double worst = 0.0, gap = 0.0;
        for (int k = 0; k < vectors; ++k) {
            worst = std::max(worst, std::abs(direct[k].value - quadratic_form(vs[k], cache)));
            gap = std::max(gap, direct[k].refinement_gap);
        }
        r.max_deviation = std::max(r.max_deviation, worst);
        r.detail.push_back({{"n", n}, {"vectors", vectors}, {"max_deviation", worst}, {"refinement_gap", gap}});
    }
    r.pass = r.max_deviation <= tolerance;
    return r;
}

SuiteResult run_suite(const std::string& name) {
    if (name == "beta") return beta_suite_result();
    if (name == "resolvent") return resolvent_suite();
    if (name == "form") return form_suite();
    throw std::invalid_argument("unknown oracle suite '" + name + "' (expected beta, resolvent or form)");
}

nlohmann::json to_json(const SuiteResult& r) {
    return {{"suite", r.name}, {"pass", r.pass}, {"max_deviation", r.max_deviation},
            {"tolerance", r.tolerance}, {"detail", r.detail}};
}

}  // namespace wpc
