#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "wpc/spectral_analysis.hpp"

using namespace wpc;

namespace {

TensorCache& block(int n) {
    static std::map<int, TensorCache> caches;
    auto it = caches.find(n);
    if (it == caches.end()) {
        TensorEngine engine(n);
        TensorCache cache;
        engine.compute_block(n, cache, 4);
        it = caches.emplace(n, cache).first;
    }
    return it->second;
}

const double kT1111 = 11.0 / (60.0 * kPi);

std::vector<WedgeVector> random_orthonormal(int n, int m, std::mt19937_64& rng) {
    const int dim = WedgeVector::dimension_for(n);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd g(dim, m);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < m; ++c) g(r, c) = nd(rng);
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ() * Eigen::MatrixXd::Identity(dim, m);
    std::vector<WedgeVector> out;
    for (int c = 0; c < m; ++c) out.emplace_back(n, q.col(c));
    return out;
}

}  // namespace

TEST_CASE("constants") {
    CHECK(operator_norm_bound() == doctest::Approx(15.635).epsilon(1e-4));
    CHECK(dyadic_reference() == doctest::Approx(9.3132e-10).epsilon(1e-4));
    CHECK(dyadic_final_bound() == doctest::Approx(1.2506e-9).epsilon(1e-4));
    CHECK(dyadic_final_bound() > dyadic_reference());
}

TEST_CASE("rank one truncation") {
    const SpectralReport r = analyze(assemble_matrix(1, block(1)));
    REQUIRE(r.eigenvalues.size() == 1);
    CHECK(r.lambda_min == doctest::Approx(-8.0 * kT1111).epsilon(1e-12));
    CHECK(r.nonpositive.pass);
    CHECK(r.kernel.dimension == 0);
    CHECK(r.kernel.pass);
    CHECK(r.bound.pass);
}

TEST_CASE("zero matrix passes the sign check") {
    OperatorMatrix z{2, Eigen::MatrixXd::Zero(6, 6), wedge_index_map(2)};
    CHECK(verify_nonpositive(z).pass);
    CHECK(verify_nonpositive(z).lambda_max == 0.0);
    OperatorMatrix bad{1, Eigen::MatrixXd::Zero(2, 2), {}};
    bad.matrix(0, 1) = 1.0;
    CHECK_THROWS_AS(verify_nonpositive(bad), std::invalid_argument);
}

TEST_CASE("spectra for n = 2 .. 4") {
    double previous = 0.0;
    for (int n = 2; n <= 4; ++n) {
        CAPTURE(n);
        const SpectralReport r = analyze(assemble_matrix(n, block(n)));
        CHECK(static_cast<int>(r.eigenvalues.size()) == n * (2 * n - 1));
        CHECK(r.nonpositive.pass);
        CHECK(r.bound.pass);
        CHECK(r.kernel.dimension == n * (n - 1));
        CHECK(r.kernel.gap_ok);
        CHECK(r.pass());
        CHECK(std::abs(r.lambda_min) >= previous);
        previous = std::abs(r.lambda_min);
        const nlohmann::json j = to_json(r);
        CHECK(j.at("kernel").at("expected") == n * (n - 1));
        CHECK(j.dump() == to_json(analyze(assemble_matrix(n, block(n)))).dump());
    }
}

TEST_CASE("bound on single bivectors") {
    const TensorCache& cache = block(2);
    WedgeVector v(2);
    v.b(1, 1) = 1.0;
    CHECK(std::abs(quadratic_form(v, cache)) <= operator_norm_bound());
    CHECK(std::abs(quadratic_form(2.0 * v, cache)) <= 4.0 * operator_norm_bound());
}

TEST_CASE("cauchy interlacing on random subspaces") {
    const int n = 4;
    const TensorLookup t = cache_lookup(block(n));
    const std::vector<double> full = sorted_eigenvalues(assemble_matrix(n, block(n)).matrix);
    std::mt19937_64 rng(41);
    for (int m = 1; m <= 8; ++m) {
        CAPTURE(m);
        const auto basis = random_orthonormal(n, m, rng);
        const std::vector<double> sub = sorted_eigenvalues(compress(basis, t));
        CHECK(interlaces(full, sub, 1e-10));
    }
    CHECK_FALSE(interlaces({-1.0, 0.0}, {0.5}, 1e-10));
    CHECK_FALSE(interlaces({-1.0, 0.0}, {-2.0}, 1e-10));
}

TEST_CASE("interlacing on the span of A_0, A_1, A_2") {
    const int n = 7;
    const TensorCache& cache = block(n);
    const std::vector<double> full = sorted_eigenvalues(assemble_matrix(n, cache, 4).matrix);
    CHECK(full.size() == 91);
    const std::vector<WedgeVector> basis = {a_vector(0, n), a_vector(1, n), a_vector(2, n)};
    const Eigen::MatrixXd p = compress(basis, cache_lookup(cache));
    CHECK(interlaces(full, sorted_eigenvalues(p), 1e-10));
    CHECK(p(0, 0) == doctest::Approx(-8.0 * kT1111).epsilon(1e-12));
}

TEST_CASE("dyadic cube sums") {
    CHECK(static_cast<unsigned long long>(dyadic_cube_sum(0)) == 8ULL);
    CHECK(static_cast<unsigned long long>(dyadic_cube_sum(1)) == 91ULL);
    for (int i = 0; i <= 6; ++i) {
        unsigned long long direct = 0;
        for (unsigned long long k = 1ULL << i; k < 2ULL << i; ++k) direct += (k + 1) * (k + 1) * (k + 1);
        CHECK(static_cast<unsigned long long>(dyadic_cube_sum(i)) == direct);
    }
    for (int i = 0; i <= 24; ++i) CHECK(cube_condition(i));
    CHECK_THROWS(dyadic_cube_sum(-1));
}

TEST_CASE("dyadic slice covers the A_i form") {
    const auto slice = dyadic_slice(1);
    CHECK(std::is_sorted(slice.begin(), slice.end()));
    for (const auto& t : slice) CHECK(t == canonical_index(t));
    TensorCache partial;
    CHECK_THROWS_AS(noncompactness_evidence(1, partial), std::invalid_argument);
}

TEST_CASE("noncompactness evidence up to i = 4") {
    TensorCache cache;
    TensorEngine engine(31);
    const NoncompactnessReport r = noncompactness_evidence(4, cache, &engine, 4);
    REQUIRE(r.rows.size() == 5);
    CHECK(r.cube_threshold == 0);
    for (const DyadicRow& row : r.rows) {
        CAPTURE(row.i);
        CHECK(row.neg_q >= dyadic_reference());
        CHECK(row.neg_q >= row.d_term * (1.0 - 1e-12));
        CHECK(row.d_term >= row.area_bound * (1.0 - 1e-12));
        CHECK(row.chain_ordered);
        CHECK(row.power_bound.has_value() == (row.i >= 1));
    }
    CHECK(r.rows[0].neg_q == doctest::Approx(8.0 * kT1111).epsilon(1e-12));
    CHECK(r.final_bound_met);
    REQUIRE(r.projections.size() == 2);
    for (const ProjectionRow& p : r.projections) {
        CAPTURE(p.m);
        CHECK(p.trace == doctest::Approx(p.q_sum).epsilon(1e-12));
        CHECK(p.count_below >= p.floor_sqrt);
        CHECK(p.pass);
    }
    CHECK(r.pass);
    const nlohmann::json j = to_json(r);
    CHECK(j.at("rows").size() == 5);
    CHECK(j.at("rows")[0].at("power_bound").is_null());

    const NoncompactnessReport again = noncompactness_evidence(4, cache);
    CHECK(to_json(again).dump() == j.dump());
}

TEST_CASE("holomorphic sectional curvature trend") {
    TensorCache cache;
    TensorEngine engine(12);
    std::vector<TensorIndex> diag;
    for (int n = 1; n <= 12; ++n) diag.push_back({n, n, n, n});
    engine.compute_entries(diag, cache, 4);
    const SectionalTrend s = holomorphic_sectional_trend(12, cache);
    REQUIRE(s.values.size() == 12);
    CHECK(s.values[0] == doctest::Approx(2.0 * kT1111).epsilon(1e-12));
    CHECK(s.positive);
    CHECK(s.strictly_decreasing);
}
