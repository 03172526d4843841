#include <doctest.h>

#include <cmath>
#include <random>

#include "wpc/hyperbolic_disk.hpp"
#include "wpc/quadrature.hpp"

using namespace wpc;

namespace {

double beta_six(int m) {
    // 6! m! / (m + 7)!
    double v = 720.0;
    for (int k = 1; k <= 7; ++k) v /= (m + k);
    return v;
}

BeltramiForm random_form(std::mt19937_64& rng, int max_label) {
    std::normal_distribution<double> nd;
    std::uniform_int_distribution<int> count(1, 5);
    std::uniform_int_distribution<int> pick(1, max_label);
    BeltramiForm mu;
    const int terms = count(rng);
    for (int t = 0; t < terms; ++t) mu.add(pick(rng), cplx(nd(rng), nd(rng)));
    return mu;
}

}  // namespace

TEST_CASE("gauss-legendre rule integrates (1-x)^6 x^m exactly") {
    const int max_power = 31;
    const QuadratureRule rule = gauss_jacobi(radial_order_for_power(max_power));
    for (int m = 0; m <= 2 * max_power; ++m) {
        const double got = rule.integrate_weighted(
            [m](double x) { return std::pow(1.0 - x, 6) * std::pow(x, m); });
        CHECK(std::abs(got - beta_six(m)) <= 1e-12 * beta_six(m));
    }
}

TEST_CASE("gauss-jacobi rule absorbs the boundary weight") {
    const QuadratureRule rule = gauss_jacobi(40, 6.0, 0.0);
    for (int m = 0; m <= 62; ++m) {
        const double got = rule.integrate_weighted([m](double x) { return std::pow(x, m); });
        CHECK(std::abs(got - beta_six(m)) <= 1e-12 * beta_six(m));
    }
    const QuadratureRule shifted = gauss_jacobi(20, 1.5, 2.0);
    // int (1-x)^1.5 x^2 dx = B(3, 2.5)
    const double exact = std::tgamma(3.0) * std::tgamma(2.5) / std::tgamma(5.5);
    CHECK(shifted.integrate_weighted([](double) { return 1.0; }) == doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("quadrature rules round-trip through json") {
    const QuadratureRule rule = gauss_jacobi(12, 2.0, 1.0);
    const nlohmann::json j = rule;
    CHECK(j.at("order") == 12);
    CHECK(j.at("alpha") == 2.0);
    const QuadratureRule back = j.get<QuadratureRule>();
    CHECK(back.same_nodes(rule));
    CHECK(back.weights() == rule.weights());
    CHECK_THROWS(gauss_jacobi(0));
    CHECK_THROWS(gauss_jacobi(4, -1.0, 0.0));
}

TEST_CASE("interpolation and differentiation are exact on polynomials") {
    const QuadratureRule rule = gauss_jacobi(16);
    std::vector<double> vals;
    for (double x : rule.nodes()) vals.push_back(3.0 * x * x * x - x + 0.5);
    CHECK(rule.interpolate<double>(vals, 0.3) == doctest::Approx(3.0 * 0.027 - 0.3 + 0.5).epsilon(1e-13));
    CHECK(rule.interpolate<double>(vals, 1.0) == doctest::Approx(2.5).epsilon(1e-12));
    const Eigen::MatrixXd d = rule.differentiation_matrix();
    const Eigen::VectorXd dv = d * Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
    for (int k = 0; k < rule.order(); ++k) {
        const double x = rule.nodes()[k];
        CHECK(dv(k) == doctest::Approx(9.0 * x * x - 1.0).epsilon(1e-11));
    }
}

TEST_CASE("basis elements carry power n-2 and the normalizing amplitude") {
    const BasisElement e2 = basis_element(2);
    CHECK(e2.power == 0);
    CHECK(e2.label() == 1);
    CHECK(e2.amplitude == doctest::Approx(0.4886025119029199).epsilon(1e-15));
    const BasisElement e3 = basis_element(3);
    CHECK(e3.power == 1);
    CHECK(e3.amplitude == doctest::Approx(0.25 * std::sqrt(48.0 / kPi)).epsilon(1e-15));
    for (int n = 2; n < 40; ++n) CHECK(basis_element(n).amplitude > 0.0);
    CHECK_THROWS_AS(basis_element(1), std::invalid_argument);
    CHECK_THROWS_AS(basis_from_label(0), std::invalid_argument);
    const cplx z(0.3, -0.4);
    CHECK(std::abs(e3(z) - (1.0 - 0.25) * (1.0 - 0.25) * e3.amplitude * std::conj(z)) < 1e-15);
}

TEST_CASE("gram matrix of the first 32 basis elements is the identity") {
    const QuadratureRule rule = gauss_jacobi(radial_order_for_power(31));
    double worst = 0.0;
    for (int i = 1; i <= 32; ++i)
        for (int j = 1; j <= 32; ++j) {
            const cplx g = wp_inner(BeltramiForm::basis(i), BeltramiForm::basis(j), rule);
            worst = std::max(worst, std::abs(g - cplx(i == j ? 1.0 : 0.0)));
        }
    CHECK(worst <= 1e-10);
}

TEST_CASE("distinct powers pair to exactly zero and the pairing is hermitian") {
    CHECK(wp_inner(BeltramiForm::basis(1), BeltramiForm::basis(2)) == cplx(0.0));
    CHECK(wp_inner(BeltramiForm(), BeltramiForm::basis(3)) == cplx(0.0));
    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
        const BeltramiForm a = random_form(rng, 10);
        const BeltramiForm b = random_form(rng, 10);
        CHECK(std::abs(wp_inner(a, b) - std::conj(wp_inner(b, a))) < 1e-13);
        CHECK(wp_inner(a, a).real() > 0.0);
    }
}

TEST_CASE("sup norm of a single element and homogeneity") {
    CHECK(std::abs(sup_norm(BeltramiForm::basis(1)) - harnack_constant()) <= 1e-10);
    CHECK(std::abs(sup_norm(BeltramiForm::basis(1, 2.0)) - 2.0 * harnack_constant()) <= 1e-10);
    // maximizer of (1-x)^2 x^{p/2} sits at x = p/(p+4)
    const BasisElement e = basis_from_label(5);
    const double xs = 4.0 / 8.0;
    CHECK(sup_norm(BeltramiForm::basis(5)) == doctest::Approx(e.modulus(xs)).epsilon(1e-14));
    CHECK_THROWS(sup_norm(BeltramiForm()));
}

TEST_CASE("sup norm stays below the harnack constant times the norm") {
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 100; ++t) {
        const BeltramiForm mu = random_form(rng, 12);
        const double norm = wp_norm(mu);
        CHECK(sup_norm(mu) <= harnack_constant() * norm + 1e-10);
    }
}

TEST_CASE("separable products have mode p_j - p_i and evaluate pointwise") {
    auto rule = std::make_shared<const QuadratureRule>(gauss_jacobi(32));
    const SeparableFunction f = SeparableFunction::basis_product(rule, 2, 5);
    REQUIRE(f.modes() == std::vector<int>{3});
    CHECK(f.terms().at(3).decay == 4);
    const cplx z(0.41, 0.27);
    const cplx expect = basis_from_label(2)(z) * std::conj(basis_from_label(5)(z));
    CHECK(std::abs(f(z) - expect) < 1e-14);
    CHECK(SeparableFunction::basis_product(rule, 5, 2).modes() == std::vector<int>{-3});

    BeltramiForm mu;
    mu.add(1, cplx(0.5, 1.0)).add(3, -2.0);
    const SeparableFunction s = SeparableFunction::modulus_squared(rule, mu);
    CHECK(std::abs(s(z) - std::norm(mu(z))) < 1e-13);
    CHECK(std::abs(s.conj()(z) - std::conj(s(z))) < 1e-14);
}

TEST_CASE("area integrals of basis products") {
    auto rule = std::make_shared<const QuadratureRule>(gauss_jacobi(32));
    const SeparableFunction s = SeparableFunction::basis_product(rule, 1, 1);
    // int |mu_1|^4 dA = 4 pi a^4 / 7 with a^2 = 3 / (4 pi)
    CHECK(integrate_product(s, s).real() == doctest::Approx(9.0 / (28.0 * kPi)).epsilon(1e-14));
    const SeparableFunction p = SeparableFunction::basis_product(rule, 1, 2);
    CHECK(integrate_product(p, p) == cplx(0.0));
    CHECK(std::abs(l2_inner(p, p).imag()) == 0.0);
    const SeparableFunction one = SeparableFunction::constant(rule, 1.0);
    CHECK_THROWS_AS(integrate_product(one, one), std::domain_error);
}

TEST_CASE("hyperbolic distance and polar grid") {
    CHECK(hyperbolic_distance(0.0, 0.5) == doctest::Approx(2.0 * std::atanh(0.5)).epsilon(1e-15));
    const cplx a(0.2, 0.1), b(-0.5, 0.3);
    CHECK(hyperbolic_distance(a, b) == doctest::Approx(hyperbolic_distance(b, a)).epsilon(1e-15));
    const auto grid = polar_grid(25, 40);
    CHECK(grid.size() == 1000);
    for (const cplx& z : grid) CHECK(std::abs(z) < 1.0);
}
