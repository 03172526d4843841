#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "wpc/oracle.hpp"
#include "wpc/resolvent.hpp"

using namespace wpc;
using oracle::RationalValue;

namespace {

const double kT1111 = 11.0 / (60.0 * kPi);

double modulus_mu1_squared(double s) {
    const double c = 1.0 / std::cosh(0.5 * s);
    return 3.0 / (4.0 * kPi) * std::pow(c, 8);
}

double d_of_mu1_squared(double r) {
    const double x = r * r;
    return 3.0 / (4.0 * kPi) * 2.0 * (2.0 - x) * (1.0 - x) * (1.0 - x) / 9.0;
}

std::shared_ptr<const QuadratureRule> rule(int order) {
    return std::make_shared<const QuadratureRule>(gauss_jacobi(order));
}

WedgeVector random_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    WedgeVector v(n);
    for (int a = 0; a < v.dimension(); ++a) v.coefficients()[a] = nd(rng);
    return v;
}

}  // namespace

TEST_CASE("exact beta integrals") {
    CHECK(oracle::beta_integral_exact(1) == RationalValue(1, 56));
    CHECK(oracle::beta_lower_bound(1) == RationalValue(45, 131072));
    CHECK(oracle::beta_integral_exact(1) >= oracle::beta_lower_bound(1));
    CHECK(oracle::beta_integral_exact(2) == RationalValue(720 * 2, 362880));
    const oracle::BetaSuite s = oracle::beta_suite(1000);
    CHECK(s.pass);
    CHECK(s.first_failure == 0);
    CHECK(oracle::beta_integral_exact(1000) >= oracle::beta_lower_bound(1000));
    CHECK_THROWS_AS(oracle::beta_integral_exact(0), std::invalid_argument);
}

TEST_CASE("finite-difference resolvent of constants") {
    const auto u = oracle::fd_resolvent_extrapolated([](double) { return 1.0; }, 0, 1024);
    for (double r : {0.0, 0.3, 0.6, 0.9}) CHECK(std::abs(u.at_radius(r) - 1.0) <= 1e-6);
    CHECK_THROWS_AS(oracle::fd_resolvent([](double) { return 1.0; }, 0, 32), std::invalid_argument);
}

TEST_CASE("finite differences agree with collocation") {
    const auto r64 = rule(64);
    const Resolvent solver(r64);
    const SeparableFunction d1 = solver.apply(SeparableFunction::modulus_squared(r64, BeltramiForm::basis(1)));
    const auto u = oracle::fd_resolvent_extrapolated(modulus_mu1_squared, 0, 2048);
    for (double r : {0.0, 0.25, 0.5, 0.75, 0.95}) {
        CAPTURE(r);
        CHECK(std::abs(u.at_radius(r) - d1.profile_at(0, r * r).real()) <= 1e-6);
        CHECK(std::abs(u.at_radius(r) - d_of_mu1_squared(r)) <= 1e-6);
    }

    // mu_1 conj(mu_2) carries angular mode 1
    const SeparableFunction d12 = solver.apply(SeparableFunction::basis_product(r64, 1, 2));
    REQUIRE(d12.modes() == std::vector<int>{1});
    const double a1 = basis_from_label(1).amplitude, a2 = basis_from_label(2).amplitude;
    const auto f12 = [&](double s) {
        const double c = 1.0 / std::cosh(0.5 * s);
        return a1 * a2 * std::tanh(0.5 * s) * std::pow(c, 8);
    };
    const auto v = oracle::fd_resolvent_extrapolated(f12, 1, 2048);
    for (double r : {0.2, 0.5, 0.8}) {
        CAPTURE(r);
        CHECK(std::abs(v.at_radius(r) - r * d12.profile_at(1, r * r).real()) <= 1e-6);
    }
}

TEST_CASE("finite differences converge at second order") {
    std::vector<double> err;
    for (int cells : {256, 512, 1024}) {
        const auto u = oracle::fd_resolvent(modulus_mu1_squared, 0, cells);
        double worst = 0.0;
        for (double r : {0.0, 0.3, 0.6}) worst = std::max(worst, std::abs(u.at_radius(r) - d_of_mu1_squared(r)));
        err.push_back(worst);
    }
    for (int k = 0; k < 2; ++k) {
        const double ratio = err[k] / err[k + 1];
        CAPTURE(ratio);
        CHECK(ratio > 3.5);
        CHECK(ratio < 4.5);
    }
}

TEST_CASE("green kernel has unit mass") {
    boost::math::quadrature::tanh_sinh<double> ts;
    const double mass = ts.integrate([](double s) { return 2.0 * kPi * oracle::green(s) * std::sinh(s); }, 0.0, 40.0);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(oracle::green(1e-12) > oracle::green(1e-6));
    CHECK(oracle::green(3.0) > 0.0);
    CHECK_THROWS(oracle::green(0.0));
}

TEST_CASE("direct double quadrature of the curvature form") {
    WedgeVector v(1);
    v.b(1, 1) = 1.0;
    CHECK(std::abs(oracle::direct_quadratic_form(v) + 8.0 * kT1111) <= 1e-6);
    CHECK(oracle::direct_quadratic_form(WedgeVector(2)) == 0.0);

    std::mt19937_64 rng(8);
    const WedgeVector e = random_vector(2, rng);
    CHECK(std::abs(oracle::direct_quadratic_form(e - j_action(e))) <= 1e-6);
}

TEST_CASE("direct quadrature matches the tensor route on random vectors") {
    std::mt19937_64 rng(99);
    for (int n = 2; n <= 3; ++n) {
        TensorEngine engine(n);
        TensorCache cache;
        engine.compute_block(n, cache, 1);
        std::vector<WedgeVector> vs;
        for (int k = 0; k < 20; ++k) vs.push_back(random_vector(n, rng));
        const auto direct = oracle::direct_quadratic_forms(vs);
        for (int k = 0; k < 20; ++k) {
            CAPTURE(n);
            CAPTURE(k);
            CHECK(std::abs(direct[k].value - quadratic_form(vs[k], cache)) <= 1e-6);
        }
    }
}
