/**
 * @file quadrature.hpp
 * @brief Gauss-Jacobi rules on [0,1] in the squared radius x = r^2.
 *
 * Every radial integral over the Poincare disk is carried out in x = |z|^2.
 * A rule with parameters (alpha, beta) integrates
 *
 *     int_0^1 (1-x)^alpha x^beta p(x) dx
 *
 * exactly for polynomials p of degree <= 2*order - 1. The same node set is
 * used to store radial profiles as samples, so the rule also carries the
 * barycentric weights needed to interpolate and differentiate those samples.
 */
#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace wpc {

class QuadratureRule {
public:
    QuadratureRule() = default;

    int order() const { return static_cast<int>(nodes_.size()); }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    /// Highest polynomial degree (against the weight) integrated exactly.
    int exact_degree() const { return 2 * order() - 1; }

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

    /// (1-x)^alpha x^beta at node k.
    double weight_function(int k) const;

    /// int_0^1 F(x) dx, F given by its values at the nodes. The Jacobi weight
    /// is divided out, so F must carry any (1-x)^alpha factor itself.
    template <typename T>
    T integrate_plain(std::span<const T> values) const {
        T acc{};
        for (int k = 0; k < order(); ++k) acc += weights_[k] * values[k] / weight_function(k);
        return acc;
    }

    /// int_0^1 (1-x)^alpha x^beta p(x) dx.
    double integrate_weighted(const std::function<double(double)>& p) const;

    /// Polynomial interpolant of nodal samples evaluated at x.
    template <typename T>
    T interpolate(std::span<const T> values, double x) const;

    /// Spectral first-derivative matrix acting on nodal samples.
    Eigen::MatrixXd differentiation_matrix() const;

    bool same_nodes(const QuadratureRule& other) const;

    friend QuadratureRule gauss_jacobi(int order, double alpha, double beta);
    friend void from_json(const nlohmann::json& j, QuadratureRule& rule);

private:
    void build_barycentric();

    double alpha_ = 0.0;
    double beta_ = 0.0;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> bary_;
};

/// Gauss-Jacobi rule with `order` nodes for the weight (1-x)^alpha x^beta on [0,1].
QuadratureRule gauss_jacobi(int order, double alpha = 0.0, double beta = 0.0);

/// Node count for a truncation whose largest antiholomorphic power is `max_power`.
/// Sized so that resolvent solutions of basis products (polynomials of degree
/// max_power + 3 in x) and every tensor integrand are resolved exactly.
int radial_order_for_power(int max_power);

void to_json(nlohmann::json& j, const QuadratureRule& rule);
void from_json(const nlohmann::json& j, QuadratureRule& rule);

template <typename T>
T QuadratureRule::interpolate(std::span<const T> values, double x) const {
    T num{};
    double den = 0.0;
    for (int k = 0; k < order(); ++k) {
        const double diff = x - nodes_[k];
        if (diff == 0.0) return values[k];
        const double c = bary_[k] / diff;
        num += c * values[k];
        den += c;
    }
    return num / den;
}

}  // namespace wpc
