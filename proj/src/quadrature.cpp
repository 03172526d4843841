#include "wpc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wpc {

namespace {

struct JacobiValue {
    double p;      // P_n^{(a,b)}(t)
    double p_prev; // P_{n-1}^{(a,b)}(t)
};

// Three-term recurrence for Jacobi polynomials on [-1,1].
JacobiValue jacobi_eval(int n, double a, double b, double t) {
    double p0 = 1.0;
    if (n == 0) return {p0, 0.0};
    double p1 = 0.5 * (a - b + (a + b + 2.0) * t);
    for (int k = 2; k <= n; ++k) {
        const double s = 2.0 * k + a + b;
        const double c1 = 2.0 * k * (k + a + b) * (s - 2.0);
        const double c2 = (s - 1.0) * (s * (s - 2.0) * t + a * a - b * b);
        const double c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
        const double p2 = (c2 * p1 - c3 * p0) / c1;
        p0 = p1;
        p1 = p2;
    }
    return {p1, p0};
}

// d/dt P_n from (2n+a+b)(1-t^2) P_n' = n[(a-b) - (2n+a+b) t] P_n + 2(n+a)(n+b) P_{n-1}.
double jacobi_derivative(int n, double a, double b, double t, const JacobiValue& v) {
    const double s = 2.0 * n + a + b;
    return (n * ((a - b) - s * t) * v.p + 2.0 * (n + a) * (n + b) * v.p_prev) /
           (s * (1.0 - t * t));
}

}  // namespace

double QuadratureRule::weight_function(int k) const {
    const double x = nodes_[k];
    double w = 1.0;
    if (alpha_ != 0.0) w *= std::pow(1.0 - x, alpha_);
    if (beta_ != 0.0) w *= std::pow(x, beta_);
    return w;
}

double QuadratureRule::integrate_weighted(const std::function<double(double)>& p) const {
    double acc = 0.0;
    for (int k = 0; k < order(); ++k) acc += weights_[k] * p(nodes_[k]);
    return acc;
}

Eigen::MatrixXd QuadratureRule::differentiation_matrix() const {
    const int n = order();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double diag = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            d(i, j) = (bary_[j] / bary_[i]) / (nodes_[i] - nodes_[j]);
            diag -= d(i, j);
        }
        d(i, i) = diag;
    }
    return d;
}

bool QuadratureRule::same_nodes(const QuadratureRule& other) const {
    return alpha_ == other.alpha_ && beta_ == other.beta_ && nodes_ == other.nodes_;
}

void QuadratureRule::build_barycentric() {
    const int n = order();
    bary_.assign(n, 1.0);
    // Factor 4 keeps the products O(1) on an interval of length one.
    for (int j = 0; j < n; ++j) {
        double prod = 1.0;
        for (int k = 0; k < n; ++k)
            if (k != j) prod *= 4.0 * (nodes_[j] - nodes_[k]);
        bary_[j] = 1.0 / prod;
    }
    double scale = 0.0;
    for (double w : bary_) scale = std::max(scale, std::abs(w));
    for (double& w : bary_) w /= scale;
}

QuadratureRule gauss_jacobi(int order, double alpha, double beta) {
    if (order < 1) throw std::invalid_argument("gauss_jacobi: order must be >= 1");
    if (!(alpha > -1.0) || !(beta > -1.0))
        throw std::invalid_argument("gauss_jacobi: alpha and beta must exceed -1");

    // On t in [-1,1] the weight (1-x)^alpha x^beta becomes (1-t)^a (1+t)^b with a = alpha, b = beta.
    const double a = alpha;
    const double b = beta;
    const int n = order;

    Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        const double s = 2.0 * k + a + b;
        double diag;
        if (k == 0)
            diag = (b - a) / (a + b + 2.0);
        else
            diag = (b * b - a * a) / (s * (s + 2.0));
        jm(k, k) = diag;
        if (k + 1 < n) {
            const double kk = k + 1.0;
            const double s1 = 2.0 * kk + a + b;
            const double off = std::sqrt(4.0 * kk * (kk + a) * (kk + b) * (kk + a + b) /
                                         (s1 * s1 * (s1 + 1.0) * (s1 - 1.0)));
            jm(k, k + 1) = off;
            jm(k + 1, k) = off;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("gauss_jacobi: eigensolver failed");

    const double log_const = std::lgamma(n + a + 1.0) + std::lgamma(n + b + 1.0) -
                             std::lgamma(n + a + b + 1.0) - std::lgamma(n + 1.0) +
                             (a + b + 1.0) * std::log(2.0);

    QuadratureRule rule;
    rule.alpha_ = alpha;
    rule.beta_ = beta;
    rule.nodes_.resize(n);
    rule.weights_.resize(n);
    for (int k = 0; k < n; ++k) {
        double t = es.eigenvalues()(k);
        for (int it = 0; it < 8; ++it) {
            const JacobiValue v = jacobi_eval(n, a, b, t);
            const double dp = jacobi_derivative(n, a, b, t, v);
            const double step = v.p / dp;
            t -= step;
            if (std::abs(step) < 1e-17) break;
        }
        const JacobiValue v = jacobi_eval(n, a, b, t);
        const double dp = jacobi_derivative(n, a, b, t, v);
        const double w_t = std::exp(log_const) / ((1.0 - t * t) * dp * dp);
        rule.nodes_[k] = 0.5 * (1.0 + t);
        rule.weights_[k] = w_t * std::pow(0.5, a + b + 1.0);
    }
    rule.build_barycentric();
    return rule;
}

int radial_order_for_power(int max_power) {
    if (max_power < 0) throw std::invalid_argument("radial_order_for_power: negative power");
    return std::max(32, 2 * max_power + 16);
}

void to_json(nlohmann::json& j, const QuadratureRule& rule) {
    j = nlohmann::json{{"family", "gauss-jacobi"},
                       {"order", rule.order()},
                       {"alpha", rule.alpha()},
                       {"beta", rule.beta()},
                       {"exact_degree", rule.exact_degree()},
                       {"nodes", rule.nodes()},
                       {"weights", rule.weights()}};
}

void from_json(const nlohmann::json& j, QuadratureRule& rule) {
    rule.alpha_ = j.at("alpha").get<double>();
    rule.beta_ = j.at("beta").get<double>();
    rule.nodes_ = j.at("nodes").get<std::vector<double>>();
    rule.weights_ = j.at("weights").get<std::vector<double>>();
    if (rule.nodes_.size() != rule.weights_.size() || rule.nodes_.empty())
        throw std::invalid_argument("quadrature rule: nodes/weights size mismatch");
    if (j.contains("order") && j.at("order").get<int>() != rule.order())
        throw std::invalid_argument("quadrature rule: order does not match node count");
    rule.build_barycentric();
}

}  // namespace wpc
