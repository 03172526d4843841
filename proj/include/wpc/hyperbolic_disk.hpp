/**
 * @file hyperbolic_disk.hpp
 * @brief Poincare disk geometry, the orthonormal harmonic Beltrami basis and
 *        separable (mode-by-mode) functions on the disk.
 *
 * Conventions: dA = rho |dz|^2 with rho = 4 / (1 - |z|^2)^2, and x = |z|^2.
 * Basis elements are addressed either by n >= 2 (power of zbar is n - 2) or by
 * tensor label i = n - 1 >= 1 (power i - 1).
 */
#pragma once

#include <complex>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "wpc/quadrature.hpp"

namespace wpc {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// sqrt(3 / (4 pi)): sup |mu| over unit-norm harmonic Beltrami differentials.
double harnack_constant();

struct BasisElement {
    int n = 2;
    int power = 0;
    double amplitude = 0.0;

    int label() const { return n - 1; }
    /// (1 - |z|^2)^2 * amplitude * zbar^power
    cplx operator()(cplx z) const;
    /// |mu(z)| as a function of x = |z|^2
    double modulus(double x) const;
};

BasisElement basis_element(int n);
BasisElement basis_from_label(int label);

/// Finite combination sum_k a_k mu_k, keyed by tensor label.
class BeltramiForm {
public:
    BeltramiForm() = default;
    static BeltramiForm basis(int label, cplx coeff = 1.0);

    BeltramiForm& add(int label, cplx coeff);
    const std::map<int, cplx>& coefficients() const { return coeffs_; }
    bool empty() const { return coeffs_.empty(); }
    int max_label() const;

    cplx operator()(cplx z) const;

    BeltramiForm& operator+=(const BeltramiForm& other);
    friend BeltramiForm operator*(cplx s, BeltramiForm f);
    friend BeltramiForm operator+(BeltramiForm a, const BeltramiForm& b) { return a += b; }

private:
    std::map<int, cplx> coeffs_;
};

/// Petersson pairing int mu conj(nu) dA. Distinct powers are orthogonal by the
/// angular integral; equal powers use the radial rule.
cplx wp_inner(const BeltramiForm& mu, const BeltramiForm& nu, const QuadratureRule& rule);
cplx wp_inner(const BeltramiForm& mu, const BeltramiForm& nu);
double wp_norm(const BeltramiForm& mu);

/// sup over the disk of |mu(z)|.
double sup_norm(const BeltramiForm& mu);

/// One angular mode of a separable function:
///   f(z) = e^{i m theta} r^{|m|} g(x), g sampled at the rule's nodes.
/// `decay` records q with g ~ (1 - x)^q near the boundary.
struct SeparableTerm {
    int mode = 0;
    int decay = 0;
    std::vector<cplx> profile;
};

class SeparableFunction {
public:
    explicit SeparableFunction(std::shared_ptr<const QuadratureRule> rule);

    static SeparableFunction constant(std::shared_ptr<const QuadratureRule> rule, cplx value);
    static SeparableFunction from_profile(std::shared_ptr<const QuadratureRule> rule, int mode,
                                          const std::function<cplx(double)>& g, int decay);
    /// mu_i * conj(mu_j): single mode p_j - p_i.
    static SeparableFunction basis_product(std::shared_ptr<const QuadratureRule> rule, int label_i,
                                           int label_j);
    /// sum_{k,l} a_k conj(a_l) mu_k conj(mu_l)
    static SeparableFunction modulus_squared(std::shared_ptr<const QuadratureRule> rule,
                                             const BeltramiForm& mu);

    const QuadratureRule& rule() const { return *rule_; }
    std::shared_ptr<const QuadratureRule> rule_ptr() const { return rule_; }
    const std::map<int, SeparableTerm>& terms() const { return terms_; }
    std::vector<int> modes() const;
    bool is_zero() const;

    /// Adds into the term of the same mode, creating it if needed.
    void add_term(const SeparableTerm& term);

    cplx operator()(cplx z) const;
    /// Reduced profile g of `mode` at arbitrary x (0 if the mode is absent).
    cplx profile_at(int mode, double x) const;

    SeparableFunction conj() const;
    SeparableFunction& operator+=(const SeparableFunction& other);
    SeparableFunction& operator*=(cplx s);
    friend SeparableFunction operator*(cplx s, SeparableFunction f) { return f *= s; }
    friend SeparableFunction operator+(SeparableFunction a, const SeparableFunction& b) {
        return a += b;
    }

private:
    std::shared_ptr<const QuadratureRule> rule_;
    std::map<int, SeparableTerm> terms_;
};

/// int f h dA; only pairs of modes m, -m survive the angular integral.
cplx integrate_product(const SeparableFunction& f, const SeparableFunction& h);
/// int f conj(h) dA
cplx l2_inner(const SeparableFunction& f, const SeparableFunction& h);

/// Hyperbolic distance between two points of the disk.
double hyperbolic_distance(cplx z, cplx w);

/// Points r e^{i theta} on a polar grid: nr radii with r^2 uniform in (0, 1 - margin].
std::vector<cplx> polar_grid(int nr, int ntheta, double margin = 0.02);

}  // namespace wpc
