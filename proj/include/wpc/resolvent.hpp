/**
 * @file resolvent.hpp
 * @brief The resolvent D = -2 (Delta_rho - 2)^{-1} on the Poincare disk.
 *
 * Two independent routes are provided:
 *  - Resolvent: per-mode spectral collocation of the radial equation
 *        (1-x)^2 [x v'' + (|m|+1) v'] - 2 v = -2 g
 *    for the reduced profile v (u = e^{i m theta} r^{|m|} v(x)).
 *  - KernelResolvent: direct quadrature of int G(z,w) f(w) dA(w) with the
 *    point-pair invariant Green kernel.
 */
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpc/hyperbolic_disk.hpp"

namespace wpc {

enum class ResolventRoute { Collocation, Kernel };

std::string to_string(ResolventRoute route);
ResolventRoute route_from_string(const std::string& name);

struct SolverConfig {
    double tolerance = 1e-9;
    ResolventRoute route = ResolventRoute::Collocation;
    /// Radial rule order for tensor work; 0 picks it from the largest label.
    int quadrature_order = 0;
};

/// Metadata of one per-mode solve.
struct ResolventSolve {
    int mode = 0;
    int order = 0;
    int decay_in = 0;
    int decay_out = 0;
    double residual = 0.0;
    double tail = 0.0;
    double tolerance = 0.0;
    std::string route;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

class Resolvent {
public:
    explicit Resolvent(std::shared_ptr<const QuadratureRule> rule, SolverConfig config = {});

    const SolverConfig& config() const { return config_; }
    const QuadratureRule& rule() const { return *rule_; }
    std::shared_ptr<const QuadratureRule> rule_ptr() const { return rule_; }

    /// D(f), mode by mode. Appends per-mode metadata to `log` when given.
    SeparableFunction apply(const SeparableFunction& f,
                            std::vector<ResolventSolve>* log = nullptr) const;

    /// Reduced profile of D applied to one mode.
    std::vector<cplx> solve_mode(int mode, const std::vector<cplx>& g, int decay,
                                 ResolventSolve* info = nullptr) const;

private:
    std::shared_ptr<const QuadratureRule> rule_;
    SolverConfig config_;
    Eigen::MatrixXd d1_;
    Eigen::MatrixXd d2_;
    Eigen::MatrixXd legendre_;  // nodal values -> Legendre coefficients
};

/// Green kernel of D as a function of hyperbolic distance:
///   G = c * Q_1(cosh d), Q_1 the Legendre function of the second kind.
/// The constant c is fixed numerically by requiring unit hyperbolic mass.
class GreenKernel {
public:
    GreenKernel();

    double normalization() const { return normalization_; }
    /// G at hyperbolic distance d > 0.
    double operator()(double d) const;
    /// G in the variable y = tanh^2(d / 2) in (0, 1).
    double from_y(double y) const;
    /// G(y) * 2 / (1 - y)^2, the kernel times the area density in geodesic
    /// polar coordinates (dA = 2 dy dphi / (1 - y)^2). `one_minus_y` is passed
    /// separately to keep precision near the boundary.
    double area_density(double y, double one_minus_y) const;

    /// int G(z, w) dA(w), evaluated by quadrature centred at z.
    double unit_mass(cplx z) const;

    /// Q_1(t) for t = (1 + y) / (1 - y).
    static double legendre_q1_from_y(double y, double one_minus_y);
    static double legendre_q1(double t);

private:
    double normalization_ = 0.0;
};

/// D by quadrature against the Green kernel. Slow; used to cross-check the
/// collocation route.
class KernelResolvent {
public:
    explicit KernelResolvent(double tolerance = 1e-11);

    const GreenKernel& kernel() const { return kernel_; }

    /// D(f)(z) at a single point.
    cplx apply_at(const SeparableFunction& f, cplx z) const;
    /// Values D(f)(sqrt(x_k)) on the radial nodes of f's rule, for one mode.
    std::vector<cplx> radial_values(const SeparableFunction& f, int mode) const;
    /// D(f) assembled mode by mode from radial_values.
    SeparableFunction apply(const SeparableFunction& f) const;

private:
    GreenKernel kernel_;
    double tolerance_;
};

struct ContractionCheck {
    double lhs = 0.0;  // Re int D(f) conj(f) dA
    double rhs = 0.0;  // int |f|^2 dA
    double imag_residue = 0.0;
    bool pass = false;
};

/// int D(f) conj(f) dA <= int |f|^2 dA together with positivity of the left side.
ContractionCheck check_contraction(const Resolvent& d, const SeparableFunction& f);

struct LowerBoundCheck {
    double worst_ratio = 0.0;
    bool vacuous = false;
    bool pass = false;
};

/// min over grid of D(|mu|^2) / max(|mu|^2, 1e-14); must stay above 1/3.
LowerBoundCheck check_lower_bound(const Resolvent& d, const BeltramiForm& mu,
                                  const std::vector<cplx>& grid);

}  // namespace wpc
