#include "wpc/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace wpc {

std::string to_string(ResolventRoute route) {
    return route == ResolventRoute::Collocation ? "collocation" : "kernel";
}

ResolventRoute route_from_string(const std::string& name) {
    if (name == "collocation") return ResolventRoute::Collocation;
    if (name == "kernel") return ResolventRoute::Kernel;
    throw std::invalid_argument("unknown resolvent route '" + name + "' (expected collocation or kernel)");
}

namespace {

Eigen::MatrixXd legendre_vandermonde(const QuadratureRule& rule) {
    const int n = rule.order();
    Eigen::MatrixXd v(n, n);
    for (int k = 0; k < n; ++k) {
        const double t = 2.0 * rule.nodes()[k] - 1.0;
        double p0 = 1.0, p1 = t;
        v(k, 0) = 1.0;
        if (n > 1) v(k, 1) = t;
        for (int d = 2; d < n; ++d) {
            const double p2 = ((2.0 * d - 1.0) * t * p1 - (d - 1.0) * p0) / d;
            v(k, d) = p2;
            p0 = p1;
            p1 = p2;
        }
    }
    return v;
}

double spectral_tail(const Eigen::MatrixXd& to_legendre, const Eigen::VectorXd& values) {
    const Eigen::VectorXd c = to_legendre * values;
    const double scale = c.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    const int n = static_cast<int>(c.size());
    const int tail_len = std::min(3, n);
    return c.tail(tail_len).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

Resolvent::Resolvent(std::shared_ptr<const QuadratureRule> rule, SolverConfig config)
    : rule_(std::move(rule)), config_(config) {
    if (!rule_) throw std::invalid_argument("Resolvent: null quadrature rule");
    if (!(config_.tolerance > 0.0)) throw std::invalid_argument("Resolvent: tolerance must be > 0");
    d1_ = rule_->differentiation_matrix();
    d2_ = d1_ * d1_;
    legendre_ = legendre_vandermonde(*rule_).partialPivLu().inverse();
}

std::vector<cplx> Resolvent::solve_mode(int mode, const std::vector<cplx>& g, int decay,
                                        ResolventSolve* info) const {
    const int n = rule_->order();
    if (static_cast<int>(g.size()) != n) throw std::invalid_argument("Resolvent: profile size mismatch");
    Eigen::VectorXd gr(n), gi(n);
    for (int k = 0; k < n; ++k) {
        if (!std::isfinite(g[k].real()) || !std::isfinite(g[k].imag()))
            throw std::domain_error("Resolvent: non-finite profile sample at node " + std::to_string(k) +
                                    " (mode " + std::to_string(mode) + ")");
        gr(k) = g[k].real();
        gi(k) = g[k].imag();
    }

    ResolventSolve meta;
    meta.mode = mode;
    meta.order = n;
    meta.decay_in = decay;
    meta.decay_out = std::min(decay, 2);
    meta.tolerance = config_.tolerance;
    meta.route = to_string(ResolventRoute::Collocation);

    std::vector<cplx> out(n, 0.0);
    const double scale = std::max(gr.cwiseAbs().maxCoeff(), gi.cwiseAbs().maxCoeff());
    if (scale == 0.0) {
        if (info) *info = meta;
        return out;
    }

    const int am = std::abs(mode);
    Eigen::MatrixXd a(n, n);
    for (int k = 0; k < n; ++k) {
        const double x = rule_->nodes()[k];
        const double s = (1.0 - x) * (1.0 - x);
        a.row(k) = s * x * d2_.row(k) + s * (am + 1.0) * d1_.row(k);
        a(k, k) -= 2.0;
    }
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    Eigen::MatrixXd rhs(n, 2);
    rhs.col(0) = -2.0 * gr;
    rhs.col(1) = -2.0 * gi;
    const Eigen::MatrixXd v = lu.solve(rhs);

    const double residual = (a * v - rhs).cwiseAbs().maxCoeff() / (2.0 * scale);
    const double tail = std::max(spectral_tail(legendre_, v.col(0)), spectral_tail(legendre_, v.col(1)));
    meta.residual = residual;
    meta.tail = tail;
    if (info) *info = meta;
    if (!std::isfinite(residual) || residual > config_.tolerance || !(tail <= config_.tolerance))
        throw SolverError("resolvent collocation did not converge for mode " + std::to_string(mode) +
                              ": residual " + std::to_string(residual) + ", spectral tail " +
                              std::to_string(tail) + " (tolerance " +
                              std::to_string(config_.tolerance) + ")",
                          std::isfinite(residual) ? std::max(residual, tail) : residual);
    for (int k = 0; k < n; ++k) out[k] = cplx(v(k, 0), v(k, 1));
    return out;
}

SeparableFunction Resolvent::apply(const SeparableFunction& f, std::vector<ResolventSolve>* log) const {
    if (!rule_->same_nodes(f.rule())) throw std::invalid_argument("Resolvent: rule mismatch");
    if (config_.route == ResolventRoute::Kernel) {
        if (log)
            for (const auto& [m, t] : f.terms()) {
                ResolventSolve meta;
                meta.mode = m;
                meta.order = rule_->order();
                meta.decay_in = t.decay;
                meta.decay_out = std::min(t.decay, 2);
                meta.tolerance = config_.tolerance;
                meta.route = to_string(ResolventRoute::Kernel);
                log->push_back(meta);
            }
        return KernelResolvent(std::min(config_.tolerance, 1e-10)).apply(f);
    }
    SeparableFunction out(rule_);
    for (const auto& [m, t] : f.terms()) {
        if (t.decay < 0) throw std::domain_error("Resolvent: negative decay order");
        ResolventSolve meta;
        SeparableTerm term{m, std::min(t.decay, 2), solve_mode(m, t.profile, t.decay, &meta)};
        if (log) log->push_back(meta);
        out.add_term(term);
    }
    return out;
}

double GreenKernel::legendre_q1_from_y(double y, double one_minus_y) {
    if (y <= 1.0 / 3.0) return -(1.0 + y) * std::log(y) / (2.0 * one_minus_y) - 1.0;
    const double u = one_minus_y / (1.0 + y);
    const double u2 = u * u;
    double term = u2, acc = 0.0;
    for (int k = 1; k < 200 && term > 1e-18 * acc; ++k) {
        acc += term / (2.0 * k + 1.0);
        term *= u2;
    }
    return acc;
}

double GreenKernel::legendre_q1(double t) {
    if (!(t > 1.0)) throw std::domain_error("legendre_q1: argument must exceed 1");
    const double y = (t - 1.0) / (t + 1.0);
    return legendre_q1_from_y(y, 2.0 / (t + 1.0));
}

namespace {

// Q_1(y) * 2 / (1 - y)^2 with the boundary factor cancelled analytically.
double q1_area_density(double y, double one_minus_y) {
    if (y <= 1.0 / 3.0)
        return GreenKernel::legendre_q1_from_y(y, one_minus_y) * 2.0 / (one_minus_y * one_minus_y);
    const double u = one_minus_y / (1.0 + y);
    const double u2 = u * u;
    double term = 1.0, acc = 0.0;
    for (int k = 1; k < 200 && term > 1e-18 * acc; ++k) {
        acc += term / (2.0 * k + 1.0);
        term *= u2;
    }
    return 2.0 * acc / ((1.0 + y) * (1.0 + y));
}

}  // namespace

GreenKernel::GreenKernel() {
    boost::math::quadrature::tanh_sinh<double> ts;
    const double mass_unscaled = ts.integrate(
        [](double y, double yc) { return q1_area_density(y, y > 0.5 ? yc : 1.0 - y); }, 0.0, 1.0,
        1e-14);
    normalization_ = 1.0 / (2.0 * kPi * mass_unscaled);
}

double GreenKernel::from_y(double y) const {
    if (!(y > 0.0)) throw std::domain_error("GreenKernel: singular at zero distance");
    return normalization_ * legendre_q1_from_y(y, 1.0 - y);
}

double GreenKernel::operator()(double d) const {
    if (!(d > 0.0)) throw std::domain_error("GreenKernel: singular at zero distance");
    const double th = std::tanh(0.5 * d);
    const double ch = std::cosh(0.5 * d);
    const double y = th * th;
    if (y <= 1.0 / 3.0) {
        const double log_y = 2.0 * std::log(th);
        return normalization_ * (-(1.0 + y) * log_y * (ch * ch) / 2.0 - 1.0);
    }
    return normalization_ * legendre_q1_from_y(y, 1.0 / (ch * ch));
}

double GreenKernel::area_density(double y, double one_minus_y) const {
    return normalization_ * q1_area_density(y, one_minus_y);
}

double GreenKernel::unit_mass(cplx) const {
    // In geodesic polar coordinates dA = sinh(d) dd dphi.
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    const auto integrand = [this](double d) {
        if (d <= 0.0) return 0.0;
        if (d < 20.0) return 2.0 * kPi * (*this)(d) * std::sinh(d);
        // Q_1(cosh d) sinh d = tanh(d) u sum_k u^{2k-2} / (2k+1), u = 1 / cosh d
        const double u = 1.0 / std::cosh(d);
        const double series = 1.0 / 3.0 + u * u / 5.0 + u * u * u * u / 7.0;
        return 2.0 * kPi * normalization_ * std::tanh(d) * u * series;
    };
    const double inner = ts.integrate(integrand, 0.0, 1.0, 1e-13);
    const double outer = es.integrate([&](double t) { return integrand(1.0 + t); }, 0.0,
                                      std::numeric_limits<double>::infinity(), 1e-13);
    return inner + outer;
}

KernelResolvent::KernelResolvent(double tolerance) : tolerance_(tolerance) {
    if (!(tolerance > 0.0)) throw std::invalid_argument("KernelResolvent: tolerance must be > 0");
}

namespace {

// Value of the real or imaginary part of a single-mode term at w.
double term_value(const QuadratureRule& rule, const std::vector<double>& profile, int mode, cplx w,
                  double x_w) {
    const double g = rule.interpolate<double>(profile, x_w);
    const cplx angular = mode >= 0 ? std::pow(w, mode) : std::pow(std::conj(w), -mode);
    return (angular * g).real();
}

// D of one real-profile mode evaluated at the real point r.
double kernel_apply_real(const GreenKernel& kernel, const QuadratureRule& rule,
                         const std::vector<double>& profile, int mode, double r, double tol) {
    const double td0 = 2.0 * r / (1.0 + r * r);
    const double one_minus_r2 = 1.0 - r * r;

    const auto angular = [&](double y, double one_minus_y) {
        const double sy = std::sqrt(y);
        const double ts = 2.0 * sy / (1.0 + y);
        const double eps = ts * td0;
        const double lam = std::sqrt((1.0 - eps) / (1.0 + eps));
        double prev = 0.0;
        for (int npts = 16;; npts *= 2) {
            double acc = 0.0;
            for (int j = 0; j < npts; ++j) {
                const double sigma = -kPi + 2.0 * kPi * (j + 0.5) / npts;
                const double hs = 0.5 * sigma;
                const double phi = kPi + 2.0 * std::atan(lam * std::tan(hs));
                const double c = std::cos(hs), s = std::sin(hs);
                const double jac = lam / (c * c + lam * lam * s * s);
                const cplx zeta = std::polar(sy, phi);
                const cplx den = 1.0 + r * zeta;
                const cplx w = (zeta + r) / den;
                const double one_minus_xw = one_minus_r2 * one_minus_y / std::norm(den);
                acc += jac * term_value(rule, profile, mode, w, 1.0 - one_minus_xw);
            }
            acc *= 2.0 * kPi / npts;
            if (npts >= 32 && std::abs(acc - prev) <= 1e-13 * (std::abs(acc) + 1e-300)) return acc;
            if (npts >= 8192) return acc;
            prev = acc;
        }
    };

    const auto radial = [&](double y, double yc) {
        const double omy = y > 0.5 ? yc : 1.0 - y;
        if (y <= 0.0 || omy <= 0.0) return 0.0;
        return kernel.area_density(y, omy) * angular(y, omy);
    };

    boost::math::quadrature::tanh_sinh<double> ts;
    // Inner annulus around the logarithmic singularity integrated separately.
    const double y_split = 0.0625;
    const double near = ts.integrate([&](double y) { return radial(y, 1.0 - y); }, 0.0, y_split, tol);
    const double far = ts.integrate(
        [&](double y, double yc) {
            const double omy = y > 0.5 * (1.0 + y_split) ? yc : 1.0 - y;
            return radial(y, omy > 0.0 ? omy : 1.0 - y);
        },
        y_split, 1.0, tol);
    return near + far;
}

}  // namespace

std::vector<cplx> KernelResolvent::radial_values(const SeparableFunction& f, int mode) const {
    const QuadratureRule& rule = f.rule();
    std::vector<cplx> out(rule.order(), 0.0);
    auto it = f.terms().find(mode);
    if (it == f.terms().end()) return out;
    std::vector<double> re(rule.order()), im(rule.order());
    bool has_re = false, has_im = false;
    for (int k = 0; k < rule.order(); ++k) {
        re[k] = it->second.profile[k].real();
        im[k] = it->second.profile[k].imag();
        has_re = has_re || re[k] != 0.0;
        has_im = has_im || im[k] != 0.0;
    }
    for (int k = 0; k < rule.order(); ++k) {
        const double r = std::sqrt(rule.nodes()[k]);
        const double vr = has_re ? kernel_apply_real(kernel_, rule, re, mode, r, tolerance_) : 0.0;
        const double vi = has_im ? kernel_apply_real(kernel_, rule, im, mode, r, tolerance_) : 0.0;
        out[k] = cplx(vr, vi);
    }
    return out;
}

cplx KernelResolvent::apply_at(const SeparableFunction& f, cplx z) const {
    const double r = std::abs(z);
    const double theta = std::arg(z);
    const QuadratureRule& rule = f.rule();
    cplx acc = 0.0;
    for (const auto& [m, t] : f.terms()) {
        std::vector<double> re(rule.order()), im(rule.order());
        for (int k = 0; k < rule.order(); ++k) {
            re[k] = t.profile[k].real();
            im[k] = t.profile[k].imag();
        }
        const cplx v(kernel_apply_real(kernel_, rule, re, m, r, tolerance_),
                     kernel_apply_real(kernel_, rule, im, m, r, tolerance_));
        acc += std::polar(1.0, m * theta) * v;
    }
    return acc;
}

SeparableFunction KernelResolvent::apply(const SeparableFunction& f) const {
    SeparableFunction out(f.rule_ptr());
    const QuadratureRule& rule = f.rule();
    for (const auto& [m, t] : f.terms()) {
        std::vector<cplx> vals = radial_values(f, m);
        const int am = std::abs(m);
        for (int k = 0; k < rule.order(); ++k) vals[k] /= std::pow(std::sqrt(rule.nodes()[k]), am);
        out.add_term({m, std::min(t.decay, 2), std::move(vals)});
    }
    return out;
}

ContractionCheck check_contraction(const Resolvent& d, const SeparableFunction& f) {
    ContractionCheck out;
    if (f.is_zero()) {
        out.pass = true;
        return out;
    }
    const cplx lhs = l2_inner(d.apply(f), f);
    out.lhs = lhs.real();
    out.imag_residue = std::abs(lhs.imag());
    out.rhs = l2_inner(f, f).real();
    out.pass = out.lhs >= -1e-9 && out.lhs <= out.rhs + 1e-9;
    return out;
}

LowerBoundCheck check_lower_bound(const Resolvent& d, const BeltramiForm& mu,
                                  const std::vector<cplx>& grid) {
    LowerBoundCheck out;
    bool nonzero = false;
    for (const auto& [label, a] : mu.coefficients()) nonzero = nonzero || a != cplx(0.0);
    if (!nonzero) {
        out.vacuous = true;
        out.pass = true;
        return out;
    }
    const SeparableFunction s = SeparableFunction::modulus_squared(d.rule_ptr(), mu);
    const SeparableFunction u = d.apply(s);
    out.worst_ratio = std::numeric_limits<double>::infinity();
    out.pass = true;
    for (const cplx& z : grid) {
        const double sv = s(z).real();
        const double uv = u(z).real();
        out.worst_ratio = std::min(out.worst_ratio, uv / std::max(sv, 1e-14));
        if (uv < sv / 3.0 - 1e-8) out.pass = false;
    }
    return out;
}

}  // namespace wpc
