#include "wpc/hyperbolic_disk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace wpc {

double harnack_constant() { return std::sqrt(3.0 / (4.0 * kPi)); }

cplx BasisElement::operator()(cplx z) const {
    const double x = std::norm(z);
    const double s = (1.0 - x) * (1.0 - x);
    return s * amplitude * std::pow(std::conj(z), power);
}

double BasisElement::modulus(double x) const {
    return (1.0 - x) * (1.0 - x) * amplitude * std::pow(x, 0.5 * power);
}

BasisElement basis_element(int n) {
    if (n < 2) throw std::invalid_argument("basis_element: n must be >= 2, got " + std::to_string(n));
    const double nn = n;
    BasisElement e;
    e.n = n;
    e.power = n - 2;
    e.amplitude = 0.25 * std::sqrt((2.0 * nn * nn * nn - 2.0 * nn) / kPi);
    return e;
}

BasisElement basis_from_label(int label) {
    if (label < 1) throw std::invalid_argument("basis label must be >= 1, got " + std::to_string(label));
    return basis_element(label + 1);
}

BeltramiForm BeltramiForm::basis(int label, cplx coeff) {
    BeltramiForm f;
    f.add(label, coeff);
    return f;
}

BeltramiForm& BeltramiForm::add(int label, cplx coeff) {
    if (label < 1) throw std::invalid_argument("basis label must be >= 1, got " + std::to_string(label));
    coeffs_[label] += coeff;
    return *this;
}

int BeltramiForm::max_label() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }

cplx BeltramiForm::operator()(cplx z) const {
    cplx acc = 0.0;
    for (const auto& [label, a] : coeffs_) acc += a * basis_from_label(label)(z);
    return acc;
}

BeltramiForm& BeltramiForm::operator+=(const BeltramiForm& other) {
    for (const auto& [label, a] : other.coeffs_) coeffs_[label] += a;
    return *this;
}

BeltramiForm operator*(cplx s, BeltramiForm f) {
    for (auto& [label, a] : f.coeffs_) a *= s;
    return f;
}

cplx wp_inner(const BeltramiForm& mu, const BeltramiForm& nu, const QuadratureRule& rule) {
    cplx acc = 0.0;
    std::vector<double> vals(rule.order());
    for (const auto& [label, a] : mu.coefficients()) {
        auto it = nu.coefficients().find(label);
        if (it == nu.coefficients().end()) continue;
        const BasisElement e = basis_from_label(label);
        for (int k = 0; k < rule.order(); ++k) {
            const double x = rule.nodes()[k];
            vals[k] = (1.0 - x) * (1.0 - x) * std::pow(x, e.power);
        }
        const double radial = rule.integrate_plain<double>(vals);
        acc += a * std::conj(it->second) * 4.0 * kPi * e.amplitude * e.amplitude * radial;
    }
    return acc;
}

cplx wp_inner(const BeltramiForm& mu, const BeltramiForm& nu) {
    const int top = std::max(mu.max_label(), nu.max_label());
    const QuadratureRule rule = gauss_jacobi(radial_order_for_power(std::max(top - 1, 0)));
    return wp_inner(mu, nu, rule);
}

double wp_norm(const BeltramiForm& mu) { return std::sqrt(std::max(0.0, wp_inner(mu, mu).real())); }

namespace {

double modulus_at(const BeltramiForm& mu, double r, double theta) {
    return std::abs(mu(std::polar(r, theta)));
}

// Compass search in (r, theta) from a grid candidate.
double refine_maximum(const BeltramiForm& mu, double r, double theta, double dr, double dt) {
    double best = modulus_at(mu, r, theta);
    while (dr > 1e-14 || dt > 1e-14) {
        bool moved = false;
        const double cand[4][2] = {{r + dr, theta}, {r - dr, theta}, {r, theta + dt}, {r, theta - dt}};
        for (const auto& c : cand) {
            const double rr = std::clamp(c[0], 0.0, 1.0);
            const double v = modulus_at(mu, rr, c[1]);
            if (v > best) {
                best = v;
                r = rr;
                theta = c[1];
                moved = true;
                break;
            }
        }
        if (!moved) {
            dr *= 0.5;
            dt *= 0.5;
        }
    }
    return best;
}

}  // namespace

double sup_norm(const BeltramiForm& mu) {
    if (mu.empty()) throw std::invalid_argument("sup_norm: empty combination");
    if (mu.coefficients().size() == 1) {
        const auto& [label, a] = *mu.coefficients().begin();
        const BasisElement e = basis_from_label(label);
        const double x = static_cast<double>(e.power) / (e.power + 4.0);
        return std::abs(a) * e.modulus(x);
    }
    const int max_power = mu.max_label() - 1;
    const int nr = 200;
    const int nt = std::max(64, 16 * (max_power + 1));
    struct Cand {
        double value, r, theta;
    };
    std::vector<Cand> cands;
    cands.reserve(static_cast<std::size_t>(nr) * nt + 1);
    cands.push_back({modulus_at(mu, 0.0, 0.0), 0.0, 0.0});
    for (int a = 1; a < nr; ++a) {
        const double r = static_cast<double>(a) / nr;
        for (int b = 0; b < nt; ++b) {
            const double t = 2.0 * kPi * b / nt;
            cands.push_back({modulus_at(mu, r, t), r, t});
        }
    }
    const std::size_t keep = std::min<std::size_t>(12, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + keep, cands.end(),
                      [](const Cand& x, const Cand& y) { return x.value > y.value; });
    double best = 0.0;
    for (std::size_t c = 0; c < keep; ++c)
        best = std::max(best, refine_maximum(mu, cands[c].r, cands[c].theta, 1.0 / nr,
                                             2.0 * kPi / nt));
    return best;
}

SeparableFunction::SeparableFunction(std::shared_ptr<const QuadratureRule> rule)
    : rule_(std::move(rule)) {
    if (!rule_) throw std::invalid_argument("SeparableFunction: null quadrature rule");
}

SeparableFunction SeparableFunction::constant(std::shared_ptr<const QuadratureRule> rule, cplx value) {
    SeparableFunction f(std::move(rule));
    f.add_term({0, 0, std::vector<cplx>(f.rule().order(), value)});
    return f;
}

SeparableFunction SeparableFunction::from_profile(std::shared_ptr<const QuadratureRule> rule,
                                                  int mode, const std::function<cplx(double)>& g,
                                                  int decay) {
    SeparableFunction f(std::move(rule));
    SeparableTerm t{mode, decay, std::vector<cplx>(f.rule().order())};
    for (int k = 0; k < f.rule().order(); ++k) t.profile[k] = g(f.rule().nodes()[k]);
    f.add_term(t);
    return f;
}

SeparableFunction SeparableFunction::basis_product(std::shared_ptr<const QuadratureRule> rule,
                                                   int label_i, int label_j) {
    const BasisElement ei = basis_from_label(label_i);
    const BasisElement ej = basis_from_label(label_j);
    const double amp = ei.amplitude * ej.amplitude;
    const int low = std::min(ei.power, ej.power);
    return from_profile(
        std::move(rule), ej.power - ei.power,
        [&](double x) {
            const double s = (1.0 - x) * (1.0 - x);
            return cplx(amp * s * s * std::pow(x, low), 0.0);
        },
        4);
}

SeparableFunction SeparableFunction::modulus_squared(std::shared_ptr<const QuadratureRule> rule,
                                                     const BeltramiForm& mu) {
    SeparableFunction f(rule);
    for (const auto& [k, ak] : mu.coefficients())
        for (const auto& [l, al] : mu.coefficients())
            f += (ak * std::conj(al)) * basis_product(rule, k, l);
    return f;
}

std::vector<int> SeparableFunction::modes() const {
    std::vector<int> out;
    for (const auto& [m, t] : terms_) out.push_back(m);
    return out;
}

bool SeparableFunction::is_zero() const {
    for (const auto& [m, t] : terms_)
        for (const cplx& v : t.profile)
            if (v != cplx(0.0)) return false;
    return true;
}

void SeparableFunction::add_term(const SeparableTerm& term) {
    if (static_cast<int>(term.profile.size()) != rule_->order())
        throw std::invalid_argument("SeparableFunction: profile size does not match quadrature order");
    auto it = terms_.find(term.mode);
    if (it == terms_.end()) {
        terms_.emplace(term.mode, term);
        return;
    }
    it->second.decay = std::min(it->second.decay, term.decay);
    for (std::size_t k = 0; k < term.profile.size(); ++k) it->second.profile[k] += term.profile[k];
}

cplx SeparableFunction::profile_at(int mode, double x) const {
    auto it = terms_.find(mode);
    if (it == terms_.end()) return 0.0;
    return rule_->interpolate<cplx>(it->second.profile, x);
}

cplx SeparableFunction::operator()(cplx z) const {
    const double x = std::norm(z);
    cplx acc = 0.0;
    for (const auto& [m, t] : terms_) {
        const cplx g = rule_->interpolate<cplx>(t.profile, x);
        const cplx angular = m >= 0 ? std::pow(z, m) : std::pow(std::conj(z), -m);
        acc += angular * g;
    }
    return acc;
}

SeparableFunction SeparableFunction::conj() const {
    SeparableFunction f(rule_);
    for (const auto& [m, t] : terms_) {
        SeparableTerm c{-m, t.decay, t.profile};
        for (cplx& v : c.profile) v = std::conj(v);
        f.terms_.emplace(-m, std::move(c));
    }
    return f;
}

SeparableFunction& SeparableFunction::operator+=(const SeparableFunction& other) {
    if (!rule_->same_nodes(other.rule())) throw std::invalid_argument("SeparableFunction: rule mismatch");
    for (const auto& [m, t] : other.terms_) add_term(t);
    return *this;
}

SeparableFunction& SeparableFunction::operator*=(cplx s) {
    for (auto& [m, t] : terms_)
        for (cplx& v : t.profile) v *= s;
    return *this;
}

cplx integrate_product(const SeparableFunction& f, const SeparableFunction& h) {
    const QuadratureRule& rule = f.rule();
    if (!rule.same_nodes(h.rule())) throw std::invalid_argument("integrate_product: rule mismatch");
    cplx acc = 0.0;
    std::vector<cplx> vals(rule.order());
    for (const auto& [m, tf] : f.terms()) {
        auto it = h.terms().find(-m);
        if (it == h.terms().end()) continue;
        const SeparableTerm& th = it->second;
        if (tf.decay + th.decay < 2)
            throw std::domain_error("integrate_product: integrand not integrable against dA (mode " +
                                    std::to_string(m) + ")");
        const int am = std::abs(m);
        for (int k = 0; k < rule.order(); ++k) {
            const double x = rule.nodes()[k];
            vals[k] = std::pow(x, am) * tf.profile[k] * th.profile[k] / ((1.0 - x) * (1.0 - x));
        }
        acc += 4.0 * kPi * rule.integrate_plain<cplx>(vals);
    }
    return acc;
}

cplx l2_inner(const SeparableFunction& f, const SeparableFunction& h) {
    return integrate_product(f, h.conj());
}

double hyperbolic_distance(cplx z, cplx w) {
    const double ratio = std::abs(z - w) / std::abs(1.0 - std::conj(z) * w);
    return 2.0 * std::atanh(ratio);
}

std::vector<cplx> polar_grid(int nr, int ntheta, double margin) {
    std::vector<cplx> pts;
    pts.reserve(static_cast<std::size_t>(nr) * ntheta);
    for (int a = 0; a < nr; ++a) {
        const double x = (1.0 - margin) * (a + 1.0) / nr;
        const double r = std::sqrt(x);
        for (int b = 0; b < ntheta; ++b) pts.push_back(std::polar(r, 2.0 * kPi * (b + 0.5) / ntheta));
    }
    return pts;
}

}  // namespace wpc
