#include "wpc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "wpc/parallel.hpp"

namespace wpc::oracle {

namespace {

using cplx = std::complex<double>;
constexpr double kPiLocal = 3.14159265358979323846;

}  // namespace

RationalValue beta_integral_exact(int m) {
    if (m < 1) throw std::invalid_argument("beta_integral_exact: m must be >= 1");
    boost::multiprecision::cpp_int den = 1;
    for (int k = 1; k <= 7; ++k) den *= m + k;
    return RationalValue(720, den);
}

RationalValue beta_lower_bound(int m) {
    if (m < 1) throw std::invalid_argument("beta_lower_bound: m must be >= 1");
    boost::multiprecision::cpp_int den = boost::multiprecision::cpp_int(1) << 17;
    for (int k = 0; k < 7; ++k) den *= m;
    return RationalValue(45, den);
}

BetaSuite beta_suite(int m_max) {
    if (m_max < 1) throw std::invalid_argument("beta_suite: m_max must be >= 1");
    BetaSuite s;
    s.m_max = m_max;
    for (int m = 1; m <= m_max; ++m)
        if (beta_integral_exact(m) < beta_lower_bound(m)) {
            s.first_failure = m;
            break;
        }
    s.pass = s.first_failure == 0;
    return s;
}

// ---------------------------------------------------------------- finite differences

double FdSolution::at_distance(double s_query) const {
    const int last = static_cast<int>(s.size()) - 1;
    if (s_query <= 0.0) return u.front();
    if (s_query >= s.back()) return 0.0;
    int j = static_cast<int>(s_query / step);
    int lo = std::clamp(j - 1, 0, last - 3);
    double acc = 0.0;
    for (int a = lo; a < lo + 4; ++a) {
        double w = 1.0;
        for (int b = lo; b < lo + 4; ++b)
            if (b != a) w *= (s_query - s[b]) / (s[a] - s[b]);
        acc += w * u[a];
    }
    return acc;
}

double FdSolution::at_radius(double r) const {
    if (r < 0.0 || r >= 1.0) throw std::out_of_range("FdSolution: radius outside [0, 1)");
    return at_distance(2.0 * std::atanh(r));
}

FdSolution fd_resolvent(const std::function<double(double)>& f, int mode, int cells, double s_max) {
    if (cells < 64) throw std::invalid_argument("fd_resolvent: grid needs at least 64 cells");
    if (!(s_max > 0.0)) throw std::invalid_argument("fd_resolvent: s_max must be positive");
    const int n = cells;
    const double h = s_max / n;
    const double m2 = static_cast<double>(mode) * mode;
    FdSolution out;
    out.mode = mode;
    out.step = h;
    out.s.resize(n + 1);
    for (int j = 0; j <= n; ++j) out.s[j] = j * h;

    // tridiagonal rows for unknowns u_0 .. u_{n-1}; u_n = 0
    std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0);
    if (mode == 0) {
        // half cell around the origin: flux through s = h/2 over the cell area
        const double c = std::sinh(0.5 * h) / (h * (std::cosh(0.5 * h) - 1.0));
        diag[0] = -c - 2.0;
        upper[0] = c;
        rhs[0] = -2.0 * f(0.0);
    } else {
        diag[0] = 1.0;
        rhs[0] = 0.0;
    }
    for (int j = 1; j < n; ++j) {
        const double sj = j * h;
        const double sp = std::sinh(sj + 0.5 * h), sm = std::sinh(sj - 0.5 * h), s0 = std::sinh(sj);
        lower[j] = sm / (h * h * s0);
        upper[j] = sp / (h * h * s0);
        diag[j] = -(sp + sm) / (h * h * s0) - m2 / (s0 * s0) - 2.0;
        rhs[j] = -2.0 * f(sj);
    }
    // Thomas elimination
    for (int j = 1; j < n; ++j) {
        if (std::abs(diag[j - 1]) < 1e-300) throw std::runtime_error("fd_resolvent: singular linear system");
        const double w = lower[j] / diag[j - 1];
        diag[j] -= w * upper[j - 1];
        rhs[j] -= w * rhs[j - 1];
    }
    out.u.assign(n + 1, 0.0);
    if (std::abs(diag[n - 1]) < 1e-300) throw std::runtime_error("fd_resolvent: singular linear system");
    out.u[n - 1] = rhs[n - 1] / diag[n - 1];
    for (int j = n - 2; j >= 0; --j) out.u[j] = (rhs[j] - upper[j] * out.u[j + 1]) / diag[j];
    return out;
}

FdSolution fd_resolvent_extrapolated(const std::function<double(double)>& f, int mode, int cells, double s_max) {
    const FdSolution coarse = fd_resolvent(f, mode, cells, s_max);
    const FdSolution fine = fd_resolvent(f, mode, 2 * cells, s_max);
    FdSolution out = coarse;
    for (std::size_t j = 0; j < out.u.size(); ++j) out.u[j] = (4.0 * fine.u[2 * j] - coarse.u[j]) / 3.0;
    return out;
}

// ---------------------------------------------------------------- direct form

double green(double s) {
    if (!(s > 0.0)) throw std::domain_error("green: distance must be positive");
    const double t = std::cosh(s);
    double q1;
    if (t < 8.0) {
        // (t + 1) / (t - 1) = coth^2(s / 2)
        q1 = -t * std::log(std::tanh(0.5 * s)) - 1.0;
    } else {
        // Q_1(t) = sum_{k >= 1} t^{-2k} / (2k + 1)
        const double v = 1.0 / (t * t);
        double term = v, acc = 0.0;
        for (int k = 1; k < 60 && term > 1e-18 * acc; ++k, term *= v) acc += term / (2 * k + 1);
        q1 = acc;
    }
    return q1 / kPiLocal;
}

namespace {

struct Node {
    double x, w;
};

std::vector<Node> gauss_panels(double a, double b, int panels) {
    using rule = boost::math::quadrature::gauss<double, 20>;
    const auto& xs = rule::abscissa();
    const auto& ws = rule::weights();
    std::vector<Node> out;
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * width, half = 0.5 * width;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            out.push_back({mid + half * xs[k], half * ws[k]});
            if (xs[k] != 0.0) out.push_back({mid - half * xs[k], half * ws[k]});
        }
    }
    return out;
}

struct DeNode {
    double s, w;
    bool even;
};

// tanh-sinh nodes on [0, L]; even nodes form the rule with twice the step
std::vector<DeNode> de_nodes(double extent, double h) {
    std::vector<DeNode> out;
    const int k_max = static_cast<int>(std::ceil(3.2 / h));
    for (int k = -k_max; k <= k_max; ++k) {
        const double t = k * h;
        const double e = std::exp(-kPiLocal * std::sinh(t));
        const double s = extent / (1.0 + e);
        const double ds = extent * kPiLocal * std::cosh(t) * e / ((1.0 + e) * (1.0 + e));
        if (!(s > 0.0) || !(ds > 0.0) || !std::isfinite(ds)) continue;
        out.push_back({s, h * ds, k % 2 == 0});
    }
    return out;
}

struct Coeffs {
    int n;
    std::vector<cplx> k;  // k_ij = a_ij + i b_ij, row-major, full-sum convention
};

Coeffs coefficients(const WedgeVector& v) {
    const int n = v.truncation();
    Coeffs c{n, std::vector<cplx>(static_cast<std::size_t>(n) * n)};
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            // dy_i ^ dy_j acts like dx_i ^ dx_j under the complex structure
            const double a = i < j ? v.a(i, j) + v.c(i, j) : 0.0;
            c.k[(i - 1) * n + (j - 1)] = cplx(a, v.b(i, j));
        }
    return c;
}

std::vector<double> amplitudes(int n) {
    std::vector<double> out;
    for (int k = 1; k <= n; ++k) {
        const double m = k + 1.0;
        out.push_back(0.25 * std::sqrt((2.0 * m * m * m - 2.0 * m) / kPiLocal));
    }
    return out;
}

// mu_k(z) = (1 - |z|^2)^2 amp_k conj(z)^{k-1} for k = 1..n
void basis_values(cplx z, const std::vector<double>& amp, cplx* out) {
    const double one = 1.0 - std::norm(z);
    const double lead = one * one;
    cplx power = 1.0;
    for (std::size_t k = 0; k < amp.size(); ++k) {
        out[k] = lead * amp[k] * power;
        power *= std::conj(z);
    }
}

}  // namespace

std::vector<FormValue> direct_quadratic_forms(const std::vector<WedgeVector>& vs, const FormQuadrature& q) {
    if (vs.empty()) return {};
    const int n = vs.front().truncation();
    for (const auto& v : vs)
        if (v.truncation() != n) throw std::invalid_argument("direct_quadratic_forms: mixed truncations");
    if (n > 4) throw std::invalid_argument("direct_quadratic_forms: truncation above 4 is too expensive");
    const std::size_t nv = vs.size();
    const std::vector<double> amp = amplitudes(n);
    std::vector<Coeffs> coeffs;
    for (const auto& v : vs) coeffs.push_back(coefficients(v));

    const std::vector<Node> outer = gauss_panels(0.0, q.outer_extent, q.radial_panels);
    
    const int n_theta = 4 * n - 2;
    const std::vector<DeNode> inner = de_nodes(q.inner_extent, q.inner_step);
    std::vector<double> g_inner(inner.size()), sinh_inner(inner.size()), tanh_half(inner.size());
    for (std::size_t a = 0; a < inner.size(); ++a) {
        g_inner[a] = green(inner[a].s);
        sinh_inner[a] = std::sinh(inner[a].s);
        tanh_half[a] = std::tanh(0.5 * inner[a].s);
    }

    const std::size_t jobs_count = outer.size() * n_theta;
    std::vector<std::vector<double>> fine(jobs_count, std::vector<double>(nv, 0.0));
    std::vector<std::vector<double>> coarse(jobs_count, std::vector<double>(nv, 0.0));

    parallel_for(jobs_count, q.jobs, [&](std::size_t job) {
        const Node& o = outer[job / n_theta];
        const double theta = 2.0 * kPiLocal * static_cast<double>(job % n_theta) / n_theta;
        const double rz = std::tanh(0.5 * o.x);
        const cplx z = std::polar(rz, theta);
        const double outer_weight = o.w * std::sinh(o.x) * (2.0 * kPiLocal / n_theta);

        std::vector<cplx> mz(n), mw(n);
        basis_values(z, amp, mz.data());
        // alpha_i = sum_j k_ij conj(mu_j(z)), beta_j = sum_i k_ij mu_i(z), S(z) = Im K(z, z)
        std::vector<cplx> alpha(nv * n), beta(nv * n);
        std::vector<double> sz(nv);
        for (std::size_t v = 0; v < nv; ++v) {
            cplx kzz = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const cplx kij = coeffs[v].k[i * n + j];
                    alpha[v * n + i] += kij * std::conj(mz[j]);
                    beta[v * n + j] += kij * mz[i];
                    kzz += kij * mz[i] * std::conj(mz[j]);
                }
            sz[v] = kzz.imag();
        }

        std::vector<double> ring(nv), ring_coarse(nv);
        for (std::size_t a = 0; a < inner.size(); ++a) {
            const double qz = rz * tanh_half[a];
            int n_alpha = q.angular_max;
            if (qz < 1.0 - 1e-15) n_alpha = static_cast<int>(std::ceil(q.angular_scale / -std::log(std::max(qz, 1e-300))));
            n_alpha = std::clamp(n_alpha, q.angular_min, q.angular_max);
            n_alpha += n_alpha % 2;
            std::fill(ring.begin(), ring.end(), 0.0);
            std::fill(ring_coarse.begin(), ring_coarse.end(), 0.0);
            const cplx turn = std::polar(1.0, 2.0 * kPiLocal / n_alpha);
            cplx zeta = tanh_half[a];
            for (int b = 0; b < n_alpha; ++b, zeta *= turn) {
                const cplx w = (z + zeta) / (1.0 + std::conj(z) * zeta);
                basis_values(w, amp, mw.data());
                for (std::size_t v = 0; v < nv; ++v) {
                    cplx kzw = 0.0, kwz = 0.0, kww = 0.0;
                    for (int i = 0; i < n; ++i) {
                        kzw += mw[i] * alpha[v * n + i];
                        kwz += std::conj(mw[i]) * beta[v * n + i];
                        cplx row = 0.0;
                        for (int j = 0; j < n; ++j) row += coeffs[v].k[i * n + j] * std::conj(mw[j]);
                        kww += mw[i] * row;
                    }
                    const double psi =
                        -4.0 * sz[v] * kww.imag() - 2.0 * std::norm(kzw) + 2.0 * (kzw * kwz).real();
                    ring[v] += psi;
                    if (b % 2 == 0) ring_coarse[v] += psi;
                }
            }
            const double radial = g_inner[a] * sinh_inner[a] * 2.0 * kPiLocal;
            for (std::size_t v = 0; v < nv; ++v) {
                fine[job][v] += inner[a].w * radial * ring[v] / n_alpha * outer_weight;
                if (inner[a].even)
                    coarse[job][v] += 2.0 * inner[a].w * radial * ring_coarse[v] / (n_alpha / 2) * outer_weight;
            }
        }
    });

    std::vector<FormValue> out(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        double f = 0.0, c = 0.0;
        for (std::size_t job = 0; job < jobs_count; ++job) {
            f += fine[job][v];
            c += coarse[job][v];
        }
        out[v].value = f;
        out[v].refinement_gap = std::abs(f - c);
        if (out[v].refinement_gap > q.tolerance * (1.0 + std::abs(f)))
            throw std::runtime_error("direct_quadratic_forms: nested rules disagree by " +
                                     std::to_string(out[v].refinement_gap) + " near the kernel singularity");
    }
    return out;
}

double direct_quadratic_form(const WedgeVector& v, const FormQuadrature& q) {
    return direct_quadratic_forms({v}, q).front().value;
}

}  // namespace wpc::oracle
