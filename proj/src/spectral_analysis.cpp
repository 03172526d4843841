#include "wpc/spectral_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wpc {

double operator_norm_bound() { return 16.0 * std::sqrt(3.0 / kPi); }
double dyadic_reference() { return std::ldexp(1.0, -30); }
double dyadic_final_bound() { return 135.0 / (kPi * std::ldexp(1.0, 35)); }

std::vector<double> sorted_eigenvalues(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("sorted_eigenvalues: matrix is not square");
    if (m.rows() == 0) return {};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("symmetric eigensolver failed");
    std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

void require_symmetric(const OperatorMatrix& m) {
    if (m.matrix.rows() != m.matrix.cols()) throw std::invalid_argument("operator matrix is not square");
    const double scale = std::max(1.0, m.matrix.cwiseAbs().maxCoeff());
    if (m.matrix.rows() > 0 && m.asymmetry() > 1e-10 * scale)
        throw std::invalid_argument("operator matrix is not symmetric");
}

NonpositiveVerdict nonpositive_from(const std::vector<double>& ev, double tol) {
    NonpositiveVerdict v;
    v.tolerance = tol;
    v.lambda_max = ev.empty() ? 0.0 : ev.back();
    v.pass = v.lambda_max <= tol;
    return v;
}

BoundVerdict bound_from(const std::vector<double>& ev) {
    BoundVerdict v;
    v.bound = operator_norm_bound();
    v.abs_lambda_min = ev.empty() ? 0.0 : std::abs(std::min(ev.front(), 0.0));
    v.pass = v.abs_lambda_min <= v.bound;
    return v;
}

KernelVerdict kernel_from(const std::vector<double>& ev, int n, double tol) {
    KernelVerdict v;
    v.tolerance = tol;
    v.expected = n * (n - 1);
    v.nearest_nonzero = std::numeric_limits<double>::infinity();
    for (double x : ev) {
        if (std::abs(x) < tol)
            ++v.dimension;
        else
            v.nearest_nonzero = std::min(v.nearest_nonzero, std::abs(x));
    }
    v.gap_ok = v.nearest_nonzero >= 10.0 * tol;
    v.pass = v.gap_ok && v.dimension == v.expected;
    return v;
}

}  // namespace

NonpositiveVerdict verify_nonpositive(const OperatorMatrix& m, double tol) {
    require_symmetric(m);
    return nonpositive_from(sorted_eigenvalues(m.matrix), tol);
}

BoundVerdict verify_bound(const OperatorMatrix& m) {
    require_symmetric(m);
    return bound_from(sorted_eigenvalues(m.matrix));
}

KernelVerdict kernel_dimension(const OperatorMatrix& m, double tol) {
    require_symmetric(m);
    return kernel_from(sorted_eigenvalues(m.matrix), m.n, tol);
}

SpectralReport analyze(const OperatorMatrix& m, double tol_eigen, double tol_kernel) {
    require_symmetric(m);
    SpectralReport r;
    r.n = m.n;
    r.eigenvalues = sorted_eigenvalues(m.matrix);
    r.lambda_min = r.eigenvalues.empty() ? 0.0 : r.eigenvalues.front();
    r.lambda_max = r.eigenvalues.empty() ? 0.0 : r.eigenvalues.back();
    r.nonpositive = nonpositive_from(r.eigenvalues, tol_eigen);
    r.bound = bound_from(r.eigenvalues);
    r.kernel = kernel_from(r.eigenvalues, m.n, tol_kernel);
    return r;
}

nlohmann::json to_json(const SpectralReport& r) {
    return {{"n", r.n},
            {"dimension", r.eigenvalues.size()},
            {"eigenvalues", r.eigenvalues},
            {"lambda_min", r.lambda_min},
            {"lambda_max", r.lambda_max},
            {"nonpositive", {{"pass", r.nonpositive.pass}, {"lambda_max", r.nonpositive.lambda_max},
                             {"tolerance", r.nonpositive.tolerance}}},
            {"bound", {{"pass", r.bound.pass}, {"abs_lambda_min", r.bound.abs_lambda_min}, {"bound", r.bound.bound}}},
            {"kernel", {{"dimension", r.kernel.dimension}, {"expected", r.kernel.expected},
                        {"tolerance", r.kernel.tolerance},
                        {"nearest_nonzero", std::isfinite(r.kernel.nearest_nonzero)
                                                ? nlohmann::json(r.kernel.nearest_nonzero)
                                                : nlohmann::json(nullptr)},
                        {"gap_ok", r.kernel.gap_ok}, {"pass", r.kernel.pass}}}};
}

bool interlaces(const std::vector<double>& full, const std::vector<double>& compressed, double tol) {
    const std::size_t big = full.size(), m = compressed.size();
    if (m > big) return false;
    for (std::size_t j = 0; j < m; ++j) {
        if (compressed[j] < full[j] - tol) return false;
        if (compressed[j] > full[j + big - m] + tol) return false;
    }
    return true;
}

Eigen::MatrixXd compress(const std::vector<WedgeVector>& basis, const TensorLookup& t) {
    const int m = static_cast<int>(basis.size());
    Eigen::MatrixXd p(m, m);
    for (int a = 0; a < m; ++a) {
        p(a, a) = quadratic_form(basis[a], t);
        for (int b = 0; b < a; ++b) p(a, b) = p(b, a) = bilinear_form(basis[a], basis[b], t);
    }
    return p;
}

unsigned __int128 dyadic_cube_sum(int i) {
    if (i < 0 || i > 28) throw std::out_of_range("dyadic_cube_sum: i must lie in [0, 28]");
    const auto cubes_to = [](unsigned __int128 m) {
        const unsigned __int128 t = m * (m + 1) / 2;
        return t * t;
    };
    const unsigned __int128 lo = static_cast<unsigned __int128>(1) << i;
    // sum_{k=2^i}^{2^{i+1}-1} (k+1)^3 = sum_{m=2^i+1}^{2^{i+1}} m^3
    return cubes_to(2 * lo) - cubes_to(lo);
}

bool cube_condition(int i) {
    const unsigned __int128 rhs = static_cast<unsigned __int128>(3) << (4 * i);
    return dyadic_cube_sum(i) > rhs;
}

std::vector<TensorIndex> dyadic_slice(int i_max) {
    if (i_max < 0) throw std::invalid_argument("dyadic_slice: i_max must be >= 0");
    const int top = (1 << (i_max + 1)) - 1;
    std::vector<TensorIndex> out;
    for (int k = 1; k <= top; ++k)
        for (int l = 1; l <= top; ++l) {
            out.push_back(canonical_index({k, k, l, l}));
            out.push_back(canonical_index({k, l, l, k}));
        }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

double beta_six(int m) {
    double v = 720.0;
    for (int k = 1; k <= 7; ++k) v /= (m + k);
    return v;
}

DyadicRow dyadic_row(int i, int top, const TensorLookup& t) {
    DyadicRow row;
    row.i = i;
    row.first = 1 << i;
    row.last = (1 << (i + 1)) - 1;
    const double scale = std::ldexp(1.0, -i);
    row.neg_q = -quadratic_form(a_vector(i, top), t);

    double d_sum = 0.0, area = 0.0, beta = 0.0, power = 0.0, cubes = 0.0;
    for (int k = row.first; k <= row.last; ++k) {
        const double ck = std::pow(k + 1.0, 3);
        const double ak = basis_from_label(k).amplitude;
        cubes += ck;
        for (int j = row.first; j <= row.last; ++j) {
            const double cj = std::pow(j + 1.0, 3);
            const double aj = basis_from_label(j).amplitude;
            const int m = k + j - 2;
            d_sum += t(k, k, j, j);
            // int |mu_k|^2 |mu_j|^2 dA = 4 pi a_k^2 a_j^2 int (1-x)^6 x^{k+j-2} dx
            area += 4.0 * kPi * ak * ak * aj * aj * beta_six(m);
            beta += ck * cj * beta_six(m);
            if (m >= 1) power += ck * cj * 45.0 / (std::ldexp(1.0, 17) * std::pow(m, 7));
        }
    }
    row.d_term = 4.0 * scale * d_sum;
    row.area_bound = 4.0 / 3.0 * scale * area;
    row.beta_bound = scale / (48.0 * kPi) * beta;
    if (i >= 1) {
        row.power_bound = scale / (48.0 * kPi) * power;
        row.cube_bound = 15.0 / (kPi * std::ldexp(1.0, 35)) * cubes * cubes / std::ldexp(1.0, 8 * i);
    }
    row.cube_condition = cube_condition(i);
    row.above_reference = row.neg_q >= dyadic_reference();

    const double slack = 1e-12;
    std::vector<double> chain = {row.neg_q, row.d_term, row.area_bound, row.beta_bound};
    if (row.power_bound) chain.push_back(*row.power_bound);
    if (row.cube_bound) chain.push_back(*row.cube_bound);
    if (row.cube_bound && row.cube_condition) chain.push_back(dyadic_final_bound());
    row.chain_ordered = true;
    for (std::size_t c = 1; c < chain.size(); ++c)
        if (chain[c] > chain[c - 1] * (1.0 + slack) + slack * 1e-12) row.chain_ordered = false;
    return row;
}

}  // namespace

NoncompactnessReport noncompactness_evidence(int i_max, TensorCache& cache, TensorEngine* engine, int jobs) {
    if (i_max < 0 || i_max > 12) throw std::invalid_argument("noncompactness_evidence: i_max must lie in [0, 12]");
    const int top = (1 << (i_max + 1)) - 1;
    const std::vector<TensorIndex> slice = dyadic_slice(i_max);
    if (engine) {
        if (engine->max_label() < top)
            throw std::invalid_argument("noncompactness_evidence: engine capacity " +
                                        std::to_string(engine->max_label()) + " below required label " +
                                        std::to_string(top));
        engine->compute_entries(slice, cache, jobs);
    }
    for (const TensorIndex& s : slice)
        if (!cache.contains(s))
            throw std::invalid_argument("noncompactness_evidence: truncation insufficient, cache lacks " + s.str() +
                                        " (labels up to " + std::to_string(top) + " required)");

    const TensorLookup t = cache_lookup(cache);
    NoncompactnessReport rep;
    rep.i_max = i_max;
    bool ok = true;
    for (int i = 0; i <= i_max; ++i) {
        rep.rows.push_back(dyadic_row(i, top, t));
        ok = ok && rep.rows.back().above_reference && rep.rows.back().chain_ordered;
    }
    rep.final_bound_met = rep.rows.back().neg_q >= dyadic_final_bound();
    ok = ok && rep.final_bound_met;

    rep.cube_threshold = 25;
    for (int i = 24; i >= 0 && cube_condition(i); --i) rep.cube_threshold = i;

    const double threshold = -std::ldexp(1.0, -31);
    for (int m = 1; 2 * m - 1 <= i_max; ++m) {
        ProjectionRow p;
        p.m = m;
        std::vector<WedgeVector> basis;
        for (int i = m; i <= 2 * m - 1; ++i) {
            p.indices.push_back(i);
            basis.push_back(a_vector(i, top));
            p.q_sum += quadratic_form(basis.back(), t);
        }
        p.matrix = compress(basis, t);
        p.eigenvalues = sorted_eigenvalues(p.matrix);
        p.trace = p.matrix.trace();
        for (double e : p.eigenvalues)
            if (e <= threshold) ++p.count_below;
        p.floor_sqrt = static_cast<int>(std::floor(std::sqrt(static_cast<double>(m))));
        const bool symmetric = (p.matrix - p.matrix.transpose()).cwiseAbs().maxCoeff() <= 1e-12;
        const bool in_range = p.eigenvalues.front() >= -operator_norm_bound() && p.eigenvalues.back() <= 1e-9;
        p.pass = symmetric && in_range && std::abs(p.trace - p.q_sum) <= 1e-8 && p.count_below >= p.floor_sqrt;
        ok = ok && p.pass;
        rep.projections.push_back(std::move(p));
    }
    rep.pass = ok;
    return rep;
}

nlohmann::json to_json(const NoncompactnessReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const DyadicRow& d : r.rows) {
        rows.push_back({{"i", d.i},
                        {"first", d.first},
                        {"last", d.last},
                        {"neg_q", d.neg_q},
                        {"d_term", d.d_term},
                        {"area_bound", d.area_bound},
                        {"beta_bound", d.beta_bound},
                        {"power_bound", d.power_bound ? nlohmann::json(*d.power_bound) : nlohmann::json(nullptr)},
                        {"cube_bound", d.cube_bound ? nlohmann::json(*d.cube_bound) : nlohmann::json(nullptr)},
                        {"cube_condition", d.cube_condition},
                        {"above_reference", d.above_reference},
                        {"chain_ordered", d.chain_ordered}});
    }
    nlohmann::json proj = nlohmann::json::array();
    for (const ProjectionRow& p : r.projections) {
        proj.push_back({{"m", p.m},
                        {"indices", p.indices},
                        {"eigenvalues", p.eigenvalues},
                        {"trace", p.trace},
                        {"q_sum", p.q_sum},
                        {"count_below", p.count_below},
                        {"floor_sqrt", p.floor_sqrt},
                        {"pass", p.pass}});
    }
    return {{"i_max", r.i_max},
            {"reference", dyadic_reference()},
            {"final_bound", dyadic_final_bound()},
            {"final_bound_met", r.final_bound_met},
            {"cube_threshold", r.cube_threshold},
            {"rows", rows},
            {"projections", proj},
            {"pass", r.pass}};
}

SectionalTrend holomorphic_sectional_trend(int n_max, const TensorCache& cache) {
    if (n_max < 1) throw std::invalid_argument("holomorphic_sectional_trend: n_max must be >= 1");
    SectionalTrend s;
    s.positive = true;
    s.strictly_decreasing = true;
    for (int n = 1; n <= n_max; ++n) {
        s.values.push_back(curvature_component(n, n, n, n, cache));
        s.positive = s.positive && s.values.back() > 0.0;
        if (n > 1 && !(s.values[n - 1] < s.values[n - 2])) s.strictly_decreasing = false;
    }
    return s;
}

}  // namespace wpc
