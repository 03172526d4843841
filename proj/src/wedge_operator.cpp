#include "wpc/wedge_operator.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "wpc/parallel.hpp"

namespace wpc {

std::string WedgeBasisLabel::str() const {
    const char* tag = kind == WedgeKind::XX ? "dx%d^dx%d" : kind == WedgeKind::XY ? "dx%d^dy%d" : "dy%d^dy%d";
    char buf[64];
    std::snprintf(buf, sizeof buf, tag, i, j);
    return buf;
}

WedgeVector::WedgeVector(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("WedgeVector: truncation must be >= 1");
    coef_ = Eigen::VectorXd::Zero(dimension_for(n));
}

WedgeVector::WedgeVector(int n, Eigen::VectorXd coefficients) : n_(n), coef_(std::move(coefficients)) {
    if (n < 1) throw std::invalid_argument("WedgeVector: truncation must be >= 1");
    if (coef_.size() != dimension_for(n))
        throw std::invalid_argument("WedgeVector: expected " + std::to_string(dimension_for(n)) +
                                    " coefficients, got " + std::to_string(coef_.size()));
}

void WedgeVector::check(int i, int j, bool strict) const {
    if (i < 1 || j < 1 || i > n_ || j > n_ || (strict && i >= j))
        throw std::out_of_range("WedgeVector: invalid label pair (" + std::to_string(i) + "," +
                                std::to_string(j) + ") at truncation " + std::to_string(n_));
}

int WedgeVector::index_xx(int i, int j) const {
    check(i, j, true);
    // pairs (i', j') with i' < i come first
    const int before = (i - 1) * n_ - (i - 1) * i / 2;
    return before + (j - i - 1);
}

int WedgeVector::index_xy(int i, int j) const {
    check(i, j, false);
    return n_ * (n_ - 1) / 2 + (i - 1) * n_ + (j - 1);
}

int WedgeVector::index_yy(int i, int j) const {
    check(i, j, true);
    return n_ * (n_ - 1) / 2 + n_ * n_ + index_xx(i, j);
}

WedgeVector& WedgeVector::operator+=(const WedgeVector& o) {
    if (o.n_ != n_) throw std::invalid_argument("WedgeVector: truncation mismatch");
    coef_ += o.coef_;
    return *this;
}

WedgeVector& WedgeVector::operator-=(const WedgeVector& o) {
    if (o.n_ != n_) throw std::invalid_argument("WedgeVector: truncation mismatch");
    coef_ -= o.coef_;
    return *this;
}

WedgeVector& WedgeVector::operator*=(double s) {
    coef_ *= s;
    return *this;
}

std::vector<WedgeBasisLabel> wedge_index_map(int n) {
    std::vector<WedgeBasisLabel> out;
    out.reserve(WedgeVector::dimension_for(n));
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) out.push_back({WedgeKind::XX, i, j});
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) out.push_back({WedgeKind::XY, i, j});
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) out.push_back({WedgeKind::YY, i, j});
    return out;
}

double wedge_inner(const WedgeVector& u, const WedgeVector& v) {
    if (u.truncation() != v.truncation()) throw std::invalid_argument("wedge_inner: truncation mismatch");
    return u.coefficients().dot(v.coefficients());
}

WedgeVector j_action(const WedgeVector& v) {
    const int n = v.truncation();
    WedgeVector out(n);
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            out.a(i, j) = v.c(i, j);
            out.c(i, j) = v.a(i, j);
        }
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) out.b(j, i) = v.b(i, j);
    return out;
}

ReducedPair reduce_to_ab(const WedgeVector& v) {
    const int n = v.truncation();
    ReducedPair r{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n)};
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) r.d(i - 1, j - 1) = v.a(i, j) + v.c(i, j);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) r.b(i - 1, j - 1) = v.b(i, j);
    return r;
}

DenseTensor::DenseTensor(int n, const TensorCache& cache) : n_(n), data_(static_cast<std::size_t>(n) * n * n * n) {
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            for (int k = 1; k <= n; ++k)
                for (int l = 1; l <= n; ++l)
                    data_[(((i - 1) * n + (j - 1)) * n + (k - 1)) * n + (l - 1)] = cache.at(i, j, k, l);
}

TensorLookup DenseTensor::lookup() const {
    return [this](int i, int j, int k, int l) { return (*this)(i, j, k, l); };
}

TensorLookup cache_lookup(const TensorCache& cache) {
    return [&cache](int i, int j, int k, int l) { return cache.at(i, j, k, l); };
}

namespace {

struct Nonzero {
    int i, j;
    double v;
};

std::vector<Nonzero> nonzeros(const Eigen::MatrixXd& m) {
    std::vector<Nonzero> out;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (m(i, j) != 0.0) out.push_back({i + 1, j + 1, m(i, j)});
    return out;
}

}  // namespace

FormParts quadratic_form_parts(const Eigen::MatrixXd& d, const Eigen::MatrixXd& b, const TensorLookup& t) {
    const auto dn = nonzeros(d);
    const auto bn = nonzeros(b);
    FormParts p;
    for (const auto& x : dn)
        for (const auto& y : dn) {
            const int i = x.i, j = x.j, k = y.i, l = y.j;
            p.aa += x.v * y.v *
                    (t(i, j, k, l) - t(i, j, l, k) - t(j, i, k, l) + t(j, i, l, k) + 2.0 * t(i, l, k, j) -
                     2.0 * t(i, k, l, j));
        }
    for (const auto& x : bn)
        for (const auto& y : bn) {
            const int i = x.i, j = x.j, k = y.i, l = y.j;
            p.bb -= x.v * y.v *
                    (t(i, j, k, l) + t(i, j, l, k) + t(j, i, k, l) + t(j, i, l, k) + 2.0 * t(i, l, k, j) +
                     2.0 * t(i, k, l, j));
        }
    double scale = 0.0;
    for (const auto& x : dn)
        for (const auto& y : bn) {
            const int i = x.i, j = x.j, k = y.i, l = y.j;
            const double terms[8] = {-t(i, j, k, l), -t(i, l, k, j), -t(i, j, l, k), -t(i, k, l, j),
                                     t(j, i, k, l),  t(j, l, k, i),  t(j, i, l, k),  t(j, k, l, i)};
            double bracket = 0.0;
            for (double v : terms) {
                bracket += v;
                scale += std::abs(x.v * y.v * v);
            }
            p.cross_sum += x.v * y.v * bracket;
        }
    if (std::abs(p.cross_sum) > 1e-9 * (1.0 + scale))
        throw std::logic_error("quadratic_form: mixed bracket sum " + std::to_string(p.cross_sum) +
                               " does not vanish; tensor entries are inconsistent");
    p.ab = std::real(std::complex<double>(0.0, -1.0) * p.cross_sum);
    return p;
}

double quadratic_form(const Eigen::MatrixXd& d, const Eigen::MatrixXd& b, const TensorLookup& t) {
    return quadratic_form_parts(d, b, t).total();
}

double quadratic_form(const Eigen::MatrixXd& d, const Eigen::MatrixXd& b, const TensorCache& cache) {
    return quadratic_form(d, b, cache_lookup(cache));
}

double quadratic_form(const WedgeVector& v, const TensorLookup& t) {
    const ReducedPair r = reduce_to_ab(v);
    return quadratic_form(r.d, r.b, t);
}

double quadratic_form(const WedgeVector& v, const TensorCache& cache) {
    return quadratic_form(v, cache_lookup(cache));
}

double bilinear_form(const WedgeVector& u, const WedgeVector& v, const TensorLookup& t) {
    return 0.25 * (quadratic_form(u + v, t) - quadratic_form(u - v, t));
}

double OperatorMatrix::asymmetry() const { return (matrix - matrix.transpose()).cwiseAbs().maxCoeff(); }

void OperatorMatrix::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    char buf[40];
    for (int r = 0; r < matrix.rows(); ++r) {
        for (int c = 0; c < matrix.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", matrix(r, c));
            out << (c ? "," : "") << buf;
        }
        out << "\n";
    }
}

nlohmann::json OperatorMatrix::sidecar() const {
    nlohmann::json labels = nlohmann::json::array();
    for (std::size_t a = 0; a < index.size(); ++a) {
        const auto& l = index[a];
        const char* kind = l.kind == WedgeKind::XX ? "xx" : l.kind == WedgeKind::XY ? "xy" : "yy";
        labels.push_back({{"row", a}, {"kind", kind}, {"i", l.i}, {"j", l.j}, {"label", l.str()}});
    }
    return {{"truncation", n},
            {"dimension", matrix.rows()},
            {"layout", "xx lexicographic, xy row-major, yy lexicographic"},
            {"csv", "row-major, 17 significant digits"},
            {"index", labels}};
}

OperatorMatrix assemble_matrix(int n, const TensorLookup& t, int jobs) {
    if (n < 1) throw std::invalid_argument("assemble_matrix: truncation must be >= 1");
    const int dim = WedgeVector::dimension_for(n);
    OperatorMatrix m{n, Eigen::MatrixXd::Zero(dim, dim), wedge_index_map(n)};
    std::vector<std::string> errors(dim);
    parallel_for(dim, jobs, [&](std::size_t col) {
        const int beta = static_cast<int>(col);
        try {
            WedgeVector eb(n);
            eb.coefficients()[beta] = 1.0;
            m.matrix(beta, beta) = quadratic_form(eb, t);
            for (int alpha = 0; alpha < beta; ++alpha) {
                WedgeVector ea(n);
                ea.coefficients()[alpha] = 1.0;
                m.matrix(alpha, beta) = bilinear_form(ea, eb, t);
            }
        } catch (const std::exception& e) {
            errors[col] = e.what();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error("assemble_matrix: " + e);
    for (int beta = 0; beta < dim; ++beta)
        for (int alpha = 0; alpha < beta; ++alpha) m.matrix(beta, alpha) = m.matrix(alpha, beta);
    return m;
}

OperatorMatrix assemble_matrix(int n, const TensorCache& cache, int jobs) {
    const DenseTensor dense(n, cache);
    return assemble_matrix(n, dense.lookup(), jobs);
}

WedgeVector a_vector(int i, int n) {
    if (i < 0) throw std::invalid_argument("a_vector: index must be >= 0");
    const int last = (1 << (i + 1)) - 1;
    if (n < last)
        throw std::invalid_argument("a_vector: A_" + std::to_string(i) + " needs truncation >= " +
                                    std::to_string(last) + ", got " + std::to_string(n));
    WedgeVector v(n);
    const double s = std::pow(2.0, -0.5 * i);
    for (int k = 1 << i; k <= last; ++k) v.b(k, k) = s;
    return v;
}

}  // namespace wpc
