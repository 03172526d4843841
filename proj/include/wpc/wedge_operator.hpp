/**
 * @file wedge_operator.hpp
 * @brief Real bivectors over a rank-n truncation and the curvature operator
 *        as a quadratic form on them.
 *
 * Basis layout (fixed, used by every exported matrix):
 *   dx_i ^ dx_j for i < j, lexicographic;
 *   dx_i ^ dy_j for all i, j, row-major;
 *   dy_i ^ dy_j for i < j, lexicographic.
 * Labels are 1-based.
 */
#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "wpc/wp_tensor.hpp"

namespace wpc {

enum class WedgeKind { XX, XY, YY };

struct WedgeBasisLabel {
    WedgeKind kind;
    int i;
    int j;
    std::string str() const;
};

class WedgeVector {
public:
    explicit WedgeVector(int n);
    WedgeVector(int n, Eigen::VectorXd coefficients);

    static int dimension_for(int n) { return n * (2 * n - 1); }

    int truncation() const { return n_; }
    int dimension() const { return static_cast<int>(coef_.size()); }
    const Eigen::VectorXd& coefficients() const { return coef_; }
    Eigen::VectorXd& coefficients() { return coef_; }

    /// Coefficient of dx_i ^ dx_j, i < j.
    double& a(int i, int j) { return coef_[index_xx(i, j)]; }
    double a(int i, int j) const { return coef_[index_xx(i, j)]; }
    /// Coefficient of dx_i ^ dy_j.
    double& b(int i, int j) { return coef_[index_xy(i, j)]; }
    double b(int i, int j) const { return coef_[index_xy(i, j)]; }
    /// Coefficient of dy_i ^ dy_j, i < j.
    double& c(int i, int j) { return coef_[index_yy(i, j)]; }
    double c(int i, int j) const { return coef_[index_yy(i, j)]; }

    int index_xx(int i, int j) const;
    int index_xy(int i, int j) const;
    int index_yy(int i, int j) const;

    double norm() const { return coef_.norm(); }

    WedgeVector& operator+=(const WedgeVector& o);
    WedgeVector& operator-=(const WedgeVector& o);
    WedgeVector& operator*=(double s);
    friend WedgeVector operator+(WedgeVector u, const WedgeVector& v) { return u += v; }
    friend WedgeVector operator-(WedgeVector u, const WedgeVector& v) { return u -= v; }
    friend WedgeVector operator*(double s, WedgeVector v) { return v *= s; }

private:
    void check(int i, int j, bool strict) const;
    int n_;
    Eigen::VectorXd coef_;
};

/// Index map alpha -> basis bivector for rank n.
std::vector<WedgeBasisLabel> wedge_index_map(int n);

/// Euclidean pairing induced by the WP metric; the three blocks are orthogonal.
double wedge_inner(const WedgeVector& u, const WedgeVector& v);

/// (a, b, c) -> (c, b^T, a): the action of the complex structure on bivectors.
WedgeVector j_action(const WedgeVector& v);

/// d = a + c (upper triangle, zero elsewhere) and b as n x n matrices.
struct ReducedPair {
    Eigen::MatrixXd d;
    Eigen::MatrixXd b;
};
ReducedPair reduce_to_ab(const WedgeVector& v);

using TensorLookup = std::function<double(int, int, int, int)>;

/// Dense n^4 table of T for fast repeated lookups.
class DenseTensor {
public:
    DenseTensor(int n, const TensorCache& cache);
    int truncation() const { return n_; }
    double operator()(int i, int j, int k, int l) const {
        return data_[(((i - 1) * n_ + (j - 1)) * n_ + (k - 1)) * n_ + (l - 1)];
    }
    TensorLookup lookup() const;

private:
    int n_;
    std::vector<double> data_;
};

TensorLookup cache_lookup(const TensorCache& cache);

struct FormParts {
    double aa = 0.0;     // Q(A, A)
    double ab = 0.0;     // Q(A, B)
    double bb = 0.0;     // Q(B, B)
    double cross_sum = 0.0;  // real bracket sum multiplying -i in Q(A, B)
    double total() const { return aa + 2.0 * ab + bb; }
};

/// Q(A+B, A+B) from tensor entries, A = sum d_ij dx_i^dx_j, B = sum b_ij dx_i^dy_j
/// (sums over all i, j). Throws MissingEntryError when an entry is absent.
FormParts quadratic_form_parts(const Eigen::MatrixXd& d, const Eigen::MatrixXd& b, const TensorLookup& t);
double quadratic_form(const Eigen::MatrixXd& d, const Eigen::MatrixXd& b, const TensorLookup& t);
double quadratic_form(const Eigen::MatrixXd& d, const Eigen::MatrixXd& b, const TensorCache& cache);
double quadratic_form(const WedgeVector& v, const TensorLookup& t);
double quadratic_form(const WedgeVector& v, const TensorCache& cache);

/// Polarization (q(u+v) - q(u-v)) / 4.
double bilinear_form(const WedgeVector& u, const WedgeVector& v, const TensorLookup& t);

struct OperatorMatrix {
    int n = 0;
    Eigen::MatrixXd matrix;
    std::vector<WedgeBasisLabel> index;

    double asymmetry() const;
    /// Row-major CSV with 17 significant digits.
    void write_csv(const std::filesystem::path& path) const;
    nlohmann::json sidecar() const;
};

OperatorMatrix assemble_matrix(int n, const TensorCache& cache, int jobs = 1);
OperatorMatrix assemble_matrix(int n, const TensorLookup& t, int jobs = 1);

/// 2^{-i/2} sum_{k = 2^i}^{2^{i+1} - 1} dx_k ^ dy_k.
WedgeVector a_vector(int i, int n);

}  // namespace wpc
