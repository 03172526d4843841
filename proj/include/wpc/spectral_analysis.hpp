// Eigen-analysis of the truncated curvature operator and the dyadic A_i diagnostics.
#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "wpc/wedge_operator.hpp"

namespace wpc {

/// 16 sqrt(3 / pi), the uniform bound on |Q(V, V)| for unit V.
double operator_norm_bound();
/// 2^{-30}
double dyadic_reference();
/// 135 / (pi 2^35)
double dyadic_final_bound();

/// Ascending eigenvalues of a symmetric matrix.
std::vector<double> sorted_eigenvalues(const Eigen::MatrixXd& m);

struct NonpositiveVerdict {
    bool pass = false;
    double lambda_max = 0.0;
    double tolerance = 0.0;
};
NonpositiveVerdict verify_nonpositive(const OperatorMatrix& m, double tol = 1e-9);

struct BoundVerdict {
    bool pass = false;
    double abs_lambda_min = 0.0;
    double bound = 0.0;
};
BoundVerdict verify_bound(const OperatorMatrix& m);

struct KernelVerdict {
    int dimension = 0;
    int expected = 0;
    double tolerance = 0.0;
    /// Smallest |lambda| outside the kernel (infinity if there is none).
    double nearest_nonzero = 0.0;
    bool gap_ok = false;
    bool pass = false;
};
/// Count of |lambda| < tol; expected n(n-1). The gap check requires every
/// other eigenvalue to exceed 10 * tol in modulus.
KernelVerdict kernel_dimension(const OperatorMatrix& m, double tol = 1e-7);

struct SpectralReport {
    int n = 0;
    std::vector<double> eigenvalues;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    NonpositiveVerdict nonpositive;
    BoundVerdict bound;
    KernelVerdict kernel;
    bool pass() const { return nonpositive.pass && bound.pass && kernel.pass; }
};
SpectralReport analyze(const OperatorMatrix& m, double tol_eigen = 1e-9, double tol_kernel = 1e-7);
nlohmann::json to_json(const SpectralReport& r);

/// Cauchy interlacing: sigma_j <= lambda_j <= sigma_{j + N - m}.
bool interlaces(const std::vector<double>& full, const std::vector<double>& compressed, double tol = 1e-10);

/// Matrix of Q on an orthonormal family: P(a, b) = Q(v_a, v_b).
Eigen::MatrixXd compress(const std::vector<WedgeVector>& basis, const TensorLookup& t);

struct DyadicRow {
    int i = 0;
    int first = 0;  // 2^i
    int last = 0;   // 2^{i+1} - 1
    double neg_q = 0.0;          // -Q(A_i, A_i)
    double d_term = 0.0;         // (4 / 2^i) int D(S) S dA
    double area_bound = 0.0;     // (4 / (3 2^i)) int S^2 dA
    double beta_bound = 0.0;     // exact beta integrals with (k+1)^3 amplitudes
    std::optional<double> power_bound;  // beta integrals replaced by 45 / (2^17 m^7)
    std::optional<double> cube_bound;   // 15 / (pi 2^35) (sum (k+1)^3)^2 / 2^{8i}
    bool cube_condition = false;        // sum (k+1)^3 > 3 * 2^{4i}
    bool above_reference = false;       // neg_q >= 2^{-30}
    bool chain_ordered = false;
};

struct ProjectionRow {
    int m = 0;
    std::vector<int> indices;  // A_m ... A_{2m-1}
    Eigen::MatrixXd matrix;
    std::vector<double> eigenvalues;
    double trace = 0.0;
    double q_sum = 0.0;  // sum of Q(A_i, A_i)
    int count_below = 0;  // eigenvalues <= -2^{-31}
    int floor_sqrt = 0;
    bool pass = false;
};

struct NoncompactnessReport {
    int i_max = 0;
    std::vector<DyadicRow> rows;
    std::vector<ProjectionRow> projections;
    /// Smallest i0 with the cube condition holding for every i in [i0, 24].
    int cube_threshold = 0;
    bool final_bound_met = false;
    bool pass = false;
};

/// Dyadic block sum of (k+1)^3 in exact integer arithmetic.
unsigned __int128 dyadic_cube_sum(int i);
bool cube_condition(int i);

/// Tensor tuples (k,k,l,l) and (k,l,l,k) needed for A_0 ... A_{i_max}.
std::vector<TensorIndex> dyadic_slice(int i_max);

/// Requires the cache to hold dyadic_slice(i_max); when `engine` is given the
/// missing entries are computed first.
NoncompactnessReport noncompactness_evidence(int i_max, TensorCache& cache, TensorEngine* engine = nullptr,
                                             int jobs = 1);
nlohmann::json to_json(const NoncompactnessReport& r);

/// R_{n nbar n nbar} = 2 T[n,n,n,n] for n = 1 .. n_max.
struct SectionalTrend {
    std::vector<double> values;
    bool positive = false;
    bool strictly_decreasing = false;
};
SectionalTrend holomorphic_sectional_trend(int n_max, const TensorCache& cache);

}  // namespace wpc
