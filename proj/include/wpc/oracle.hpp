// Brute-force cross-checks sharing no numerical kernels with the main pipeline:
// exact beta integrals, a finite-difference resolvent and a direct double
// quadrature of the curvature form.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "wpc/wedge_operator.hpp"

namespace wpc::oracle {

using RationalValue = boost::multiprecision::cpp_rational;

/// 6! m! / (m+7)! = int_0^1 (1-x)^6 x^m dx.
RationalValue beta_integral_exact(int m);
/// 45 / (2^17 m^7).
RationalValue beta_lower_bound(int m);

struct BetaSuite {
    int m_max = 0;
    int first_failure = 0;  // 0 when every m passes
    bool pass = false;
};
BetaSuite beta_suite(int m_max = 1000);

/// Solution of (Delta - 2) u = -2 f for one angular mode on a uniform grid in
/// hyperbolic distance s, with u(s_max) = 0.
struct FdSolution {
    int mode = 0;
    double step = 0.0;
    std::vector<double> s;
    std::vector<double> u;
    /// Local cubic interpolation at Euclidean radius r.
    double at_radius(double r) const;
    double at_distance(double s) const;
};

/// Second-order conservative scheme; `f` is the full radial profile as a
/// function of hyperbolic distance. Requires cells >= 64.
FdSolution fd_resolvent(const std::function<double(double)>& f, int mode, int cells, double s_max = 24.0);
/// Richardson combination of the `cells` and `2 cells` solutions on the coarse grid.
FdSolution fd_resolvent_extrapolated(const std::function<double(double)>& f, int mode, int cells,
                                     double s_max = 24.0);

/// Green kernel of D as a function of hyperbolic distance: Q_1(cosh s) / pi.
double green(double s);

struct FormQuadrature {
    int radial_panels = 2;     // Gauss panels in the outer hyperbolic radius
    double outer_extent = 8.0;
    double inner_extent = 12.0;
    double inner_step = 1.0 / 16.0;  // double-exponential step in the inner distance
    double angular_scale = 36.0;  // ring size ~ scale / -log(|z| tanh(s / 2))
    int angular_min = 16;
    int angular_max = 2048;
    double tolerance = 1e-4;  // allowed relative gap between the nested coarse and fine rules
    int jobs = 4;
};

struct FormValue {
    double value = 0.0;
    double refinement_gap = 0.0;
};

/// Q(V, V) from the double-integral formula with kernel Psi(z, w) =
///   -4 S(z) S(w) - 2 |K(z, w)|^2 + 2 Re[K(z, w) K(w, z)],
/// S = Im F(z, z) + Re H(z, z), K = F + iH, integrated against G(z, w).
/// Batched so that the expensive geometry is shared. Throws when the nested
/// rules disagree beyond `tolerance`.
std::vector<FormValue> direct_quadratic_forms(const std::vector<WedgeVector>& vs, const FormQuadrature& q = {});
double direct_quadratic_form(const WedgeVector& v, const FormQuadrature& q = {});

}  // namespace wpc::oracle
