#pragma once

#include <span>
#include <vector>

#include "nf/errors.hpp"

namespace nf {

/// Coefficients of the componentwise map
///   M_i(s) = a_i s_i - b_i s_i^p + sum_{j != i} d_ij s_i^{alpha_ij} s_j^{beta_ij}
/// on (0, inf)^ell. Matrices are ell x ell row-major with an unused diagonal.
struct ScalingCoeffs {
    int ell = 1;
    double p = 3.0;
    std::vector<double> a;     ///< a_i > 0
    std::vector<double> b;     ///< b_i >= 0
    std::vector<double> d;     ///< d_ij >= 0
    std::vector<double> alpha; ///< alpha_ij > 0
    std::vector<double> beta;  ///< beta_ij > 0, alpha_ij + beta_ij < p

    double dd(int i, int j) const { return d[static_cast<std::size_t>(i) * ell + j]; }
    double al(int i, int j) const { return alpha[static_cast<std::size_t>(i) * ell + j]; }
    double be(int i, int j) const { return beta[static_cast<std::size_t>(i) * ell + j]; }

    /// Throws InvalidParamsError when a sign or exponent constraint is violated.
    void validate() const;

    /// Decoupled helper: all d_ij = 0, alpha = beta = 1.
    static ScalingCoeffs decoupled(std::vector<double> a, std::vector<double> b, double p);
};

std::vector<double> eval_scaling_map(const ScalingCoeffs& c, std::span<const double> s);

/// Analytic Jacobian of the map, ell x ell row-major.
std::vector<double> scaling_jacobian(const ScalingCoeffs& c, std::span<const double> s);

struct ScalingBracket {
    double r = 0.0; ///< every M_i > 0 while s_i <= r
    double R = 0.0; ///< M_i < 0 whenever s_i = max_j s_j >= R
};

/// Bracketing box of the unique zero; requires every b_i > 0.
ScalingBracket scaling_bracket(const ScalingCoeffs& c);

/// Unique positive zero, |M_i| <= 1e-12 * max(a_i). Damped Newton from the
/// box midpoint with clipping into [r/2, 2R], monotone fixed-point fallback.
std::vector<double> solve_scaling(const ScalingCoeffs& c);

/// Same iteration started from a caller-supplied point (multi-start checks).
std::vector<double> solve_scaling_from(const ScalingCoeffs& c, std::span<const double> start);

/// Sign of det(J(s*)) in {-1, 0, +1}; 0 flags a numerically degenerate zero.
int degree_sign_check(const ScalingCoeffs& c, std::span<const double> s_star);

/// Max-norm distance between the zeros of two coefficient sets. The zero of
/// c may be passed in to avoid recomputation.
double continuity_probe(const ScalingCoeffs& c, const ScalingCoeffs& c_prime,
                        std::span<const double> s_of_c = {});

} // namespace nf
