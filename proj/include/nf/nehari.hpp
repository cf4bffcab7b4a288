#pragma once

#include <span>
#include <string>
#include <vector>

#include "nf/grid.hpp"
#include "nf/scaling_map.hpp"

namespace nf {

/// Parameters of the coupled competitive system
///   -Lap u_i = mu_i (u_i+)^p + t * sum_{j != i} lambda_ij (u_i+)^{alpha_ij} (u_j+)^{beta_ij}.
/// Matrices are ell x ell row-major; diagonals are ignored. The homotopy
/// parameter t is supplied per call, not stored.
struct SystemParams {
    int ell = 2;
    double p = 3.0;
    std::vector<double> mu;     ///< mu_i > 0
    std::vector<double> lambda; ///< lambda_ij < 0 (0 permitted, decouples with a warning)
    std::vector<double> alpha;  ///< alpha_ij > 0
    std::vector<double> beta;   ///< beta_ij > 0, alpha_ij + beta_ij < p

    double lam(int i, int j) const { return lambda[static_cast<std::size_t>(i) * ell + j]; }
    double al(int i, int j) const { return alpha[static_cast<std::size_t>(i) * ell + j]; }
    double be(int i, int j) const { return beta[static_cast<std::size_t>(i) * ell + j]; }

    void validate() const;
    std::vector<std::string> warnings() const;

    /// Lotka-Volterra interaction (alpha = beta = 1) with a common coupling.
    static SystemParams lotka_volterra(int ell, double p, std::vector<double> mu, double lambda_off);
};

/// Tuple of grid functions on a shared domain, one per species.
class State {
public:
    explicit State(std::vector<GridFunction> components);
    State(const Domain& d, int ell);

    int size() const { return static_cast<int>(comps_.size()); }
    const Domain& domain() const { return comps_.front().domain(); }
    GridFunction& operator[](int i) { return comps_[static_cast<std::size_t>(i)]; }
    const GridFunction& operator[](int i) const { return comps_[static_cast<std::size_t>(i)]; }

    State& operator+=(const State& o);
    State& operator-=(const State& o);
    State& operator*=(double s);
    State& axpy(double s, const State& o);

    /// sqrt(sum_i ||u_i||_H^2), the product-space Dirichlet norm.
    double h_norm() const;
    double inf_norm() const;

private:
    std::vector<GridFunction> comps_;
};

/// Positive parts below this integral threshold count as vanished (edge of
/// the admissible set).
inline constexpr double boundary_b_threshold = 1e-14;

/// Nodal nonlinearity N_i(u); the i-th equation reads -Lap u_i = N_i(u).
State nonlinearity(const SystemParams& params, const State& u, double t);

/// Coefficients of the scaling map attached to u: a_i = ||u_i||^2,
/// b_i = mu_i * int (u_i+)^{p+1}, d_ij = t(-lambda_ij) int (u_i+)^{alpha_ij+1}(u_j+)^{beta_ij}.
ScalingCoeffs coeffs_from_state(const SystemParams& params, const State& u, double t);

/// Componentwise (-Lap)^{-1} of the nonlinearity.
State K_apply(const SystemParams& params, const State& u, double t);

/// Component i: <u_i - K_i(u), u_i> in the Dirichlet form; all zero iff u is
/// on the constraint manifold (given no component vanishes).
std::vector<double> nehari_residual(const SystemParams& params, const State& u, double t);

/// Each component divided by its Dirichlet norm.
State normalize_to_sphere(const State& u);

struct NehariProjection {
    std::vector<double> s;
    State su;
};

/// Unique componentwise scaling that places a sphere state on the manifold.
NehariProjection project_to_nehari(const SystemParams& params, const State& sphere_u, double t);

/// S(u) = s_u u - K(s_u u); tangent to the sphere at u.
State S_map(const SystemParams& params, const State& sphere_u, double t);

/// Uncoupled energy: 1/2 sum ||u_i||^2 - 1/(p+1) sum mu_i int (u_i+)^{p+1}.
double energy_J(const SystemParams& params, const State& u);

/// Reduced energy on the sphere via the closed form
/// (1/2 - 1/(p+1)) * sum_i (mu_i int (u_i+)^{p+1})^{-2/(p-1)}.
double psi(const SystemParams& params, const State& sphere_u);

struct ComponentCheck {
    double norm_h1 = 0.0;
    double mu_lp = 0.0;            ///< mu_i int (u_i+)^{p+1}
    double k_pairing = 0.0;        ///< <K_i(u), u_i>
    double nehari_residual = 0.0;  ///< ||u_i||^2 - k_pairing
    double sobolev_quotient = 0.0; ///< ||u_i||^{p+1} / (mu_i int (u_i+)^{p+1})
    double min_value = 0.0;
    double max_value = 0.0;
    bool nontrivial = false;
    bool chain_ok = false; ///< ||u_i||^2 <= mu_i int (u_i+)^{p+1} (+tolerance)
};

struct NontrivialityReport {
    std::vector<ComponentCheck> components;
    bool fully_nontrivial = false;
    bool on_manifold = false;
};

NontrivialityReport fully_nontrivial_check(const SystemParams& params, const State& u, double t = 1.0);

} // namespace nf
