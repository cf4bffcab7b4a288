#pragma once

#include <string>
#include <vector>

#include "nf/nehari.hpp"

namespace nf {

struct ContinuationConfig {
    double dt_initial = 0.1;
    double dt_min = 1e-4;
    double newton_tol = 1e-8; ///< relative grid residual
    int newton_max_iter = 50;
    double r_guard_factor = 1e3; ///< guard = factor * inf-norm of the t=0 solution
    double r_guard = 0.0;        ///< absolute inf-norm guard; 0 derives it from the factor

    void validate() const;
};

/// Verification summary of a computed state.
struct SolveReport {
    double t = 1.0;
    std::vector<double> residual_norms;   ///< per component, cell-weighted L2
    std::vector<double> nehari_residuals; ///< per component
    std::vector<double> s_of_normalized;  ///< projection scalings of u/||u||
    std::vector<double> norms_h1;
    std::vector<double> min_values;
    std::vector<double> max_values;
    std::vector<double> overlaps; ///< int u_i+ u_j+ for i < j, row-major order
    double energy_j = 0.0;
    double psi0 = 0.0; ///< reduced energy of the normalized state (t = 0)
    double relative_residual = 0.0;
    bool residual_ok = false;
    bool nehari_ok = false;
    bool fully_nontrivial = false;
    bool strictly_positive = false;
    bool converged = false;
    int iterations = 0;
};

/// Strong-form residual field: component i is
/// -Lap u_i - mu_i (u_i+)^p - t sum_j lambda_ij (u_i+)^{alpha_ij}(u_j+)^{beta_ij}.
State residual_F(const SystemParams& params, const State& u, double t);

/// Cell-weighted L2 norm of a residual state over all components.
double residual_norm(const State& f);

/// Action of the semismooth linearization of residual_F at u on v.
State jacobian_apply(const SystemParams& params, const State& u, double t, const State& v);

/// Semismooth Newton with sparse direct linear solves and step halving.
State newton_solve(const SystemParams& params, const State& u0, double t,
                   const ContinuationConfig& cfg, int* iterations_out = nullptr);

struct TraceRow {
    double t = 0.0;
    std::vector<double> norms;
    std::vector<double> mins;
    std::vector<double> s;
    double residual = 0.0;
    int newton_iterations = 0;
};

struct ContinuationResult {
    State solution;      ///< t = 1 state
    State base;          ///< t = 0 uncoupled product solution
    std::vector<TraceRow> trace;
    double max_inf_norm = 0.0; ///< boundedness monitor over accepted steps
    double r_guard = 0.0;
};

/// Homotopy continuation from the uncoupled product of scalar ground states
/// to t_target (default 1), with manifold re-projection between accepted steps.
ContinuationResult continue_in_t(const SystemParams& params, const Domain& d,
                                 const ContinuationConfig& cfg, double t_target = 1.0);

/// Solves the k-mode spectral projection of the system; k = full mode count
/// reproduces newton_solve.
State galerkin_solve(const SystemParams& params, std::size_t k, double t,
                     const ContinuationConfig& cfg, const Domain& d);

SolveReport verify_solution(const SystemParams& params, const State& u, double t);

struct SweepPoint {
    double multiplier = 1.0;
    bool converged = false;
    SolveReport report;
    std::string error;
};

/// Re-solves with lambda_ij <- kappa * lambda_ij for each ascending kappa,
/// warm-starting from the previous point; failures are recorded per point.
std::vector<SweepPoint> lambda_sweep(const SystemParams& params,
                                     const std::vector<double>& multipliers, const Domain& d,
                                     const ContinuationConfig& cfg);

} // namespace nf
