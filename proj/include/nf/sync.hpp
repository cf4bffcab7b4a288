#pragma once

#include <string>
#include <vector>

#include "nf/nehari.hpp"
#include "nf/scalar_solver.hpp"

namespace nf {

/// Outcome of the synchronized-existence criterion for a 2-species system.
struct SyncVerdict {
    bool holds = false;
    double q = 0.0;   ///< common interaction exponent sum (when defined)
    double a = 0.0;   ///< -lambda_12 (mu_1/mu_2)^{beta_12/(p-1)}
    double rho = 0.0; ///< component ratio (mu_1/mu_2)^{1/(p-1)}
    std::string failure_reason;
};

/// Holds iff alpha_12+beta_12 = alpha_21+beta_21 (1e-12) and
/// lambda_12/lambda_21 = (mu_1/mu_2)^{(alpha_21-beta_12-1)/(p-1)} (1e-10 rel).
SyncVerdict sync_criterion(const SystemParams& params);

/// Builds the synchronized pair (w, rho*w) from the shared-profile equation
/// -Lap w + a (w+)^q = mu_1 (w+)^p. Throws CriterionError when the criterion fails.
State sync_solve(const SystemParams& params, const Domain& d);

struct UnboundedRow {
    double a = 0.0;
    double norm_w = 0.0;  ///< Dirichlet norm
    double int_wq1 = 0.0; ///< int (w+)^{q+1}
    double int_wp1 = 0.0; ///< int (w+)^{p+1}
    double residual = 0.0; ///< grid residual relative to the Dirichlet norm
    bool converged = false;
    std::string error;
};

struct UnboundedResult {
    std::vector<UnboundedRow> rows;
    bool norms_strictly_increasing = false; ///< over consecutive converged rows
    bool nehari_identity_ok = false;        ///< ||w||^2 + a*int_wq1 = mu*int_wp1 per row
};

/// Solves the shared-profile equation for each coefficient in a_list and
/// tabulates the growth of the solutions. Rows are independent; `workers`
/// bounds the number solved concurrently.
UnboundedResult unboundedness_experiment(double mu, double p, double q,
                                         const std::vector<double>& a_list, const Domain& d,
                                         int workers = 1);

/// Best synchronized approximation (t1 w, t2 w) of a two-component state in
/// the Dirichlet inner product (rank-one fit); (t1, t2) has unit length.
struct SynchronizedFit {
    double t1 = 0.0;
    double t2 = 0.0;
    GridFunction w;
};

SynchronizedFit synchronized_fit(const State& u);

} // namespace nf
