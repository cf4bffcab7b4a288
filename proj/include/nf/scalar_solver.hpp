#pragma once

#include "nf/grid.hpp"

namespace nf {

/// Positive least-energy solution of -Lap u = mu (u+)^p, Dirichlet zero.
/// Deterministic: initialized from the first eigenmode scaled onto the
/// scalar constraint manifold, then damped Newton with re-projection.
GridFunction least_energy_scalar(double mu, double p, const Domain& d);

/// Nonnegative nontrivial solution of -Lap w + a (w+)^q = mu (w+)^p with
/// 1 < q < p, a >= 0: constrained energy minimization (projected gradient)
/// polished by Newton on the strong form.
GridFunction two_term_scalar(double mu, double p, double a, double q, const Domain& d);

/// Unique t > 0 with t*norm_sq + aA*t^q = muB*t^p; relative residual <= 1e-13.
double unique_scaling_root(double norm_sq, double aA, double muB, double p, double q);

/// Energy of the two-term equation:
/// 1/2 ||w||^2 + a/(q+1) int (w+)^{q+1} - mu/(p+1) int (w+)^{p+1}.
double two_term_energy(const GridFunction& w, double mu, double p, double a, double q);

} // namespace nf
