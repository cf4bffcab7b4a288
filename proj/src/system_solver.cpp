#include "nf/system_solver.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>

#include "nf/kernels.hpp"
#include "nf/scalar_solver.hpp"
#include "sparse_stencil.hpp"

namespace nf {

namespace {

// Clamp floor for linearizing positive-part powers with exponent < 1.
constexpr double power_clamp = 1e-12;

double pos(double x) { return x > 0.0 ? x : 0.0; }

double pow_clamped(double base, double expo) {
    if (expo < 0.0) base = std::max(base, power_clamp);
    return std::pow(base, expo);
}

// Nodal weights W_ij = dN_i/du_j of the nonlinearity, positive-part
// derivative taken as 0 at nonpositive nodes. Returned row-major [i*ell+j].
std::vector<GridFunction> jacobian_weights(const SystemParams& params, const State& u, double t) {
    const int ell = params.ell;
    const std::size_t n = u.domain().node_count();
    std::vector<GridFunction> w(static_cast<std::size_t>(ell) * ell, GridFunction(u.domain()));

    for (int i = 0; i < ell; ++i) {
        double* wii = w[static_cast<std::size_t>(i) * ell + i].values().data();
        const double* ui = u[i].values().data();
        const double mu = params.mu[i];
        const double p = params.p;
        kernels::indexed_map(n, wii, [ui, mu, p](std::size_t k) {
            return ui[k] > 0.0 ? p * mu * std::pow(ui[k], p - 1.0) : 0.0;
        });
        if (t == 0.0) continue;
        for (int j = 0; j < ell; ++j) {
            if (j == i || params.lam(i, j) == 0.0) continue;
            const double* uj = u[j].values().data();
            const double tl = t * params.lam(i, j);
            const double aij = params.al(i, j);
            const double bij = params.be(i, j);
            kernels::indexed_map(n, wii, [wii, ui, uj, tl, aij, bij](std::size_t k) {
                const double vi = pos(ui[k]);
                const double vj = pos(uj[k]);
                if (vi == 0.0 || vj == 0.0) return wii[k];
                return wii[k] + tl * aij * pow_clamped(vi, aij - 1.0) * std::pow(vj, bij);
            });
            double* wij = w[static_cast<std::size_t>(i) * ell + j].values().data();
            kernels::indexed_map(n, wij, [ui, uj, tl, aij, bij](std::size_t k) {
                const double vi = pos(ui[k]);
                const double vj = pos(uj[k]);
                if (vi == 0.0 || vj == 0.0) return 0.0;
                return tl * bij * std::pow(vi, aij) * pow_clamped(vj, bij - 1.0);
            });
        }
    }
    return w;
}

} // namespace

void ContinuationConfig::validate() const {
    if (!(dt_min > 0.0) || !(dt_initial >= dt_min) || !(dt_initial <= 1.0))
        throw InvalidParamsError("continuation needs 0 < dt_min <= dt_initial <= 1");
    if (!(newton_tol > 0.0) || newton_max_iter < 1)
        throw InvalidParamsError("continuation needs a positive Newton tolerance and iteration cap");
    if (r_guard < 0.0 || !(r_guard_factor > 0.0))
        throw InvalidParamsError("continuation needs a positive bound guard");
}

State residual_F(const SystemParams& params, const State& u, double t) {
    State f = nonlinearity(params, u, t);
    for (int i = 0; i < params.ell; ++i) {
        GridFunction lap = laplacian_apply(u[i]);
        lap -= f[i];
        f[i] = std::move(lap);
    }
    return f;
}

double residual_norm(const State& f) {
    double sq = 0.0;
    for (int i = 0; i < f.size(); ++i) {
        const double r = l2_norm(f[i]);
        sq += r * r;
    }
    return std::sqrt(sq);
}

State jacobian_apply(const SystemParams& params, const State& u, double t, const State& v) {
    const std::vector<GridFunction> w = jacobian_weights(params, u, t);
    const int ell = params.ell;
    State out(u.domain(), ell);
    for (int i = 0; i < ell; ++i) {
        GridFunction row = laplacian_apply(v[i]);
        for (int j = 0; j < ell; ++j) {
            const GridFunction& wij = w[static_cast<std::size_t>(i) * ell + j];
            const double* wv = wij.values().data();
            const double* vv = v[j].values().data();
            double* rv = row.values().data();
            kernels::indexed_map(row.size(), rv, [rv, wv, vv](std::size_t k) {
                return rv[k] - wv[k] * vv[k];
            });
        }
        out[i] = std::move(row);
    }
    return out;
}

State newton_solve(const SystemParams& params, const State& u0, double t,
                   const ContinuationConfig& cfg, int* iterations_out) {
    cfg.validate();
    if (iterations_out) *iterations_out = 0;
    const Domain& d = u0.domain();
    const int ell = params.ell;
    const auto n = static_cast<int>(d.node_count());
    const int total = ell * n;

    std::vector<detail::Triplet> stencil;
    stencil.reserve(static_cast<std::size_t>(total) * 5);
    for (int i = 0; i < ell; ++i)
        detail::add_neg_laplacian(d, static_cast<std::size_t>(i) * n, stencil);

    Eigen::SparseMatrix<double> jac(total, total);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    Eigen::VectorXd rhs(total), delta(total);

    State u = u0;
    State f = residual_F(params, u, t);
    double res = residual_norm(f);

    for (int it = 0; it < cfg.newton_max_iter; ++it) {
        if (res <= cfg.newton_tol * u.h_norm()) return u;
        if (iterations_out) *iterations_out = it + 1;

        const std::vector<GridFunction> w = jacobian_weights(params, u, t);
        std::vector<detail::Triplet> entries = stencil;
        for (int i = 0; i < ell; ++i) {
            for (int j = 0; j < ell; ++j) {
                const GridFunction& wij = w[static_cast<std::size_t>(i) * ell + j];
                for (int k = 0; k < n; ++k) {
                    const double v = wij[static_cast<std::size_t>(k)];
                    if (v != 0.0) entries.emplace_back(i * n + k, j * n + k, -v);
                }
            }
            for (int k = 0; k < n; ++k) rhs(i * n + k) = -f[i][static_cast<std::size_t>(k)];
        }
        jac.setFromTriplets(entries.begin(), entries.end());
        lu.compute(jac);
        if (lu.info() != Eigen::Success)
            throw SingularJacobianError("system Newton linearization is singular");
        delta = lu.solve(rhs);

        double step = 1.0;
        bool accepted = false;
        for (int half = 0; half < 10; ++half) {
            State trial = u;
            for (int i = 0; i < ell; ++i)
                for (int k = 0; k < n; ++k)
                    trial[i][static_cast<std::size_t>(k)] += step * delta(i * n + k);
            State ft = residual_F(params, trial, t);
            const double rt = residual_norm(ft);
            if (rt < res) {
                u = std::move(trial);
                f = std::move(ft);
                res = rt;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted)
            throw DivergenceError("system Newton residual failed to decrease over 10 halvings");
        if (cfg.r_guard > 0.0 && u.inf_norm() > cfg.r_guard)
            throw BoundGuardError("system Newton iterate exceeded the amplitude guard");
    }
    if (res <= cfg.newton_tol * u.h_norm()) return u;
    throw NonConvergenceError("system Newton hit its iteration cap");
}

namespace {

TraceRow make_trace_row(const SystemParams& params, const State& u, double t, int iters) {
    TraceRow row;
    row.t = t;
    row.newton_iterations = iters;
    for (int i = 0; i < params.ell; ++i) {
        row.norms.push_back(h1_norm(u[i]));
        row.mins.push_back(min_value(u[i]));
    }
    row.s = project_to_nehari(params, normalize_to_sphere(u), t).s;
    row.residual = residual_norm(residual_F(params, u, t));
    return row;
}

} // namespace

ContinuationResult continue_in_t(const SystemParams& params, const Domain& d,
                                 const ContinuationConfig& cfg, double t_target) {
    params.validate();
    cfg.validate();
    if (!(t_target >= 0.0 && t_target <= 1.0))
        throw InvalidParamsError("homotopy target must lie in [0, 1]");

    std::vector<GridFunction> comps;
    comps.reserve(params.ell);
    for (int i = 0; i < params.ell; ++i)
        comps.push_back(least_energy_scalar(params.mu[i], params.p, d));
    State u{std::move(comps)};

    ContinuationResult out{u, u, {}, u.inf_norm(), 0.0};
    out.r_guard = cfg.r_guard > 0.0 ? cfg.r_guard : cfg.r_guard_factor * u.inf_norm();

    ContinuationConfig step_cfg = cfg;
    step_cfg.r_guard = out.r_guard;

    out.trace.push_back(make_trace_row(params, u, 0.0, 0));

    double t = 0.0;
    double dt = cfg.dt_initial;
    while (t < t_target - 1e-14) {
        const double t_next = t + dt >= t_target - 1e-14 ? t_target : t + dt;
        bool ok = false;
        int iters = 0;
        try {
            const State guess = project_to_nehari(params, normalize_to_sphere(u), t_next).su;
            State u_next = newton_solve(params, guess, t_next, step_cfg, &iters);
            if (u_next.inf_norm() > out.r_guard)
                throw BoundGuardError("accepted continuation state exceeded the amplitude guard");
            u = std::move(u_next);
            t = t_next;
            ok = true;
        } catch (const BoundGuardError&) {
            throw;
        } catch (const Error&) {
            ok = false;
        }
        if (ok) {
            out.max_inf_norm = std::max(out.max_inf_norm, u.inf_norm());
            out.trace.push_back(make_trace_row(params, u, t, iters));
            dt = std::min(cfg.dt_initial, 2.0 * dt);
        } else {
            dt *= 0.5;
            if (dt < cfg.dt_min)
                throw StepFloorError("continuation stalled at its step floor; last good t = " +
                                         std::to_string(t),
                                     t);
        }
    }

    const NontrivialityReport check = fully_nontrivial_check(params, u, t_target);
    if (!check.fully_nontrivial)
        throw NonConvergenceError("continuation terminated at a semitrivial state");
    out.solution = std::move(u);
    return out;
}

namespace {

struct GalerkinBasis {
    std::vector<GridFunction> fields;
    std::vector<double> eigenvalues;
};

GalerkinBasis build_basis(const Domain& d, std::size_t k) {
    const auto& modes = mode_table(d);
    if (k < 1 || k > modes.size())
        throw InvalidParamsError("galerkin mode count out of range");
    GalerkinBasis basis;
    basis.fields.reserve(k);
    basis.eigenvalues.reserve(k);
    for (std::size_t m = 0; m < k; ++m) {
        basis.fields.push_back(mode_field(d, modes[m]));
        basis.eigenvalues.push_back(modes[m].eigenvalue);
    }
    return basis;
}

State synthesize_state(const Domain& d, const SystemParams& params, const GalerkinBasis& basis,
                       const Eigen::VectorXd& coeffs) {
    const auto k = basis.fields.size();
    std::vector<GridFunction> comps;
    comps.reserve(params.ell);
    for (int i = 0; i < params.ell; ++i) {
        GridFunction c(d);
        for (std::size_t m = 0; m < k; ++m)
            c.axpy(coeffs(static_cast<long>(i * k + m)), basis.fields[m]);
        comps.push_back(std::move(c));
    }
    return State(std::move(comps));
}

Eigen::VectorXd galerkin_residual(const SystemParams& params, const GalerkinBasis& basis,
                                  const Eigen::VectorXd& coeffs, const State& u, double t) {
    const auto k = basis.fields.size();
    State rhs = nonlinearity(params, u, t);
    Eigen::VectorXd r(static_cast<long>(params.ell * k));
    for (int i = 0; i < params.ell; ++i)
        for (std::size_t m = 0; m < k; ++m)
            r(static_cast<long>(i * k + m)) =
                basis.eigenvalues[m] * coeffs(static_cast<long>(i * k + m)) -
                l2_inner(rhs[i], basis.fields[m]);
    return r;
}

// Newton on the projected equations in coefficient space at fixed t.
Eigen::VectorXd galerkin_newton(const SystemParams& params, const Domain& d,
                                const GalerkinBasis& basis, Eigen::VectorXd coeffs, double t,
                                int max_iter) {
    const auto k = basis.fields.size();
    const int ell = params.ell;
    const auto total = static_cast<long>(ell * k);
    const std::size_t n = d.node_count();

    State u = synthesize_state(d, params, basis, coeffs);
    Eigen::VectorXd r = galerkin_residual(params, basis, coeffs, u, t);
    double res = r.norm();

    Eigen::MatrixXd jac(total, total);
    GridFunction scratch(d);

    for (int it = 0; it < max_iter; ++it) {
        double scale = 0.0;
        for (int i = 0; i < ell; ++i)
            for (std::size_t m = 0; m < k; ++m) {
                const double lc = basis.eigenvalues[m] * coeffs(static_cast<long>(i * k + m));
                scale += lc * lc;
            }
        if (res <= 1e-12 * std::max(1.0, std::sqrt(scale))) return coeffs;

        const std::vector<GridFunction> w = jacobian_weights(params, u, t);
        jac.setZero();
        for (int j = 0; j < ell; ++j) {
            for (std::size_t mp = 0; mp < k; ++mp) {
                const long col = static_cast<long>(j * k + mp);
                jac(col, col) += basis.eigenvalues[mp];
                const double* phi_mp = basis.fields[mp].values().data();
                for (int i = 0; i < ell; ++i) {
                    const GridFunction& wij = w[static_cast<std::size_t>(i) * ell + j];
                    const double* wv = wij.values().data();
                    double* sv = scratch.values().data();
                    kernels::indexed_map(n, sv, [wv, phi_mp](std::size_t x) {
                        return wv[x] * phi_mp[x];
                    });
                    for (std::size_t m = 0; m < k; ++m)
                        jac(static_cast<long>(i * k + m), col) -=
                            l2_inner(scratch, basis.fields[m]);
                }
            }
        }

        Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
        Eigen::VectorXd delta = lu.solve(-r);
        if (!delta.allFinite())
            throw SingularJacobianError("galerkin linearization is singular");

        double step = 1.0;
        bool accepted = false;
        for (int half = 0; half < 10; ++half) {
            Eigen::VectorXd trial = coeffs + step * delta;
            State ut = synthesize_state(d, params, basis, trial);
            Eigen::VectorXd rt = galerkin_residual(params, basis, trial, ut, t);
            if (rt.norm() < res) {
                coeffs = std::move(trial);
                u = std::move(ut);
                r = std::move(rt);
                res = r.norm();
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted)
            throw DivergenceError("galerkin Newton residual failed to decrease over 10 halvings");
    }
    throw NonConvergenceError("galerkin Newton hit its iteration cap");
}

} // namespace

State galerkin_solve(const SystemParams& params, std::size_t k, double t,
                     const ContinuationConfig& cfg, const Domain& d) {
    params.validate();
    cfg.validate();
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidParamsError("homotopy parameter must lie in [0, 1]");
    const GalerkinBasis basis = build_basis(d, k);

    // Start from the truncation of the uncoupled product solution.
    Eigen::VectorXd coeffs(static_cast<long>(params.ell * k));
    for (int i = 0; i < params.ell; ++i) {
        const GridFunction ui = least_energy_scalar(params.mu[i], params.p, d);
        const std::vector<double> c = spectral_transform(ui);
        for (std::size_t m = 0; m < k; ++m)
            coeffs(static_cast<long>(i * k + m)) = c[m];
    }

    try {
        coeffs = galerkin_newton(params, d, basis, coeffs, t, cfg.newton_max_iter);
    } catch (const Error&) {
        // Fall back to continuation in t within the coefficient space.
        double tc = 0.0;
        double dt = std::max(cfg.dt_initial, cfg.dt_min);
        coeffs = galerkin_newton(params, d, basis, coeffs, 0.0, cfg.newton_max_iter);
        while (tc < t - 1e-14) {
            const double t_next = std::min(t, tc + dt);
            try {
                coeffs = galerkin_newton(params, d, basis, coeffs, t_next, cfg.newton_max_iter);
                tc = t_next;
                dt = std::min(cfg.dt_initial, 2.0 * dt);
            } catch (const Error&) {
                dt *= 0.5;
                if (dt < cfg.dt_min)
                    throw StepFloorError("galerkin continuation stalled at its step floor", tc);
            }
        }
    }
    return synthesize_state(d, params, basis, coeffs);
}

SolveReport verify_solution(const SystemParams& params, const State& u, double t) {
    SolveReport report;
    report.t = t;

    const State f = residual_F(params, u, t);
    for (int i = 0; i < params.ell; ++i) {
        report.residual_norms.push_back(l2_norm(f[i]));
        report.norms_h1.push_back(h1_norm(u[i]));
        report.min_values.push_back(min_value(u[i]));
        report.max_values.push_back(max_value(u[i]));
    }
    report.nehari_residuals = nehari_residual(params, u, t);
    for (int i = 0; i < params.ell; ++i)
        for (int j = i + 1; j < params.ell; ++j)
            report.overlaps.push_back(pos_power_product_integral(u[i], 1.0, u[j], 1.0));
    report.energy_j = energy_J(params, u);

    const double unorm = u.h_norm();
    report.relative_residual = unorm > 0.0 ? residual_norm(f) / unorm : residual_norm(f);
    report.residual_ok = report.relative_residual <= 1e-8;

    double a_max = 0.0;
    for (double nrm : report.norms_h1) a_max = std::max(a_max, nrm * nrm);
    double worst_nehari = 0.0;
    for (double r : report.nehari_residuals) worst_nehari = std::max(worst_nehari, std::abs(r));
    report.nehari_ok = worst_nehari <= 1e-8 * std::max(a_max, 1e-300);

    const NontrivialityReport check = fully_nontrivial_check(params, u, t);
    report.fully_nontrivial = check.fully_nontrivial;
    report.strictly_positive = true;
    for (int i = 0; i < params.ell; ++i)
        report.strictly_positive = report.strictly_positive && report.min_values[i] > 0.0;

    try {
        const State nu = normalize_to_sphere(u);
        report.s_of_normalized = project_to_nehari(params, nu, t).s;
        report.psi0 = psi(params, nu);
    } catch (const Error&) {
        report.s_of_normalized.clear();
        report.psi0 = 0.0;
    }

    report.converged = report.residual_ok && report.nehari_ok && report.fully_nontrivial;
    return report;
}

namespace {

SystemParams scaled_lambda(const SystemParams& params, double kappa) {
    SystemParams out = params;
    for (double& l : out.lambda) l *= kappa;
    return out;
}

} // namespace

std::vector<SweepPoint> lambda_sweep(const SystemParams& params,
                                     const std::vector<double>& multipliers, const Domain& d,
                                     const ContinuationConfig& cfg) {
    params.validate();
    if (multipliers.empty()) throw InvalidParamsError("lambda sweep needs at least one multiplier");
    for (std::size_t i = 0; i < multipliers.size(); ++i) {
        if (multipliers[i] < 1.0) throw InvalidParamsError("sweep multipliers must be >= 1");
        if (i > 0 && multipliers[i] <= multipliers[i - 1])
            throw InvalidParamsError("sweep multipliers must be strictly ascending");
    }

    std::vector<SweepPoint> points;
    points.reserve(multipliers.size());

    ContinuationResult base = continue_in_t(scaled_lambda(params, multipliers.front()), d, cfg);
    State current = base.solution;
    double current_kappa = multipliers.front();
    {
        SweepPoint pt;
        pt.multiplier = multipliers.front();
        pt.report = verify_solution(scaled_lambda(params, multipliers.front()), current, 1.0);
        pt.converged = pt.report.converged;
        points.push_back(std::move(pt));
    }

    ContinuationConfig step_cfg = cfg;
    step_cfg.r_guard = cfg.r_guard > 0.0 ? cfg.r_guard : cfg.r_guard_factor * base.base.inf_norm();

    for (std::size_t idx = 1; idx < multipliers.size(); ++idx) {
        const double target = multipliers[idx];
        SweepPoint pt;
        pt.multiplier = target;
        try {
            // Advance kappa with bisection on failure, warm-starting throughout.
            double reached = current_kappa;
            State u = current;
            double span = target - reached;
            int attempts = 0;
            while (reached < target - 1e-12) {
                const double next = std::min(target, reached + span);
                try {
                    u = newton_solve(scaled_lambda(params, next), u, 1.0, step_cfg);
                    reached = next;
                    span = std::min(target - reached, 2.0 * span);
                } catch (const Error&) {
                    span *= 0.5;
                    if (++attempts > 60 || span < 1e-8 * target)
                        throw NonConvergenceError("sweep point did not converge");
                }
            }
            current = std::move(u);
            current_kappa = target;
            pt.report = verify_solution(scaled_lambda(params, target), current, 1.0);
            pt.converged = pt.report.converged;
        } catch (const Error& e) {
            pt.converged = false;
            pt.error = e.what();
        }
        points.push_back(std::move(pt));
    }
    return points;
}

} // namespace nf

