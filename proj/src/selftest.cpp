#include "nf/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <vector>

#include "nf/kernels.hpp"
#include "nf/scalar_solver.hpp"
#include "nf/sync.hpp"
#include "nf/system_solver.hpp"

namespace nf {

namespace {

class Harness {
public:
    Harness(std::ostream& out, const std::map<std::string, double>& overrides)
        : out_(out), overrides_(overrides) {}

    double tolerance(const std::string& name, double fallback) const {
        const auto it = overrides_.find(name);
        return it == overrides_.end() ? fallback : it->second;
    }

    /// Record a "measured <= tol" invariant.
    void check(const std::string& name, double measured, double default_tol) {
        const double tol = tolerance(name, default_tol);
        char buf[64];
        std::snprintf(buf, sizeof buf, " measured=%.3g tol=%.3g", measured, tol);
        record(name, measured <= tol, buf);
    }

    void check_flag(const std::string& name, bool ok, const std::string& detail = "") {
        record(name, ok, detail.empty() ? "" : " " + detail);
    }

    void record(const std::string& name, bool ok, const std::string& detail) {
        ++total_;
        passed_ += ok ? 1 : 0;
        out_ << (ok ? "[PASS] " : "[FAIL] ") << name << detail << "\n";
    }

    bool summary() {
        out_ << "selftest: " << passed_ << "/" << total_ << " invariants passed\n";
        return passed_ == total_;
    }

private:
    std::ostream& out_;
    const std::map<std::string, double>& overrides_;
    int total_ = 0;
    int passed_ = 0;
};

GridFunction random_field(const Domain& d, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    GridFunction f(d);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = dist(rng);
    return f;
}

ScalingCoeffs random_coeffs(int ell, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ScalingCoeffs c;
    c.ell = ell;
    c.p = 2.5 + 1.5 * unit(rng);
    const auto nn = static_cast<std::size_t>(ell) * ell;
    c.a.resize(ell);
    c.b.resize(ell);
    c.d.assign(nn, 0.0);
    c.alpha.assign(nn, 1.0);
    c.beta.assign(nn, 1.0);
    for (int i = 0; i < ell; ++i) {
        c.a[i] = 0.5 + 1.5 * unit(rng);
        c.b[i] = 0.5 + 1.5 * unit(rng);
        for (int j = 0; j < ell; ++j) {
            if (j == i) continue;
            c.d[static_cast<std::size_t>(i) * ell + j] = 1.2 * unit(rng);
            double al = 0.3 + 0.9 * unit(rng);
            double be = 0.3 + 0.9 * unit(rng);
            const double cap = 0.9 * c.p;
            if (al + be >= cap) {
                const double f = cap / (al + be);
                al *= f;
                be *= f;
            }
            c.alpha[static_cast<std::size_t>(i) * ell + j] = al;
            c.beta[static_cast<std::size_t>(i) * ell + j] = be;
        }
    }
    return c;
}

// Random low-mode sphere state with a dominant positive ground mode; keeps
// the attached coefficients O(1) so absolute tolerances are meaningful.
State random_sphere_state(const SystemParams& params, const Domain& d, std::mt19937_64& rng) {
    const std::size_t k = std::min<std::size_t>(8, mode_table(d).size());
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<GridFunction> comps;
    comps.reserve(params.ell);
    for (int i = 0; i < params.ell; ++i) {
        std::vector<double> coeffs(k);
        coeffs[0] = 1.0 + 0.5 * std::abs(unit(rng));
        for (std::size_t m = 1; m < k; ++m) coeffs[m] = 0.3 * unit(rng);
        comps.push_back(spectral_synthesize(d, coeffs));
    }
    return normalize_to_sphere(State(std::move(comps)));
}

double rel(double measured, double scale) { return std::abs(measured) / std::max(scale, 1e-300); }

void grid_invariants(Harness& h, const Domain& d, std::mt19937_64& rng) {
    // Deterministic blocked reduction vs the naive serial oracle.
    {
        std::vector<double> x(200000);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        for (double& v : x) v = dist(rng);
        const double blocked = kernels::indexed_sum(x.size(), [&](std::size_t i) { return x[i]; });
        const double naive =
            kernels::indexed_sum_serial(x.size(), [&](std::size_t i) { return x[i]; });
        h.check("kernels.blocked_sum", rel(blocked - naive, std::abs(naive)), 1e-12);

        kernels::set_parallel(false);
        const double blocked_off =
            kernels::indexed_sum(x.size(), [&](std::size_t i) { return x[i]; });
        kernels::set_parallel(true);
        h.check_flag("kernels.thread_count_invariance", blocked == blocked_off);
    }

    const GridFunction f = random_field(d, rng);
    const GridFunction g = random_field(d, rng);

    const double fg = h1_inner(f, g);
    const double gf = h1_inner(g, f);
    h.check("grid.laplacian_symmetry", rel(fg - gf, std::abs(fg)), 1e-12);
    h.check_flag("grid.laplacian_positive", h1_inner(f, f) > 0.0);

    const GridFunction round_trip = poisson_solve(laplacian_apply(f));
    GridFunction diff = round_trip;
    diff -= f;
    h.check("grid.inverse_pair", l2_norm(diff) / l2_norm(f), 1e-10);

    const GridFunction phi = first_eigenmode(d);
    const double lam1 = mode_table(d).front().eigenvalue;
    GridFunction eig = laplacian_apply(phi);
    eig.axpy(-lam1, phi);
    h.check("grid.eigenpair_identity", l2_norm(eig) / lam1, 1e-13);

    // Order-2 convergence of the quadratures on an analytic function. The
    // r = 1 integral carries the O(h^2) boundary term; higher powers of a
    // Dirichlet-zero function converge faster.
    {
        auto poly = [](double x, double y) { return x * (1.0 - x) * y * (1.0 - y); };
        const double exact_h1 = 2.0 / 90.0;
        const double exact_l1 = 1.0 / 36.0;
        double err_h1[3], err_l1[3];
        int n = 8;
        for (int level = 0; level < 3; ++level, n *= 2) {
            const Domain dl = Domain::box(1.0, 1.0, n, n);
            const GridFunction u = GridFunction::sample(dl, poly);
            err_h1[level] = std::abs(h1_inner(u, u) - exact_h1);
            err_l1[level] = std::abs(lp_integral(u, 1.0) - exact_l1);
        }
        bool ok = true;
        for (int level = 0; level < 2; ++level) {
            const double rate_h1 = std::log2(err_h1[level] / err_h1[level + 1]);
            const double rate_l1 = std::log2(err_l1[level] / err_l1[level + 1]);
            ok = ok && rate_h1 > 1.8 && rate_h1 < 2.2 && rate_l1 > 1.8 && rate_l1 < 2.2;
        }
        h.check_flag("grid.convergence_order", ok);
    }

    {
        const std::size_t k = std::min<std::size_t>(7, mode_table(d).size());
        const GridFunction tf = spectral_truncate(f, k);
        GridFunction twice = spectral_truncate(tf, k);
        twice -= tf;
        const double idem = h1_norm(twice) / std::max(h1_norm(tf), 1e-300);
        const double adj = rel(h1_inner(tf, g) - h1_inner(f, spectral_truncate(g, k)),
                               std::abs(h1_inner(f, g)) + 1.0);
        h.check("grid.spectral_projection", std::max(idem, adj), 1e-10);
    }
}

void scaling_invariants(Harness& h, std::mt19937_64& rng) {
    {
        const ScalingCoeffs c = ScalingCoeffs::decoupled({1.0, 2.0, 0.7}, {2.0, 1.0, 1.3}, 3.0);
        const std::vector<double> s = solve_scaling(c);
        double worst = 0.0;
        for (int i = 0; i < 3; ++i)
            worst = std::max(worst, std::abs(s[i] - std::sqrt(c.a[i] / c.b[i])));
        h.check("scaling.decoupled_closed_form", worst, 1e-12);
    }
    {
        ScalingCoeffs c = ScalingCoeffs::decoupled({1.0, 1.0}, {2.0, 2.0}, 3.0);
        c.d = {0.0, 1.0, 1.0, 0.0};
        const std::vector<double> s = solve_scaling(c);
        h.check("scaling.symmetric_fixture",
                std::max(std::abs(s[0] - 1.0), std::abs(s[1] - 1.0)), 1e-10);
    }

    bool multistart_ok = true;
    bool degree_ok = true;
    bool boundary_ok = true;
    bool covariance_ok = true;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int ell = 2; ell <= 3; ++ell) {
        for (int sample = 0; sample < 12; ++sample) {
            const ScalingCoeffs c = random_coeffs(ell, rng);
            const std::vector<double> s = solve_scaling(c);
            const ScalingBracket box = scaling_bracket(c);

            for (int start = 0; start < 8; ++start) {
                std::vector<double> s0(ell);
                for (double& v : s0) v = box.r + (box.R - box.r) * unit(rng);
                const std::vector<double> s1 = solve_scaling_from(c, s0);
                for (int i = 0; i < ell; ++i)
                    multistart_ok = multistart_ok && std::abs(s1[i] - s[i]) <= 1e-9;
            }

            const int sign = degree_sign_check(c, s);
            degree_ok = degree_ok && (sign == 0 || sign == (ell % 2 == 0 ? 1 : -1));

            // Face signs of the bracketing box.
            std::vector<double> face(s);
            for (int i = 0; i < ell; ++i) {
                face = s;
                face[i] = box.r;
                for (int k = 0; k < ell; ++k) face[k] = std::min(face[k], box.R);
                face[i] = box.r;
                boundary_ok = boundary_ok && eval_scaling_map(c, face)[i] > 0.0;
                for (int k = 0; k < ell; ++k) face[k] = std::min(s[k], box.R);
                face[i] = box.R;
                boundary_ok = boundary_ok && eval_scaling_map(c, face)[i] < 0.0;
            }

            // Normalization covariance of the root.
            std::vector<double> s0(ell);
            for (double& v : s0) v = 0.5 + 1.5 * unit(rng);
            ScalingCoeffs cc = c;
            for (int i = 0; i < ell; ++i) {
                cc.a[i] = c.a[i] * s0[i];
                cc.b[i] = c.b[i] * std::pow(s0[i], c.p);
                for (int j = 0; j < ell; ++j) {
                    if (j == i) continue;
                    cc.d[static_cast<std::size_t>(i) * ell + j] =
                        c.dd(i, j) * std::pow(s0[i], c.al(i, j)) * std::pow(s0[j], c.be(i, j));
                }
            }
            const std::vector<double> mapped = solve_scaling(cc);
            for (int i = 0; i < ell; ++i)
                covariance_ok = covariance_ok && std::abs(mapped[i] - s[i] / s0[i]) <= 1e-9;
        }
    }
    h.check_flag("scaling.multistart_uniqueness", multistart_ok);
    h.check_flag("scaling.degree_sign", degree_ok);
    h.check_flag("scaling.boundary_signs", boundary_ok);
    h.check_flag("scaling.covariance", covariance_ok);
}

void nehari_invariants(Harness& h, const Domain& d, std::mt19937_64& rng) {
    const SystemParams params = SystemParams::lotka_volterra(2, 3.0, {1.0, 1.5}, -0.4);
    const State u = random_sphere_state(params, d, rng);

    {
        const NehariProjection proj = project_to_nehari(params, u, 0.0);
        double worst = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double b = params.mu[i] * lp_integral(u[i], params.p + 1.0);
            worst = std::max(worst,
                             std::abs(proj.s[i] - std::pow(b, -1.0 / (params.p - 1.0))));
        }
        h.check("nehari.s0_closed_form", worst, 1e-12);
    }
    {
        const NehariProjection proj = project_to_nehari(params, u, 1.0);
        const std::vector<double> res = nehari_residual(params, proj.su, 1.0);
        double worst = 0.0;
        for (double r : res) worst = std::max(worst, std::abs(r));
        h.check("nehari.projection_residual", worst, 1e-9);

        const State back = normalize_to_sphere(proj.su);
        double dist = 0.0;
        for (int i = 0; i < 2; ++i) {
            GridFunction diff = back[i];
            diff -= u[i];
            dist = std::max(dist, h1_norm(diff));
        }
        h.check("nehari.inverse_identity", dist, 1e-9);
    }
    {
        bool monotone = true;
        std::vector<double> prev;
        for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            const std::vector<double> s = project_to_nehari(params, u, t).s;
            if (!prev.empty())
                for (int i = 0; i < 2; ++i) monotone = monotone && s[i] >= prev[i] - 1e-12;
            prev = s;
        }
        h.check_flag("nehari.t_monotonicity", monotone);
    }
    {
        const NehariProjection proj0 = project_to_nehari(params, u, 0.0);
        State su = u;
        for (int i = 0; i < 2; ++i) su[i] *= proj0.s[i];
        h.check("nehari.psi_identity", rel(psi(params, u) - energy_J(params, su),
                                           std::abs(psi(params, u))), 1e-10);
    }
    {
        const State s_field = S_map(params, u, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 2; ++i) worst = std::max(worst, std::abs(h1_inner(s_field[i], u[i])));
        h.check("nehari.tangency", worst, 1e-9);
    }
    {
        const State k = K_apply(params, u, 1.0);
        const State rhs = nonlinearity(params, u, 1.0);
        const GridFunction v = random_field(d, rng);
        double worst = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double weak = h1_inner(k[i], v);
            const double quad = l2_inner(rhs[i], v);
            worst = std::max(worst, rel(weak - quad, std::abs(quad)));
        }
        h.check("nehari.weak_form_duality", worst, 1e-10);
    }
}

void scalar_invariants(Harness& h, const Domain& d) {
    const double p = 3.0;
    const GridFunction u1 = least_energy_scalar(1.0, p, d);
    const GridFunction u4 = least_energy_scalar(4.0, p, d);
    {
        GridFunction diff = u4;
        diff.axpy(-std::pow(4.0, -1.0 / (p - 1.0)), u1);
        h.check("scalar.mu_scaling_law", h1_norm(diff) / h1_norm(u4), 1e-8);
    }
    h.check("scalar.nehari_identity",
            rel(h1_inner(u1, u1) - lp_integral(u1, p + 1.0), h1_inner(u1, u1)), 1e-9);
    h.check_flag("scalar.positivity", min_value(u1) > 0.0);
    {
        const double root = unique_scaling_root(1.0, 1.0, 2.0, 3.0, 2.0);
        h.check("scalar.two_term_root", std::abs(root - 1.0), 1e-13);
    }
}

void system_invariants(Harness& h, const Domain& d, std::mt19937_64& rng) {
    const SystemParams params = SystemParams::lotka_volterra(2, 3.0, {1.0, 1.0}, -0.5);
    ContinuationConfig cfg;

    {
        // Analytic linearization vs central differences at a positive state.
        State u(d, 2);
        for (int i = 0; i < 2; ++i) u[i] = random_field(d, rng, 0.2, 1.2);
        State v(d, 2);
        for (int i = 0; i < 2; ++i) v[i] = random_field(d, rng, -1.0, 1.0);

        const double eps = 1e-6;
        State up = u, um = u;
        up.axpy(eps, v);
        um.axpy(-eps, v);
        State fd = residual_F(params, up, 1.0);
        fd -= residual_F(params, um, 1.0);
        fd *= 1.0 / (2.0 * eps);
        const State jv = jacobian_apply(params, u, 1.0, v);
        State diff = fd;
        diff -= jv;
        h.check("system.jacobian_fd", residual_norm(diff) / residual_norm(jv), 1e-5);

        State invres = residual_F(params, u, 1.0);
        State ku = K_apply(params, u, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 2; ++i) {
            const GridFunction lhs = poisson_solve(invres[i]);
            GridFunction rhs = u[i];
            rhs -= ku[i];
            GridFunction delta = lhs;
            delta -= rhs;
            worst = std::max(worst, l2_norm(delta) / std::max(l2_norm(rhs), 1e-300));
        }
        h.check("system.weak_strong_consistency", worst, 1e-10);
    }

    try {
        const ContinuationResult run = continue_in_t(params, d, cfg);
        const SolveReport report = verify_solution(params, run.solution, 1.0);
        h.check("system.continuation_residual", report.relative_residual, 1e-8);
        h.check_flag("system.continuation_positive", report.strictly_positive);
        h.check_flag("system.continuation_bounded", run.max_inf_norm < run.r_guard);
        double base_res = run.trace.front().residual;
        h.check("system.continuation_endpoint", base_res / run.base.h_norm(), 1e-8);
    } catch (const Error& e) {
        h.check_flag("system.continuation_residual", false, e.what());
        h.check_flag("system.continuation_positive", false);
        h.check_flag("system.continuation_bounded", false);
        h.check_flag("system.continuation_endpoint", false);
    }
}

void sync_invariants(Harness& h, const Domain& d) {
    SystemParams params = SystemParams::lotka_volterra(2, 3.0, {1.0, 4.0}, -1.0);
    params.lambda = {0.0, -2.0, -1.0, 0.0};
    const SyncVerdict verdict = sync_criterion(params);
    h.check_flag("sync.criterion_fixture",
                 verdict.holds && std::abs(verdict.a - 1.0) < 1e-12 &&
                     std::abs(verdict.rho - 0.5) < 1e-12);

    try {
        const State pair = sync_solve(params, d);
        const double res = residual_norm(residual_F(params, pair, 1.0)) / pair.h_norm();
        h.check("sync.solve_residual", res, 1e-7);

        double worst_ratio = 0.0;
        for (std::size_t k = 0; k < pair[0].size(); ++k)
            worst_ratio = std::max(worst_ratio,
                                   std::abs(pair[1][k] - verdict.rho * pair[0][k]));
        h.check("sync.ratio_constancy", worst_ratio / inf_norm(pair[1]), 1e-10);
    } catch (const Error& e) {
        h.check_flag("sync.solve_residual", false, e.what());
        h.check_flag("sync.ratio_constancy", false);
    }

    const UnboundedResult table = unboundedness_experiment(1.0, 3.0, 2.0, {1.0, 10.0, 100.0}, d);
    bool all = table.norms_strictly_increasing && table.nehari_identity_ok;
    for (const UnboundedRow& row : table.rows) all = all && row.converged;
    h.check_flag("sync.unbounded_growth", all);
}

} // namespace

bool run_selftest(const SelftestOptions& options, std::ostream& out) {
    Harness h(out, options.tolerance_overrides);
    std::mt19937_64 rng(options.seed);

    const int n = std::max(8, options.resolution);
    const Domain d = Domain::box(1.0, 1.0, n, n);

    grid_invariants(h, d, rng);
    scaling_invariants(h, rng);
    nehari_invariants(h, d, rng);
    scalar_invariants(h, d);
    system_invariants(h, d, rng);
    sync_invariants(h, d);

    return h.summary();
}

} // namespace nf
