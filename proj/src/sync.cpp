#include "nf/sync.hpp"

#include <cmath>

namespace nf {

SyncVerdict sync_criterion(const SystemParams& params) {
    params.validate();
    if (params.ell != 2)
        throw InvalidParamsError("synchronized criterion is defined for 2 species");
    const double l12 = params.lam(0, 1);
    const double l21 = params.lam(1, 0);
    if (!(l12 < 0.0) || !(l21 < 0.0))
        throw InvalidParamsError("synchronized criterion needs strictly negative couplings");

    const double q12 = params.al(0, 1) + params.be(0, 1);
    const double q21 = params.al(1, 0) + params.be(1, 0);
    const double mu_ratio = params.mu[0] / params.mu[1];
    const double pm1 = params.p - 1.0;

    SyncVerdict verdict;
    verdict.q = q12;
    verdict.rho = std::pow(mu_ratio, 1.0 / pm1);
    verdict.a = -l12 * std::pow(mu_ratio, params.be(0, 1) / pm1);

    if (std::abs(q12 - q21) > 1e-12) {
        verdict.failure_reason = "exponent mismatch";
        return verdict;
    }
    const double ratio = l12 / l21;
    const double required = std::pow(mu_ratio, (params.al(1, 0) - params.be(0, 1) - 1.0) / pm1);
    if (std::abs(ratio - required) > 1e-10 * std::abs(ratio)) {
        verdict.failure_reason = "ratio mismatch";
        return verdict;
    }
    verdict.holds = true;
    return verdict;
}

State sync_solve(const SystemParams& params, const Domain& d) {
    const SyncVerdict verdict = sync_criterion(params);
    if (!verdict.holds)
        throw CriterionError("no synchronized solution: " + verdict.failure_reason);
    GridFunction w = two_term_scalar(params.mu[0], params.p, verdict.a, verdict.q, d);
    GridFunction second = verdict.rho * w;
    std::vector<GridFunction> comps;
    comps.push_back(std::move(w));
    comps.push_back(std::move(second));
    return State(std::move(comps));
}

UnboundedResult unboundedness_experiment(double mu, double p, double q,
                                         const std::vector<double>& a_list, const Domain& d,
                                         int workers) {
    if (a_list.empty()) throw InvalidParamsError("unboundedness experiment needs coefficients");
    for (std::size_t i = 0; i < a_list.size(); ++i) {
        if (a_list[i] < 0.0) throw InvalidParamsError("coefficients must be nonnegative");
        if (i > 0 && a_list[i] <= a_list[i - 1])
            throw InvalidParamsError("coefficients must be strictly ascending");
    }
    if (workers < 1) workers = 1;

    UnboundedResult result;
    result.rows.resize(a_list.size());
    const auto rows = static_cast<long>(a_list.size());

#pragma omp parallel for schedule(dynamic) num_threads(workers) if (workers > 1)
    for (long idx = 0; idx < rows; ++idx) {
        UnboundedRow& row = result.rows[static_cast<std::size_t>(idx)];
        row.a = a_list[static_cast<std::size_t>(idx)];
        try {
            const GridFunction w = two_term_scalar(mu, p, row.a, q, d);
            row.norm_w = h1_norm(w);
            row.int_wq1 = lp_integral(w, q + 1.0);
            row.int_wp1 = lp_integral(w, p + 1.0);
            GridFunction f = laplacian_apply(w);
            if (row.a != 0.0) {
                GridFunction wq(w.domain());
                const double* wv = w.values().data();
                for (std::size_t k = 0; k < wq.size(); ++k)
                    wq[k] = wv[k] > 0.0 ? std::pow(wv[k], q) : 0.0;
                f.axpy(row.a, wq);
            }
            GridFunction wp(w.domain());
            const double* wv = w.values().data();
            for (std::size_t k = 0; k < wp.size(); ++k)
                wp[k] = wv[k] > 0.0 ? std::pow(wv[k], p) : 0.0;
            f.axpy(-mu, wp);
            row.residual = l2_norm(f) / row.norm_w;
            row.converged = true;
        } catch (const Error& e) {
            row.converged = false;
            row.error = e.what();
        }
    }

    result.norms_strictly_increasing = true;
    result.nehari_identity_ok = true;
    const UnboundedRow* prev = nullptr;
    for (const UnboundedRow& row : result.rows) {
        if (!row.converged) continue;
        if (prev && !(row.norm_w > prev->norm_w)) result.norms_strictly_increasing = false;
        const double lhs = row.norm_w * row.norm_w + row.a * row.int_wq1;
        const double rhs = mu * row.int_wp1;
        if (std::abs(lhs - rhs) > 1e-9 * std::max(std::abs(rhs), 1e-300))
            result.nehari_identity_ok = false;
        prev = &row;
    }
    return result;
}

SynchronizedFit synchronized_fit(const State& u) {
    if (u.size() != 2) throw InvalidParamsError("synchronized fit is defined for 2 components");
    const double g11 = h1_inner(u[0], u[0]);
    const double g12 = h1_inner(u[0], u[1]);
    const double g22 = h1_inner(u[1], u[1]);

    // Top eigenvector of the 2x2 Dirichlet Gram matrix.
    const double tr = g11 + g22;
    const double det = g11 * g22 - g12 * g12;
    const double disc = std::sqrt(std::max(0.25 * tr * tr - det, 0.0));
    const double lam = 0.5 * tr + disc;

    double t1, t2;
    if (std::abs(g12) > 1e-300) {
        t1 = lam - g22;
        t2 = g12;
    } else if (g11 >= g22) {
        t1 = 1.0;
        t2 = 0.0;
    } else {
        t1 = 0.0;
        t2 = 1.0;
    }
    const double nrm = std::sqrt(t1 * t1 + t2 * t2);
    t1 /= nrm;
    t2 /= nrm;
    if (t1 < 0.0) {
        t1 = -t1;
        t2 = -t2;
    }

    GridFunction w = t1 * u[0];
    w.axpy(t2, u[1]);
    return {t1, t2, std::move(w)};
}

} // namespace nf
