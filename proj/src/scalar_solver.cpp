#include "nf/scalar_solver.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>

#include "nf/errors.hpp"
#include "nf/kernels.hpp"
#include "sparse_stencil.hpp"

namespace nf {

namespace {

double pos(double x) { return x > 0.0 ? x : 0.0; }

GridFunction pos_power(const GridFunction& u, double e) {
    GridFunction out(u.domain());
    const double* a = u.values().data();
    kernels::indexed_map(u.size(), out.values().data(), [a, e](std::size_t i) {
        const double v = pos(a[i]);
        return v > 0.0 ? std::pow(v, e) : 0.0;
    });
    return out;
}

// One damped Newton pass on -Lap u + a(u+)^q - mu(u+)^p = 0 (a may be 0).
// The positive-part derivative is taken as 0 at nonpositive nodes.
GridFunction newton_polish(GridFunction u, double mu, double p, double a, double q, double rel_tol,
                           int max_iter) {
    const Domain& d = u.domain();
    const auto n = static_cast<int>(d.node_count());

    std::vector<detail::Triplet> stencil;
    stencil.reserve(static_cast<std::size_t>(n) * 5);
    detail::add_neg_laplacian(d, 0, stencil);

    auto residual = [&](const GridFunction& w) {
        GridFunction f = laplacian_apply(w);
        if (a != 0.0) f.axpy(a, pos_power(w, q));
        f.axpy(-mu, pos_power(w, p));
        return f;
    };

    Eigen::SparseMatrix<double> jac(n, n);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    Eigen::VectorXd rhs(n), delta(n);

    GridFunction f = residual(u);
    double res = l2_norm(f);
    for (int it = 0; it < max_iter; ++it) {
        if (res <= rel_tol * h1_norm(u)) return u;

        std::vector<detail::Triplet> entries = stencil;
        for (int k = 0; k < n; ++k) {
            const double v = u[static_cast<std::size_t>(k)];
            if (v > 0.0) {
                double w = -p * mu * std::pow(v, p - 1.0);
                if (a != 0.0) w += a * q * std::pow(v, q - 1.0);
                entries.emplace_back(k, k, w);
            }
            rhs(k) = -f[static_cast<std::size_t>(k)];
        }
        jac.setFromTriplets(entries.begin(), entries.end());
        lu.compute(jac);
        if (lu.info() != Eigen::Success)
            throw SingularJacobianError("scalar Newton linearization is singular");
        delta = lu.solve(rhs);

        double step = 1.0;
        bool accepted = false;
        for (int half = 0; half < 10; ++half) {
            GridFunction trial = u;
            for (int k = 0; k < n; ++k) trial[static_cast<std::size_t>(k)] += step * delta(k);
            GridFunction ft = residual(trial);
            const double rt = l2_norm(ft);
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
            throw DivergenceError("scalar Newton residual stopped decreasing");
    }
    if (res <= rel_tol * h1_norm(u)) return u;
    throw NonConvergenceError("scalar Newton hit its iteration cap");
}

} // namespace

double unique_scaling_root(double norm_sq, double aA, double muB, double p, double q) {
    if (!(norm_sq > 0.0) || !(muB > 0.0) || aA < 0.0 || !(p > 1.0) || !(q > 1.0) || !(q < p))
        throw InvalidParamsError("unique_scaling_root preconditions violated");
    if (aA == 0.0) return std::pow(norm_sq / muB, 1.0 / (p - 1.0));

    // phi(t) = norm_sq + aA t^{q-1} - muB t^{p-1} starts positive and has a
    // single sign change; bisection then Newton polish on the full residual.
    auto phi = [&](double t) {
        return norm_sq + aA * std::pow(t, q - 1.0) - muB * std::pow(t, p - 1.0);
    };
    double lo = 1e-3 * std::pow(norm_sq / muB, 1.0 / (p - 1.0));
    double hi = std::max({std::pow(norm_sq / muB, 1.0 / (p - 1.0)),
                          std::pow(aA / muB, 1.0 / (p - q)), 2.0 * lo});
    int guard = 0;
    while (phi(hi) > 0.0) {
        hi *= 2.0;
        if (++guard > 200) throw NonConvergenceError("scaling root bracket search failed");
    }
    for (int it = 0; it < 120 && (hi - lo) > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) > 0.0 ? lo : hi) = mid;
    }
    double t = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
        const double g = norm_sq * t + aA * std::pow(t, q) - muB * std::pow(t, p);
        const double dg = norm_sq + aA * q * std::pow(t, q - 1.0) - muB * p * std::pow(t, p - 1.0);
        if (dg == 0.0) break;
        const double next = t - g / dg;
        if (!(next > 0.0)) break;
        t = next;
    }
    return t;
}

GridFunction least_energy_scalar(double mu, double p, const Domain& d) {
    if (!(mu > 0.0) || !(p > 1.0))
        throw InvalidParamsError("least_energy_scalar needs mu > 0 and p > 1");

    const GridFunction phi1 = first_eigenmode(d);
    const double lam1 = mode_table(d).front().eigenvalue;
    const double t0 = std::pow(lam1 / (mu * lp_integral(phi1, p + 1.0)), 1.0 / (p - 1.0));
    GridFunction u = t0 * phi1;

    for (int cycle = 0; cycle < 4; ++cycle) {
        // Re-project onto the scalar constraint manifold, then polish.
        const double b = mu * lp_integral(u, p + 1.0);
        if (b <= 0.0) throw NonConvergenceError("scalar iterate lost its positive part");
        const double s = std::pow(h1_inner(u, u) / b, 1.0 / (p - 1.0));
        u *= s;
        u = newton_polish(std::move(u), mu, p, 0.0, 0.5 * (1.0 + p), 1e-9, 60);
        GridFunction f = laplacian_apply(u);
        f.axpy(-mu, pos_power(u, p));
        if (l2_norm(f) <= 1e-9 * h1_norm(u)) break;
    }
    // Nodal values below -1e-10: re-solve the positive-part form semismoothly.
    if (min_value(u) < -1e-10)
        u = newton_polish(std::move(u), mu, p, 0.0, 0.5 * (1.0 + p), 1e-10, 60);
    return u;
}

double two_term_energy(const GridFunction& w, double mu, double p, double a, double q) {
    return 0.5 * h1_inner(w, w) + a / (q + 1.0) * lp_integral(w, q + 1.0) -
           mu / (p + 1.0) * lp_integral(w, p + 1.0);
}

GridFunction two_term_scalar(double mu, double p, double a, double q, const Domain& d) {
    if (!(mu > 0.0) || a < 0.0 || !(q > 1.0) || !(q < p))
        throw InvalidParamsError("two_term_scalar needs mu > 0, a >= 0, 1 < q < p");

    auto project = [&](GridFunction w) {
        const double aA = a * lp_integral(w, q + 1.0);
        const double muB = mu * lp_integral(w, p + 1.0);
        if (!(muB > 0.0)) throw NonConvergenceError("two-term iterate lost its positive part");
        const double t = unique_scaling_root(h1_inner(w, w), aA, muB, p, q);
        w *= t;
        return w;
    };

    GridFunction u = project(first_eigenmode(d));

    // Projected gradient descent on the constrained energy.
    double energy = two_term_energy(u, mu, p, a, q);
    double step = 0.5;
    for (int it = 0; it < 60; ++it) {
        GridFunction grad_rhs(u.domain());
        grad_rhs.axpy(mu, pos_power(u, p));
        grad_rhs.axpy(-a, pos_power(u, q));
        GridFunction grad = u - poisson_solve(grad_rhs);
        const double gnorm = h1_norm(grad);
        if (gnorm <= 1e-4 * h1_norm(u)) break;

        bool moved = false;
        for (int half = 0; half < 8; ++half) {
            GridFunction trial = u;
            trial.axpy(-step, grad);
            if (lp_integral(trial, p + 1.0) <= 0.0) {
                step *= 0.5;
                continue;
            }
            trial = project(std::move(trial));
            const double e = two_term_energy(trial, mu, p, a, q);
            if (e < energy) {
                u = std::move(trial);
                energy = e;
                step = std::min(1.0, step * 1.5);
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }

    return newton_polish(std::move(u), mu, p, a, q, 1e-9, 80);
}

} // namespace nf
