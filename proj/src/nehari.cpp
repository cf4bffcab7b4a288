#include "nf/nehari.hpp"

#include <algorithm>
#include <cmath>

#include "nf/kernels.hpp"

namespace nf {

void SystemParams::validate() const {
    if (ell < 2) throw InvalidParamsError("system needs at least 2 species");
    if (!(p > 1.0)) throw InvalidParamsError("system needs p > 1");
    const auto n = static_cast<std::size_t>(ell);
    if (mu.size() != n || lambda.size() != n * n || alpha.size() != n * n || beta.size() != n * n)
        throw InvalidParamsError("system parameter arrays have wrong sizes");
    for (int i = 0; i < ell; ++i) {
        if (!(mu[i] > 0.0)) throw InvalidParamsError("system needs mu_i > 0");
        for (int j = 0; j < ell; ++j) {
            if (j == i) continue;
            if (lam(i, j) > 0.0)
                throw InvalidParamsError("system needs lambda_ij <= 0 (competition)");
            if (!(al(i, j) > 0.0 && be(i, j) > 0.0))
                throw InvalidParamsError("system needs alpha_ij, beta_ij > 0");
            if (!(al(i, j) + be(i, j) < p))
                throw InvalidParamsError("system needs alpha_ij + beta_ij < p");
        }
    }
}

std::vector<std::string> SystemParams::warnings() const {
    std::vector<std::string> out;
    for (int i = 0; i < ell; ++i)
        for (int j = 0; j < ell; ++j)
            if (j != i && lam(i, j) == 0.0)
                out.push_back("lambda_" + std::to_string(i + 1) + std::to_string(j + 1) +
                              " = 0 decouples species " + std::to_string(i + 1) + " from " +
                              std::to_string(j + 1));
    return out;
}

SystemParams SystemParams::lotka_volterra(int ell, double p, std::vector<double> mu,
                                          double lambda_off) {
    SystemParams params;
    params.ell = ell;
    params.p = p;
    params.mu = std::move(mu);
    const auto nn = static_cast<std::size_t>(ell) * ell;
    params.lambda.assign(nn, lambda_off);
    params.alpha.assign(nn, 1.0);
    params.beta.assign(nn, 1.0);
    for (int i = 0; i < ell; ++i) params.lambda[static_cast<std::size_t>(i) * ell + i] = 0.0;
    params.validate();
    return params;
}

State::State(std::vector<GridFunction> components) : comps_(std::move(components)) {
    if (comps_.empty()) throw InvalidParamsError("state needs at least one component");
    for (const auto& c : comps_)
        if (!(c.domain() == comps_.front().domain()))
            throw DomainMismatchError("state components live on different domains");
}

State::State(const Domain& d, int ell) : comps_(static_cast<std::size_t>(ell), GridFunction(d)) {
    if (ell < 1) throw InvalidParamsError("state needs at least one component");
}

State& State::operator+=(const State& o) {
    for (int i = 0; i < size(); ++i) comps_[i] += o[i];
    return *this;
}

State& State::operator-=(const State& o) {
    for (int i = 0; i < size(); ++i) comps_[i] -= o[i];
    return *this;
}

State& State::operator*=(double s) {
    for (auto& c : comps_) c *= s;
    return *this;
}

State& State::axpy(double s, const State& o) {
    for (int i = 0; i < size(); ++i) comps_[i].axpy(s, o[i]);
    return *this;
}

double State::h_norm() const {
    double sq = 0.0;
    for (const auto& c : comps_) sq += h1_inner(c, c);
    return std::sqrt(sq);
}

double State::inf_norm() const {
    double m = 0.0;
    for (const auto& c : comps_) m = std::max(m, nf::inf_norm(c));
    return m;
}

State nonlinearity(const SystemParams& params, const State& u, double t) {
    const int ell = params.ell;
    State out(u.domain(), ell);
    const std::size_t n = u.domain().node_count();
    for (int i = 0; i < ell; ++i) {
        const double* ui = u[i].values().data();
        double* oi = out[i].values().data();
        const double mu = params.mu[i];
        const double p = params.p;
        kernels::indexed_map(n, oi, [ui, mu, p](std::size_t k) {
            const double v = ui[k] > 0.0 ? ui[k] : 0.0;
            return v > 0.0 ? mu * std::pow(v, p) : 0.0;
        });
        if (t == 0.0) continue;
        for (int j = 0; j < ell; ++j) {
            if (j == i || params.lam(i, j) == 0.0) continue;
            const double* uj = u[j].values().data();
            const double w = t * params.lam(i, j);
            const double aij = params.al(i, j);
            const double bij = params.be(i, j);
            kernels::indexed_map(n, oi, [oi, ui, uj, w, aij, bij](std::size_t k) {
                const double vi = ui[k] > 0.0 ? ui[k] : 0.0;
                const double vj = uj[k] > 0.0 ? uj[k] : 0.0;
                if (vi == 0.0 || vj == 0.0) return oi[k];
                return oi[k] + w * std::pow(vi, aij) * std::pow(vj, bij);
            });
        }
    }
    return out;
}

ScalingCoeffs coeffs_from_state(const SystemParams& params, const State& u, double t) {
    const int ell = params.ell;
    ScalingCoeffs c;
    c.ell = ell;
    c.p = params.p;
    c.a.resize(ell);
    c.b.resize(ell);
    const auto nn = static_cast<std::size_t>(ell) * ell;
    c.d.assign(nn, 0.0);
    c.alpha = params.alpha;
    c.beta = params.beta;
    for (int i = 0; i < ell; ++i) {
        c.a[i] = h1_inner(u[i], u[i]);
        c.b[i] = params.mu[i] * lp_integral(u[i], params.p + 1.0);
        for (int j = 0; j < ell; ++j) {
            if (j == i || t == 0.0 || params.lam(i, j) == 0.0) continue;
            c.d[static_cast<std::size_t>(i) * ell + j] =
                t * (-params.lam(i, j)) *
                pos_power_product_integral(u[i], params.al(i, j) + 1.0, u[j], params.be(i, j));
        }
        // The unused diagonal exponents only need to satisfy the type bounds.
        c.alpha[static_cast<std::size_t>(i) * ell + i] = 1.0;
        c.beta[static_cast<std::size_t>(i) * ell + i] = 1.0;
    }
    return c;
}

State K_apply(const SystemParams& params, const State& u, double t) {
    State rhs = nonlinearity(params, u, t);
    std::vector<GridFunction> out;
    out.reserve(params.ell);
    for (int i = 0; i < params.ell; ++i) out.push_back(poisson_solve(rhs[i]));
    return State(std::move(out));
}

std::vector<double> nehari_residual(const SystemParams& params, const State& u, double t) {
    // <u_i - K_i(u), u_i> reduces to a_i - b_i + sum_j d_ij by the exact
    // duality between the Dirichlet form and the node quadrature.
    const ScalingCoeffs c = coeffs_from_state(params, u, t);
    std::vector<double> out(params.ell);
    for (int i = 0; i < params.ell; ++i) {
        double v = c.a[i] - c.b[i];
        for (int j = 0; j < params.ell; ++j)
            if (j != i) v += c.dd(i, j);
        out[i] = v;
    }
    return out;
}

State normalize_to_sphere(const State& u) {
    std::vector<GridFunction> comps;
    comps.reserve(u.size());
    for (int i = 0; i < u.size(); ++i) {
        const double norm = h1_norm(u[i]);
        if (!(norm > 1e-140))
            throw ZeroComponentError("component " + std::to_string(i + 1) +
                                     " has zero Dirichlet norm");
        comps.push_back((1.0 / norm) * u[i]);
    }
    return State(std::move(comps));
}

NehariProjection project_to_nehari(const SystemParams& params, const State& sphere_u, double t) {
    ScalingCoeffs c = coeffs_from_state(params, sphere_u, t);
    for (int i = 0; i < params.ell; ++i)
        if (c.b[i] < boundary_b_threshold)
            throw NotInUError("positive part of component " + std::to_string(i + 1) +
                              " vanishes; no projection exists");
    std::vector<double> s = solve_scaling(c);
    std::vector<GridFunction> comps;
    comps.reserve(params.ell);
    for (int i = 0; i < params.ell; ++i) comps.push_back(s[i] * sphere_u[i]);
    return {std::move(s), State(std::move(comps))};
}

State S_map(const SystemParams& params, const State& sphere_u, double t) {
    NehariProjection proj = project_to_nehari(params, sphere_u, t);
    State k = K_apply(params, proj.su, t);
    proj.su -= k;
    return std::move(proj.su);
}

double energy_J(const SystemParams& params, const State& u) {
    double val = 0.0;
    for (int i = 0; i < params.ell; ++i) {
        val += 0.5 * h1_inner(u[i], u[i]);
        val -= params.mu[i] * lp_integral(u[i], params.p + 1.0) / (params.p + 1.0);
    }
    return val;
}

double psi(const SystemParams& params, const State& sphere_u) {
    const double expo = -2.0 / (params.p - 1.0);
    double sum = 0.0;
    for (int i = 0; i < params.ell; ++i) {
        const double b = params.mu[i] * lp_integral(sphere_u[i], params.p + 1.0);
        if (b < boundary_b_threshold)
            throw NotInUError("positive part of component " + std::to_string(i + 1) +
                              " vanishes; reduced energy undefined");
        sum += std::pow(b, expo);
    }
    return (0.5 - 1.0 / (params.p + 1.0)) * sum;
}

NontrivialityReport fully_nontrivial_check(const SystemParams& params, const State& u, double t) {
    const ScalingCoeffs c = coeffs_from_state(params, u, t);
    NontrivialityReport report;
    report.components.resize(params.ell);
    double a_max = 0.0;
    for (int i = 0; i < params.ell; ++i) a_max = std::max(a_max, c.a[i]);

    double worst_residual = 0.0;
    bool all_nontrivial = true;
    for (int i = 0; i < params.ell; ++i) {
        ComponentCheck& cc = report.components[i];
        cc.norm_h1 = std::sqrt(std::max(c.a[i], 0.0));
        cc.mu_lp = c.b[i];
        double pairing = c.b[i];
        for (int j = 0; j < params.ell; ++j)
            if (j != i) pairing -= c.dd(i, j);
        cc.k_pairing = pairing;
        cc.nehari_residual = c.a[i] - pairing;
        cc.sobolev_quotient =
            c.b[i] > 0.0 ? std::pow(cc.norm_h1, params.p + 1.0) / c.b[i] : 0.0;
        cc.min_value = min_value(u[i]);
        cc.max_value = max_value(u[i]);
        cc.nontrivial = cc.norm_h1 > 1e-10 * std::sqrt(a_max) && c.b[i] > boundary_b_threshold;
        cc.chain_ok = c.a[i] <= c.b[i] + 1e-8 * std::max(c.a[i], c.b[i]);
        worst_residual = std::max(worst_residual, std::abs(cc.nehari_residual));
        all_nontrivial = all_nontrivial && cc.nontrivial;
    }
    report.fully_nontrivial = all_nontrivial;
    report.on_manifold = worst_residual <= 1e-9 * std::max(a_max, 1e-300);
    return report;
}

} // namespace nf
