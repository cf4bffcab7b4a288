#include "nf/scaling_map.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace nf {

namespace {

void require_positive(std::span<const double> s) {
    for (double v : s)
        if (!(v > 0.0)) throw InvalidParamsError("scaling map arguments must be strictly positive");
}

void require_shape(const ScalingCoeffs& c, std::span<const double> s) {
    if (static_cast<int>(s.size()) != c.ell)
        throw InvalidParamsError("scaling map argument has wrong length");
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

void ScalingCoeffs::validate() const {
    if (ell < 1) throw InvalidParamsError("scaling coefficients need ell >= 1");
    if (!(p > 1.0)) throw InvalidParamsError("scaling coefficients need p > 1");
    const auto n = static_cast<std::size_t>(ell);
    if (a.size() != n || b.size() != n || d.size() != n * n || alpha.size() != n * n ||
        beta.size() != n * n)
        throw InvalidParamsError("scaling coefficient arrays have wrong sizes");
    for (int i = 0; i < ell; ++i) {
        if (!(a[i] > 0.0)) throw InvalidParamsError("scaling coefficients need a_i > 0");
        if (b[i] < 0.0) throw InvalidParamsError("scaling coefficients need b_i >= 0");
        for (int j = 0; j < ell; ++j) {
            if (j == i) continue;
            if (dd(i, j) < 0.0) throw InvalidParamsError("scaling coefficients need d_ij >= 0");
            if (!(al(i, j) > 0.0 && be(i, j) > 0.0))
                throw InvalidParamsError("scaling coefficients need alpha_ij, beta_ij > 0");
            if (!(al(i, j) + be(i, j) < p))
                throw InvalidParamsError("scaling coefficients need alpha_ij + beta_ij < p");
        }
    }
}

ScalingCoeffs ScalingCoeffs::decoupled(std::vector<double> a, std::vector<double> b, double p) {
    ScalingCoeffs c;
    c.ell = static_cast<int>(a.size());
    c.p = p;
    c.a = std::move(a);
    c.b = std::move(b);
    const auto nn = static_cast<std::size_t>(c.ell) * c.ell;
    c.d.assign(nn, 0.0);
    c.alpha.assign(nn, 1.0);
    c.beta.assign(nn, 1.0);
    return c;
}

std::vector<double> eval_scaling_map(const ScalingCoeffs& c, std::span<const double> s) {
    require_shape(c, s);
    require_positive(s);
    std::vector<double> out(c.ell);
    for (int i = 0; i < c.ell; ++i) {
        double v = c.a[i] * s[i] - c.b[i] * std::pow(s[i], c.p);
        for (int j = 0; j < c.ell; ++j) {
            if (j == i || c.dd(i, j) == 0.0) continue;
            v += c.dd(i, j) * std::pow(s[i], c.al(i, j)) * std::pow(s[j], c.be(i, j));
        }
        out[i] = v;
    }
    return out;
}

std::vector<double> scaling_jacobian(const ScalingCoeffs& c, std::span<const double> s) {
    require_shape(c, s);
    require_positive(s);
    std::vector<double> jac(static_cast<std::size_t>(c.ell) * c.ell, 0.0);
    for (int i = 0; i < c.ell; ++i) {
        double diag = c.a[i] - c.p * c.b[i] * std::pow(s[i], c.p - 1.0);
        for (int j = 0; j < c.ell; ++j) {
            if (j == i || c.dd(i, j) == 0.0) continue;
            const double aij = c.al(i, j);
            const double bij = c.be(i, j);
            diag += c.dd(i, j) * aij * std::pow(s[i], aij - 1.0) * std::pow(s[j], bij);
            jac[static_cast<std::size_t>(i) * c.ell + j] =
                c.dd(i, j) * bij * std::pow(s[i], aij) * std::pow(s[j], bij - 1.0);
        }
        jac[static_cast<std::size_t>(i) * c.ell + i] = diag;
    }
    return jac;
}

ScalingBracket scaling_bracket(const ScalingCoeffs& c) {
    c.validate();
    for (int i = 0; i < c.ell; ++i)
        if (c.b[i] == 0.0)
            throw NoZeroError("scaling map has no zero: b_" + std::to_string(i + 1) + " = 0");

    const double a_lo = *std::min_element(c.a.begin(), c.a.end());
    const double a_hi = *std::max_element(c.a.begin(), c.a.end());
    const double b_lo = *std::min_element(c.b.begin(), c.b.end());
    const double b_hi = *std::max_element(c.b.begin(), c.b.end());
    double d_hi = 0.0;
    for (int i = 0; i < c.ell; ++i)
        for (int j = 0; j < c.ell; ++j)
            if (j != i) d_hi = std::max(d_hi, c.dd(i, j));

    ScalingBracket box;
    box.r = 0.5 * std::pow(a_lo / b_hi, 1.0 / (c.p - 1.0));

    // Doubling search for R on the majorant of M_i along the diagonal
    // directions. The majorant over t^p is strictly decreasing, so a sign
    // change found once persists for all larger t.
    auto majorant_negative = [&](double t) {
        for (int i = 0; i < c.ell; ++i) {
            double v = a_hi * t - b_lo * std::pow(t, c.p);
            for (int j = 0; j < c.ell; ++j)
                if (j != i) v += d_hi * std::pow(t, c.al(i, j) + c.be(i, j));
            if (v >= 0.0) return false;
        }
        return true;
    };
    double t = std::max({2.0 * box.r, 1.0, std::pow(a_hi / b_lo, 1.0 / (c.p - 1.0))});
    int guard = 0;
    while (!majorant_negative(t)) {
        t *= 2.0;
        if (++guard > 400) throw NonConvergenceError("scaling bracket doubling search failed");
    }
    box.R = t;
    return box;
}

namespace {

std::vector<double> solve_scaling_impl(const ScalingCoeffs& c, std::vector<double> s,
                                       const ScalingBracket& box) {
    const double tol = 1e-12 * *std::max_element(c.a.begin(), c.a.end());
    const double lo = 0.5 * box.r;
    const double hi = 2.0 * box.R;
    auto clip = [&](std::vector<double>& v) {
        for (double& x : v) x = std::clamp(x, lo, hi);
    };
    clip(s);

    const int n = c.ell;
    Eigen::VectorXd rhs(n), step(n);
    Eigen::MatrixXd jac(n, n);

    for (int outer = 0; outer < 10; ++outer) {
        // Damped Newton with step clipping into the padded box.
        bool stagnated = false;
        for (int it = 0; it < 80; ++it) {
            std::vector<double> m = eval_scaling_map(c, s);
            const double res = max_abs(m);
            if (res <= tol) return s;

            std::vector<double> j = scaling_jacobian(c, s);
            for (int r = 0; r < n; ++r) {
                rhs(r) = -m[r];
                for (int col = 0; col < n; ++col) jac(r, col) = j[static_cast<std::size_t>(r) * n + col];
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
            if (!lu.isInvertible()) {
                stagnated = true;
                break;
            }
            step = lu.solve(rhs);

            double alpha = 1.0;
            bool accepted = false;
            for (int half = 0; half < 14; ++half) {
                std::vector<double> trial(s);
                for (int k = 0; k < n; ++k) trial[k] += alpha * step(k);
                clip(trial);
                if (max_abs(eval_scaling_map(c, trial)) < res) {
                    s = std::move(trial);
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!accepted) {
                stagnated = true;
                break;
            }
        }
        if (!stagnated && max_abs(eval_scaling_map(c, s)) <= tol) return s;

        // Monotone fixed-point burst, then retry Newton.
        for (int it = 0; it < 25; ++it) {
            std::vector<double> next(s);
            for (int i = 0; i < n; ++i) {
                double inter = 0.0;
                for (int j = 0; j < n; ++j) {
                    if (j == i || c.dd(i, j) == 0.0) continue;
                    inter += c.dd(i, j) * std::pow(s[i], c.al(i, j)) * std::pow(s[j], c.be(i, j));
                }
                next[i] = std::pow((c.a[i] * s[i] + inter) / c.b[i], 1.0 / c.p);
            }
            clip(next);
            s = std::move(next);
        }
    }
    throw NonConvergenceError("scaling map solve did not converge");
}

} // namespace

std::vector<double> solve_scaling(const ScalingCoeffs& c) {
    const ScalingBracket box = scaling_bracket(c);
    std::vector<double> mid(c.ell, 0.5 * (box.r + box.R));
    return solve_scaling_impl(c, std::move(mid), box);
}

std::vector<double> solve_scaling_from(const ScalingCoeffs& c, std::span<const double> start) {
    require_shape(c, start);
    require_positive(start);
    const ScalingBracket box = scaling_bracket(c);
    return solve_scaling_impl(c, std::vector<double>(start.begin(), start.end()), box);
}

int degree_sign_check(const ScalingCoeffs& c, std::span<const double> s_star) {
    std::vector<double> j = scaling_jacobian(c, s_star);
    const int n = c.ell;
    Eigen::MatrixXd jac(n, n);
    double scale = 1.0;
    for (int r = 0; r < n; ++r) {
        double row_max = 0.0;
        for (int col = 0; col < n; ++col) {
            jac(r, col) = j[static_cast<std::size_t>(r) * n + col];
            row_max = std::max(row_max, std::abs(jac(r, col)));
        }
        if (row_max == 0.0) return 0;
        scale *= row_max;
    }
    const double det = jac.determinant();
    if (std::abs(det) < 1e-10 * scale) return 0;
    return det > 0.0 ? 1 : -1;
}

double continuity_probe(const ScalingCoeffs& c, const ScalingCoeffs& c_prime,
                        std::span<const double> s_of_c) {
    std::vector<double> s0;
    if (s_of_c.empty()) {
        s0 = solve_scaling(c);
    } else {
        s0.assign(s_of_c.begin(), s_of_c.end());
    }
    const std::vector<double> s1 = solve_scaling(c_prime);
    double diff = 0.0;
    for (int i = 0; i < c.ell; ++i) diff = std::max(diff, std::abs(s0[i] - s1[i]));
    return diff;
}

} // namespace nf
