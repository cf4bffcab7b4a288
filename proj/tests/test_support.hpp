#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "nf/grid.hpp"
#include "nf/nehari.hpp"
#include "nf/scaling_map.hpp"

namespace nft {

inline double rel_err(double measured, double reference) {
    return std::abs(measured - reference) / std::max(std::abs(reference), 1e-300);
}

inline nf::GridFunction random_field(const nf::Domain& d, std::mt19937_64& rng, double lo = -1.0,
                                     double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    nf::GridFunction f(d);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = dist(rng);
    return f;
}

inline nf::State random_sphere_state(int ell, const nf::Domain& d, std::mt19937_64& rng) {
    std::vector<nf::GridFunction> comps;
    comps.reserve(ell);
    for (int i = 0; i < ell; ++i) comps.push_back(random_field(d, rng, 0.05, 1.0));
    return nf::normalize_to_sphere(nf::State(std::move(comps)));
}

/// Random low-mode sphere state with a dominant positive ground mode; its
/// attached coefficients are O(1), which keeps absolute tolerances meaningful.
inline nf::State smooth_sphere_state(int ell, const nf::Domain& d, std::mt19937_64& rng) {
    const std::size_t k = std::min<std::size_t>(8, nf::mode_table(d).size());
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<nf::GridFunction> comps;
    comps.reserve(ell);
    for (int i = 0; i < ell; ++i) {
        std::vector<double> coeffs(k);
        coeffs[0] = 1.0 + 0.5 * std::abs(unit(rng));
        for (std::size_t m = 1; m < k; ++m) coeffs[m] = 0.3 * unit(rng);
        comps.push_back(nf::spectral_synthesize(d, coeffs));
    }
    return nf::normalize_to_sphere(nf::State(std::move(comps)));
}

/// Admissible random coefficient set: a, b in [0.5, 2], d in [0, 1.2],
/// exponents in (0, p) with alpha + beta < 0.9 p.
inline nf::ScalingCoeffs random_coeffs(int ell, std::mt19937_64& rng, bool fixed_p = false) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    nf::ScalingCoeffs c;
    c.ell = ell;
    c.p = fixed_p ? 3.0 : 2.5 + 1.5 * unit(rng);
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

} // namespace nft
