#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <sstream>

#include "nf/kernels.hpp"
#include "test_support.hpp"

using namespace nf;
using nft::random_field;
using nft::rel_err;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("laplacian of zero is zero") {
    const Domain d = Domain::box(1.0, 1.0, 17, 13);
    const GridFunction out = laplacian_apply(GridFunction(d));
    CHECK(l2_norm(out) == 0.0);
}

TEST_CASE("laplacian reproduces the discrete eigenpair identity") {
    const Domain d = Domain::box(1.5, 1.0, 24, 18);
    for (auto [mx, my] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{3, 2}}) {
        const GridFunction f = GridFunction::sample(d, [&](double x, double y) {
            return std::sin(mx * pi * x / d.length_x()) * std::sin(my * pi * y / d.length_y());
        });
        const double sx = std::sin(0.5 * mx * pi * d.hx() / d.length_x());
        const double sy = std::sin(0.5 * my * pi * d.hy() / d.length_y());
        const double lam = 4.0 / (d.hx() * d.hx()) * sx * sx + 4.0 / (d.hy() * d.hy()) * sy * sy;
        CHECK(lam == doctest::Approx(laplacian_eigenvalue(d, mx, my)).epsilon(1e-14));

        GridFunction res = laplacian_apply(f);
        res.axpy(-lam, f);
        CHECK(l2_norm(res) / (lam * l2_norm(f)) < 1e-13);
    }
}

TEST_CASE("laplacian eigenpair identity in 1D") {
    const Domain d = Domain::interval(2.0, 41);
    const GridFunction f =
        GridFunction::sample(d, [&](double x, double) { return std::sin(2.0 * pi * x / 2.0); });
    const double lam = laplacian_eigenvalue(d, 2);
    GridFunction res = laplacian_apply(f);
    res.axpy(-lam, f);
    CHECK(l2_norm(res) / (lam * l2_norm(f)) < 1e-13);
}

TEST_CASE("poisson solve inverts the stencil") {
    std::mt19937_64 rng(31);
    const Domain d = Domain::box(1.0, 2.0, 32, 24);

    CHECK(l2_norm(poisson_solve(GridFunction(d))) == 0.0);

    const GridFunction f = random_field(d, rng);
    const GridFunction back = poisson_solve(laplacian_apply(f));
    GridFunction diff = back;
    diff -= f;
    CHECK(l2_norm(diff) / l2_norm(f) < 1e-12);

    // First eigenfunction: g = lambda_1 phi_1 comes back as phi_1.
    const GridFunction phi1 = first_eigenmode(d);
    const double lam1 = mode_table(d).front().eigenvalue;
    const GridFunction sol = poisson_solve(lam1 * phi1);
    GridFunction err = sol;
    err -= phi1;
    CHECK(l2_norm(err) / l2_norm(phi1) < 1e-12);
}

TEST_CASE("dirichlet form matches the analytic integral and is symmetric") {
    const Domain d = Domain::box(1.0, 1.0, 64, 64);
    const GridFunction f = GridFunction::sample(
        d, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });

    CHECK(h1_inner(GridFunction(d), GridFunction(d)) == 0.0);
    CHECK(rel_err(h1_inner(f, f), pi * pi / 2.0) < 3e-4); // O(h^2) at n=64

    std::mt19937_64 rng(7);
    const GridFunction a = random_field(d, rng);
    const GridFunction b = random_field(d, rng);
    CHECK(rel_err(h1_inner(a, b), h1_inner(b, a)) < 1e-12);

    const Domain other = Domain::box(1.0, 1.0, 16, 16);
    CHECK_THROWS_AS((void)h1_inner(a, GridFunction(other)), DomainMismatchError);
}

TEST_CASE("dirichlet form is positive definite") {
    std::mt19937_64 rng(11);
    const Domain d = Domain::box(1.0, 1.0, 12, 12);
    for (int trial = 0; trial < 10; ++trial) {
        const GridFunction f = random_field(d, rng);
        CHECK(h1_inner(f, f) > 0.0);
    }
}

TEST_CASE("lp integral of the first eigenfunction and of negatives") {
    const Domain d = Domain::box(1.0, 1.0, 40, 40);
    const GridFunction f = GridFunction::sample(
        d, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });

    CHECK(lp_integral(GridFunction(d), 2.0) == 0.0);
    // The square of the sine mode is summed exactly by the midpoint rule.
    CHECK(rel_err(lp_integral(f, 2.0), 0.25) < 1e-14);

    GridFunction neg(d);
    for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -1.0;
    CHECK(lp_integral(neg, 3.0, true) == 0.0);
    CHECK(lp_integral(neg, 3.0, false) == doctest::Approx(1.0 * d.cell_volume() * neg.size()));

    CHECK_THROWS_AS((void)lp_integral(f, 0.5), InvalidParamsError);
}

TEST_CASE("positive and negative parts decompose exactly") {
    std::mt19937_64 rng(23);
    const Domain d = Domain::interval(1.0, 33);
    const GridFunction f = random_field(d, rng);
    const GridFunction p = positive_part(f);
    const GridFunction n = negative_part(f);
    for (std::size_t i = 0; i < f.size(); ++i) {
        CHECK(p[i] >= 0.0);
        CHECK(n[i] <= 0.0);
        CHECK(p[i] + n[i] == f[i]);
    }

    GridFunction nonneg(d);
    for (std::size_t i = 0; i < nonneg.size(); ++i) nonneg[i] = 0.25 + 0.5 * (i % 3);
    const GridFunction pp = positive_part(nonneg);
    for (std::size_t i = 0; i < nonneg.size(); ++i) CHECK(pp[i] == nonneg[i]);
    const GridFunction pz = positive_part(-1.0 * nonneg);
    CHECK(max_value(pz) == 0.0);
}

TEST_CASE("quadratures converge at second order") {
    // For Dirichlet-zero f the boundary term of the trapezoid error of
    // int f^r vanishes when r >= 2, so the r = 1 integral carries the
    // genuine second-order behavior.
    auto poly = [](double x, double y) { return x * (1.0 - x) * y * (1.0 - y); };
    const double exact_h1 = 2.0 / 90.0;
    const double exact_l1 = 1.0 / 36.0;

    double err_h1[3], err_l1[3];
    int n = 16;
    for (int level = 0; level < 3; ++level, n *= 2) {
        const Domain d = Domain::box(1.0, 1.0, n, n);
        const GridFunction u = GridFunction::sample(d, poly);
        err_h1[level] = std::abs(h1_inner(u, u) - exact_h1);
        err_l1[level] = std::abs(lp_integral(u, 1.0) - exact_l1);
    }
    for (int level = 0; level < 2; ++level) {
        const double rate_h1 = std::log2(err_h1[level] / err_h1[level + 1]);
        const double rate_l1 = std::log2(err_l1[level] / err_l1[level + 1]);
        CHECK(rate_h1 > 1.8);
        CHECK(rate_h1 < 2.2);
        CHECK(rate_l1 > 1.8);
        CHECK(rate_l1 < 2.2);
    }
}

TEST_CASE("spectral truncation is a projection in the dirichlet form") {
    std::mt19937_64 rng(5);
    const Domain d = Domain::box(1.0, 1.0, 14, 14);
    const GridFunction f = random_field(d, rng);
    const GridFunction g = random_field(d, rng);
    const std::size_t total = mode_table(d).size();

    // Projector fixes its range.
    const GridFunction phi1 = first_eigenmode(d);
    GridFunction fixed = spectral_truncate(phi1, 1);
    fixed -= phi1;
    CHECK(h1_norm(fixed) < 1e-12);

    // Completeness.
    GridFunction full = spectral_truncate(f, total);
    full -= f;
    CHECK(h1_norm(full) / h1_norm(f) < 1e-12);

    // Idempotence and self-adjointness at k = 9.
    const GridFunction tf = spectral_truncate(f, 9);
    GridFunction twice = spectral_truncate(tf, 9);
    twice -= tf;
    CHECK(h1_norm(twice) / h1_norm(tf) < 1e-10);
    CHECK(rel_err(h1_inner(tf, g), h1_inner(f, spectral_truncate(g, 9))) < 1e-10);

    CHECK_THROWS_AS((void)spectral_truncate(f, total + 1), InvalidParamsError);
    CHECK_THROWS_AS((void)spectral_truncate(f, 0), InvalidParamsError);
}

TEST_CASE("mode table is sorted with lexicographic tie-break") {
    const Domain d = Domain::box(1.0, 1.0, 8, 8);
    const auto& modes = mode_table(d);
    REQUIRE(modes.size() == 64);
    for (std::size_t i = 1; i < modes.size(); ++i)
        CHECK(modes[i].eigenvalue >= modes[i - 1].eigenvalue);
    // On the square the (1,2)/(2,1) pair is degenerate; (1,2) must come first.
    CHECK(modes[1].mx == 1);
    CHECK(modes[1].my == 2);
    CHECK(modes[2].mx == 2);
    CHECK(modes[2].my == 1);
}

TEST_CASE("spectral transform is the orthonormal coefficient map") {
    const Domain d = Domain::box(1.0, 1.0, 10, 10);
    const GridFunction phi1 = first_eigenmode(d);
    CHECK(rel_err(l2_norm(phi1), 1.0) < 1e-13);

    const std::vector<double> coeffs = spectral_transform(phi1);
    CHECK(rel_err(coeffs[0], 1.0) < 1e-12);
    double tail = 0.0;
    for (std::size_t i = 1; i < coeffs.size(); ++i) tail = std::max(tail, std::abs(coeffs[i]));
    CHECK(tail < 1e-12);

    // Parseval in both the weighted L2 and the Dirichlet form.
    std::mt19937_64 rng(55);
    const GridFunction f = random_field(d, rng);
    const std::vector<double> c = spectral_transform(f);
    const auto& modes = mode_table(d);
    double sum_l2 = 0.0, sum_h1 = 0.0;
    for (std::size_t m = 0; m < c.size(); ++m) {
        sum_l2 += c[m] * c[m];
        sum_h1 += modes[m].eigenvalue * c[m] * c[m];
    }
    CHECK(rel_err(sum_l2, l2_inner(f, f)) < 1e-12);
    CHECK(rel_err(sum_h1, h1_inner(f, f)) < 1e-12);
}

TEST_CASE("kernel parallel paths match the serial references") {
    std::mt19937_64 rng(99);
    const int nx = 37, ny = 29;
    std::vector<double> f(static_cast<std::size_t>(nx) * ny);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& v : f) v = dist(rng);

    std::vector<double> a(f.size()), b(f.size());
    kernels::neg_laplacian_2d(f.data(), a.data(), nx, ny, 3.0, 5.0);
    kernels::neg_laplacian_2d_serial(f.data(), b.data(), nx, ny, 3.0, 5.0);
    CHECK(a == b);

    const auto& tx = kernels::sine_table(nx);
    kernels::sine_apply_rows(tx, f.data(), a.data(), nx, ny);
    kernels::sine_apply_rows_serial(tx, f.data(), b.data(), nx, ny);
    CHECK(a == b);

    const auto& ty = kernels::sine_table(ny);
    kernels::sine_apply_cols(ty, f.data(), a.data(), nx, ny);
    kernels::sine_apply_cols_serial(ty, f.data(), b.data(), nx, ny);
    CHECK(a == b);

    const double blocked = kernels::indexed_sum(f.size(), [&](std::size_t i) { return f[i]; });
    const double naive =
        kernels::indexed_sum_serial(f.size(), [&](std::size_t i) { return f[i]; });
    CHECK(rel_err(blocked, naive) < 1e-13);

    // The blocked reduction is bit-identical with OpenMP on and off.
    kernels::set_parallel(false);
    const double blocked_off = kernels::indexed_sum(f.size(), [&](std::size_t i) { return f[i]; });
    kernels::set_parallel(true);
    CHECK(blocked == blocked_off);
}

TEST_CASE("csv dump format") {
    const Domain d2 = Domain::box(1.0, 1.0, 3, 3);
    GridFunction f(d2);
    f[0] = 0.5;
    std::ostringstream out;
    write_csv(f, out);
    const std::string text = out.str();
    CHECK(text.substr(0, 10) == "x,y,value\n");
    CHECK(text.find("0.25,0.25,0.5\n") != std::string::npos);

    const Domain d1 = Domain::interval(1.0, 3);
    std::ostringstream out1;
    write_csv(GridFunction(d1), out1);
    CHECK(out1.str().substr(0, 8) == "x,value\n");
}

TEST_CASE("domain validation") {
    CHECK_THROWS_AS(Domain::box(-1.0, 1.0, 8, 8), InvalidParamsError);
    CHECK_THROWS_AS(Domain::box(1.0, 1.0, 2, 8), InvalidParamsError);
    CHECK_THROWS_AS(Domain::interval(0.0, 8), InvalidParamsError);
    const Domain d = Domain::box(2.0, 1.0, 9, 4);
    CHECK(d.cell_volume() == doctest::Approx(d.hx() * d.hy()));
    CHECK(d.node_count() == 36);
}
