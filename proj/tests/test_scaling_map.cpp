#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nf/scaling_map.hpp"
#include "test_support.hpp"

using namespace nf;
using nft::random_coeffs;

namespace {

// Reference fixture: ell=2, p=3, a=(1,1), b=(2,2), d12=d21=1, alpha=beta=1.
ScalingCoeffs symmetric_fixture() {
    ScalingCoeffs c = ScalingCoeffs::decoupled({1.0, 1.0}, {2.0, 2.0}, 3.0);
    c.d = {0.0, 1.0, 1.0, 0.0};
    return c;
}

} // namespace

TEST_CASE("map evaluation matches hand values") {
    const ScalingCoeffs c = symmetric_fixture();
    const std::vector<double> at_one = eval_scaling_map(c, std::vector<double>{1.0, 1.0});
    CHECK(at_one[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(at_one[1] == doctest::Approx(0.0).epsilon(1e-15));

    const std::vector<double> at_two = eval_scaling_map(c, std::vector<double>{2.0, 2.0});
    CHECK(at_two[0] == doctest::Approx(-10.0)); // 2 - 16 + 4
    CHECK(at_two[1] == doctest::Approx(-10.0));

    const ScalingCoeffs dec = ScalingCoeffs::decoupled({1.0, 2.0}, {3.0, 5.0}, 2.7);
    std::vector<double> root(2);
    for (int i = 0; i < 2; ++i) root[i] = std::pow(dec.a[i] / dec.b[i], 1.0 / (dec.p - 1.0));
    for (double v : eval_scaling_map(dec, root)) CHECK(std::abs(v) < 1e-14);

    CHECK_THROWS_AS((void)eval_scaling_map(c, std::vector<double>{1.0, 0.0}), InvalidParamsError);
}

TEST_CASE("jacobian matches the analytic specializations") {
    const ScalingCoeffs dec = ScalingCoeffs::decoupled({1.0, 1.0}, {1.0, 1.0}, 3.0);
    const std::vector<double> j = scaling_jacobian(dec, std::vector<double>{1.0, 1.0});
    CHECK(j[0] == doctest::Approx(-2.0)); // 1 - 3
    CHECK(j[1] == 0.0);
    CHECK(j[2] == 0.0);
    CHECK(j[3] == doctest::Approx(-2.0));

    ScalingCoeffs c = symmetric_fixture();
    c.alpha = {1.0, 0.7, 1.3, 1.0};
    c.beta = {1.0, 1.0, 0.8, 1.0};
    const std::vector<double> s{0.8, 1.4};
    const std::vector<double> jc = scaling_jacobian(c, s);
    // beta_12 = 1: off-diagonal (1,2) entry is d_12 s_1^alpha_12 exactly.
    CHECK(jc[1] == doctest::Approx(1.0 * std::pow(0.8, 0.7)).epsilon(1e-15));
}

TEST_CASE("jacobian matches central finite differences") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unit(0.4, 1.8);
    for (int trial = 0; trial < 25; ++trial) {
        const int ell = 2 + static_cast<int>(trial % 3);
        const ScalingCoeffs c = random_coeffs(ell, rng);
        std::vector<double> s(ell);
        for (double& v : s) v = unit(rng);

        const std::vector<double> jac = scaling_jacobian(c, s);
        const double h = 1e-6;
        for (int col = 0; col < ell; ++col) {
            std::vector<double> sp = s, sm = s;
            sp[col] += h;
            sm[col] -= h;
            const std::vector<double> fp = eval_scaling_map(c, sp);
            const std::vector<double> fm = eval_scaling_map(c, sm);
            for (int row = 0; row < ell; ++row) {
                const double fd = (fp[row] - fm[row]) / (2.0 * h);
                const double an = jac[static_cast<std::size_t>(row) * ell + col];
                CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
            }
        }
    }
}

TEST_CASE("bracket encloses the zero with the right face signs") {
    SUBCASE("decoupled closed form for r") {
        const ScalingCoeffs c = ScalingCoeffs::decoupled({1.0, 1.0}, {1.0, 1.0}, 3.0);
        const ScalingBracket box = scaling_bracket(c);
        CHECK(box.r == doctest::Approx(0.5).epsilon(1e-15));
        const std::vector<double> at_r = eval_scaling_map(c, std::vector<double>{box.r, box.r});
        CHECK(at_r[0] > 0.0);
        const std::vector<double> at_R = eval_scaling_map(c, std::vector<double>{box.R, box.r});
        CHECK(at_R[0] < 0.0);
    }
    SUBCASE("containment of the known root") {
        const ScalingCoeffs c = symmetric_fixture();
        const ScalingBracket box = scaling_bracket(c);
        CHECK(box.r < 1.0);
        CHECK(box.R > 1.0);
    }
    SUBCASE("r depends only on the ratio a/b") {
        ScalingCoeffs c = symmetric_fixture();
        const double r1 = scaling_bracket(c).r;
        for (double& v : c.a) v *= 37.0;
        for (double& v : c.b) v *= 37.0;
        CHECK(scaling_bracket(c).r == doctest::Approx(r1).epsilon(1e-15));
    }
    SUBCASE("no bracket when some b vanishes") {
        ScalingCoeffs c = symmetric_fixture();
        c.b[1] = 0.0;
        CHECK_THROWS_AS((void)scaling_bracket(c), NoZeroError);
    }
}

TEST_CASE("solve_scaling finds the documented roots") {
    const std::vector<double> s = solve_scaling(symmetric_fixture());
    CHECK(std::abs(s[0] - 1.0) < 1e-12);
    CHECK(std::abs(s[1] - 1.0) < 1e-12);

    const ScalingCoeffs dec = ScalingCoeffs::decoupled({1.0, 2.0, 0.3}, {2.0, 0.7, 1.1}, 3.4);
    const std::vector<double> sd = solve_scaling(dec);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(sd[i] - std::pow(dec.a[i] / dec.b[i], 1.0 / (dec.p - 1.0))) < 1e-12);

    ScalingCoeffs no_zero = symmetric_fixture();
    no_zero.b = {0.0, 1.0};
    CHECK_THROWS_AS((void)solve_scaling(no_zero), NoZeroError);
}

TEST_CASE("uniqueness: multi-start convergence to one root") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int ell : {2, 3, 4}) {
        for (int sample = 0; sample < 20; ++sample) {
            const ScalingCoeffs c = random_coeffs(ell, rng);
            const ScalingBracket box = scaling_bracket(c);
            const std::vector<double> s_ref = solve_scaling(c);
            for (int start = 0; start < 10; ++start) {
                std::vector<double> s0(ell);
                for (double& v : s0) v = box.r + (box.R - box.r) * unit(rng);
                const std::vector<double> s = solve_scaling_from(c, s0);
                for (int i = 0; i < ell; ++i) CHECK(std::abs(s[i] - s_ref[i]) <= 1e-9);
            }
        }
    }
}

TEST_CASE("degree sign equals (-1)^ell at nondegenerate roots") {
    const ScalingCoeffs c2 = ScalingCoeffs::decoupled({1.0, 1.0}, {1.0, 1.0}, 3.0);
    CHECK(degree_sign_check(c2, solve_scaling(c2)) == 1);

    const ScalingCoeffs c3 = ScalingCoeffs::decoupled({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, 3.0);
    CHECK(degree_sign_check(c3, solve_scaling(c3)) == -1);

    std::mt19937_64 rng(77);
    for (int ell : {1, 2, 3}) {
        for (int sample = 0; sample < 30; ++sample) {
            const ScalingCoeffs c = random_coeffs(ell, rng);
            const int sign = degree_sign_check(c, solve_scaling(c));
            const int expected = ell % 2 == 0 ? 1 : -1;
            CHECK((sign == 0 || sign == expected));
        }
    }
}

TEST_CASE("scaling covariance of the root under normalization") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unit(0.5, 2.0);
    for (int sample = 0; sample < 10; ++sample) {
        const int ell = 2 + sample % 2;
        const ScalingCoeffs c = random_coeffs(ell, rng);
        const std::vector<double> s = solve_scaling(c);

        std::vector<double> s0(ell);
        for (double& v : s0) v = unit(rng);
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
        for (int i = 0; i < ell; ++i) CHECK(std::abs(mapped[i] - s[i] / s0[i]) < 1e-9);
    }
}

TEST_CASE("continuity of the root in the coefficients") {
    const ScalingCoeffs c = symmetric_fixture();
    CHECK(continuity_probe(c, c) == 0.0);

    ScalingCoeffs cp = c;
    cp.a[0] += 1e-8;
    CHECK(continuity_probe(c, cp) <= 1e-4);

    // Shrinking perturbations give shrinking probes.
    const std::vector<double> s_ref = solve_scaling(c);
    double prev = 1e100;
    for (double da : {0.1, 0.01, 0.001, 0.0001}) {
        ScalingCoeffs cc = c;
        cc.a[0] += da;
        const double probe = continuity_probe(c, cc, s_ref);
        CHECK(probe < prev);
        prev = probe;
    }
}

TEST_CASE("coefficient validation rejects bad exponents") {
    ScalingCoeffs c = symmetric_fixture();
    c.alpha = {1.0, 2.0, 1.0, 1.0};
    c.beta = {1.0, 1.5, 1.0, 1.0}; // alpha + beta = 3.5 >= p = 3
    CHECK_THROWS_AS(c.validate(), InvalidParamsError);

    ScalingCoeffs neg = symmetric_fixture();
    neg.a[0] = 0.0;
    CHECK_THROWS_AS(neg.validate(), InvalidParamsError);
}
