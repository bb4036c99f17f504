#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "openrabi/analytic.hpp"

using namespace openrabi;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

SystemParams table1_row4() {
    SystemParams p;
    p.omega0 = 1.0;
    p.g = 0.02;
    p.gamma_ph = 0.02;
    p.gamma = 0.01;
    p.kappa = 0.01;
    return p;
}

SystemParams table2_rates(double g, double delta_plus) {
    SystemParams p;
    p.omega0 = delta_plus - 1.0;
    p.g = g;
    p.gamma_ph = 0.002;
    p.gamma = 0.01;
    p.kappa = 0.01;
    return p;
}

}  // namespace

TEST_CASE("chi arithmetic") {
    CHECK_THAT(analytic::chi(table1_row4()), WithinRel(0.03, 1e-14));
    SystemParams p;
    CHECK_THAT(analytic::chi(p), WithinAbs(0.0, 0.0));
    p = SystemParams{};
    p.n_t = 1.0;
    p.gamma = 0.01;
    CHECK_THAT(analytic::chi(p), WithinRel(0.015, 1e-14));
    p = SystemParams{};
    p.gamma_ph = 0.004;
    p.Gamma_ph = 0.002;
    p.kappa = 0.006;
    p.gamma = 0.01;
    p.n_t = 0.5;
    CHECK_THAT(analytic::chi(p), WithinRel(0.004 + 0.002 + 0.003 + 0.01, 1e-14));
}

TEST_CASE("pure-dephasing asymptotic rate") {
    SystemParams p;
    p.omega0 = 1.0;
    p.g = 0.02;
    p.gamma_ph = 0.05;
    const double expected = 2.0 * 0.05 * 0.02 * 0.02 / (4.0 + 0.05 * 0.05);
    CHECK_THAT(analytic::photon_rate_asymptotic(p), WithinRel(expected, 1e-14));
    CHECK_THAT(analytic::photon_rate_asymptotic(p), WithinRel(9.993753903810118e-6, 1e-12));

    p.g = 0.0;
    CHECK(analytic::photon_rate_asymptotic(p) == 0.0);
    p.g = 0.02;
    p.gamma_ph = 0.0;
    CHECK(analytic::photon_rate_asymptotic(p) == 0.0);
}

TEST_CASE("small-dephasing limit of the rate") {
    SystemParams p;
    p.omega0 = 1.0;
    p.g = 0.02;
    p.gamma_ph = 0.05;  // gamma_ph << delta_plus
    const double simplified = 2.0 * p.gamma_ph * p.g * p.g /
                              (p.delta_plus() * p.delta_plus());
    CHECK_THAT(analytic::photon_rate_asymptotic(p), WithinRel(simplified, 0.01));
}

TEST_CASE("stationary values") {
    SECTION("reference damping-scan row") {
        const SystemParams p = table1_row4();
        const double chi = 0.03;
        const double theta = 0.02 * 0.02 / (4.0 + chi * chi);
        const auto v = analytic::stationary(p);
        CHECK_THAT(v.n_inf, WithinRel(2.0 * theta * chi / 0.01, 1e-13));
        CHECK_THAT(v.n_inf, WithinRel(5.99865030368167e-4, 1e-10));
        CHECK_THAT(v.sz_inf + 1.0, WithinRel(4.0 * theta * chi / (0.01 * 0.5), 1e-12));
        CHECK_THAT(v.sz_inf + 1.0, WithinRel(2.399460121472668e-3, 1e-10));
    }
    SECTION("no coupling returns the uncoupled equilibrium") {
        SystemParams p;
        p.g = 0.0;
        p.kappa = 0.01;
        p.gamma = 0.01;
        p.n_t = 0.25;
        const auto v = analytic::stationary(p);
        CHECK_THAT(v.n_inf, WithinRel(p.n_t, 1e-14));
        CHECK_THAT(v.sz_inf, WithinRel(-1.0 / 1.5, 1e-14));
    }
    SECTION("quadratic coupling scaling") {
        SystemParams p = table1_row4();
        const double base = analytic::stationary(p).n_inf - p.n_t;
        p.g *= 2.0;
        const double doubled = analytic::stationary(p).n_inf - p.n_t;
        CHECK_THAT(doubled, WithinRel(4.0 * base, 1e-13));
    }
    SECTION("zero damping rejected") {
        SystemParams p;
        p.g = 0.02;
        p.gamma = 0.01;
        CHECK_THROWS_AS(analytic::stationary(p), DivisionByZero);
        p.gamma = 0.0;
        p.kappa = 0.01;
        CHECK_THROWS_AS(analytic::stationary(p), DivisionByZero);
    }
}

TEST_CASE("bounds against the detuning-scan reference rows") {
    SECTION("g = 0.02, delta_plus = 1.0") {
        const auto b = analytic::bounds(table2_rates(0.02, 1.0));
        CHECK_THAT(b.n_lower, WithinRel(4.00e-4, 2e-3));
        CHECK_THAT(b.n_upper, WithinRel(9.60e-4, 2e-3));
        CHECK_THAT(b.s_lower, WithinRel(16.0e-4, 2e-3));
        CHECK_THAT(b.s_upper, WithinRel(38.4e-4, 2e-3));
    }
    SECTION("g = 0.008, delta_plus = 2.0") {
        const auto b = analytic::bounds(table2_rates(0.008, 2.0));
        CHECK_THAT(b.n_lower, WithinRel(0.16e-4, 2e-3));
        CHECK_THAT(b.n_upper, WithinRel(0.38e-4, 2e-2));
    }
    SECTION("homogeneity in g") {
        const auto b1 = analytic::bounds(table2_rates(0.01, 1.6));
        const auto b3 = analytic::bounds(table2_rates(0.03, 1.6));
        CHECK_THAT(b3.n_lower, WithinRel(9.0 * b1.n_lower, 1e-12));
        CHECK_THAT(b3.n_upper, WithinRel(9.0 * b1.n_upper, 1e-12));
        CHECK_THAT(b3.s_lower, WithinRel(9.0 * b1.s_lower, 1e-12));
        CHECK_THAT(b3.s_upper, WithinRel(9.0 * b1.s_upper, 1e-12));
    }
}

TEST_CASE("bound ordering holds for random valid parameters") {
    // 2 chi >= kappa always, so n_lower <= n_upper
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> rate(0.0, 0.2);
    for (int trial = 0; trial < 200; ++trial) {
        SystemParams p;
        p.omega0 = rate(rng) * 10.0;
        p.g = rate(rng);
        p.kappa = rate(rng) + 1e-6;
        p.gamma = rate(rng) + 1e-6;
        p.gamma_ph = rate(rng);
        p.Gamma_ph = rate(rng);
        p.n_t = rate(rng);
        const double chi = analytic::chi(p);
        CHECK(2.0 * chi >= p.kappa);
        const auto b = analytic::bounds(p);
        CHECK(b.n_lower <= b.n_upper * (1.0 + 1e-12));
        CHECK(b.s_lower <= b.s_upper * (1.0 + 1e-12));
    }
}

TEST_CASE("stationary photon number is smooth in g") {
    const SystemParams p = table1_row4();
    const double chi = analytic::chi(p);
    const double dp = p.delta_plus();
    const double analytic_derivative =
        4.0 * p.g * chi / (p.kappa * (dp * dp + chi * chi));
    const double h = 1e-5;
    SystemParams hi = p, lo = p;
    hi.g += h;
    lo.g -= h;
    const double fd = (analytic::stationary(hi).n_inf - analytic::stationary(lo).n_inf) /
                      (2.0 * h);
    CHECK_THAT(fd, WithinRel(analytic_derivative, 1e-6));
}

TEST_CASE("full prediction bundle is internally consistent") {
    const SystemParams p = table1_row4();
    const auto a = analytic::predict(p);
    CHECK_THAT(a.n_inf - p.n_t, WithinRel(a.n_upper, 1e-13));
    CHECK_THAT(a.sz_inf + 1.0 / (2.0 * p.n_t + 1.0), WithinRel(a.s_upper, 1e-13));
    CHECK_THAT(a.theta, WithinRel(a.n_lower, 1e-15));
    CHECK(a.chi > 0.0);
    CHECK(a.theta <= (p.g / a.chi) * (p.g / a.chi));
}
