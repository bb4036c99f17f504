#include "catch_amalgamated.hpp"

#include <cmath>
#include <vector>

#include "openrabi/analytic.hpp"
#include "openrabi/evolve.hpp"
#include "test_support.hpp"

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

std::vector<ObservableRecord> synthetic_linear(double slope, double value0, int n) {
    std::vector<ObservableRecord> t(n);
    for (int i = 0; i < n; ++i) {
        t[i].t = double(i);
        t[i].mean_n = value0 + slope * double(i);
    }
    return t;
}

}  // namespace

TEST_CASE("adaptive integrator reproduces exponential decay") {
    // scalar-equivalent complex system: rho' = -kappa rho on a 1x1-ish space
    const TruncatedSpace s(1);
    SystemParams p;
    p.omega0 = 0.0;
    p.kappa = 0.08;
    const Superoperator gen = assemble(p, s, ModelKind::Rabi);
    const DensityMatrix one = DensityMatrix::pure(s, 0, 1);
    EvolveOptions opts;
    opts.tail_threshold = 2.0;  // the initial state occupies the top level
    const auto trace = evolve(one, gen, 40.0, 5.0, opts);
    for (const ObservableRecord& r : trace)
        CHECK_THAT(r.mean_n, WithinAbs(std::exp(-p.kappa * r.t), 1e-8));
}

TEST_CASE("eigenstates of the decoupled model are stationary") {
    const TruncatedSpace s(4);
    SystemParams p;
    p.omega0 = 1.0;
    const Superoperator gen = assemble(p, s, ModelKind::Rabi);
    const auto trace = evolve(DensityMatrix::pure(s, 1, 0), gen, 50.0, 5.0);
    for (const ObservableRecord& r : trace) {
        CHECK_THAT(r.mean_sz, WithinAbs(1.0, 1e-12));
        CHECK_THAT(r.mean_n, WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("rotating-wave dephasing leaves the vacuum dark") {
    const TruncatedSpace s(6);
    SystemParams p;
    p.omega0 = 1.0;
    p.g = 0.02;
    p.gamma_ph = 0.05;
    const Superoperator gen = assemble(p, s, ModelKind::JaynesCummings);
    const auto trace = evolve(DensityMatrix::pure(s, 0, 0), gen, 200.0, 5.0);
    for (const ObservableRecord& r : trace) CHECK(std::abs(r.mean_n) < 1e-10);
}

TEST_CASE("counter-rotating term generates photons from the vacuum") {
    const TruncatedSpace s(10);
    SystemParams p;
    p.omega0 = 1.0;
    p.g = 0.02;
    p.gamma_ph = 0.05;
    const Superoperator gen = assemble(p, s, ModelKind::Rabi);
    EvolveStats stats;
    const auto trace = evolve(DensityMatrix::pure(s, 0, 0), gen, 600.0, 1.0, {}, &stats);

    for (const ObservableRecord& r : trace)
        if (r.t > 0.0) CHECK(r.mean_n > 0.0);

    // run-quality invariants
    CHECK(stats.max_trace_err < 1e-8);
    CHECK(stats.max_herm_err < 1e-10);
    CHECK(stats.min_eigenvalue > -1e-8);

    const RateEstimate est = asymptotic_rate(trace, 0.5);
    const double formula = analytic::photon_rate_asymptotic(p);
    CHECK(est.linearity_r2 > 0.999);
    CHECK(est.slope > 0.5 * formula);
    CHECK(est.slope < 2.0 * formula);

    // closure variables stay near their vacuum values
    double zeta_sum = 0.0;
    std::size_t m = 0;
    for (const ObservableRecord& r : trace)
        if (r.t >= est.t_start) {
            zeta_sum += r.zeta;
            ++m;
        }
    const double zeta_a = zeta_sum / double(m);
    CHECK(zeta_a > -1.15);
    CHECK(zeta_a < -0.85);
}

TEST_CASE("asymptotic rate estimator") {
    SECTION("recovers an exact line") {
        const auto est = asymptotic_rate(synthetic_linear(3e-6, 1e-4, 400), 0.5);
        CHECK_THAT(est.slope, WithinRel(3e-6, 1e-12));
        CHECK(est.residual_rms < 1e-18);
        CHECK(est.linearity_r2 == 1.0);
    }
    SECTION("flat input gives zero slope, not an error") {
        const auto est = asymptotic_rate(synthetic_linear(0.0, 0.5, 200), 0.5);
        CHECK_THAT(est.slope, WithinAbs(0.0, 1e-16));
        CHECK(est.linearity_r2 == 1.0);
    }
    SECTION("short window rejected") {
        CHECK_THROWS_AS(asymptotic_rate(synthetic_linear(1e-6, 0.0, 12), 0.1),
                        WindowTooShort);
    }
    SECTION("curved trend rejected as non-asymptotic") {
        std::vector<ObservableRecord> t(200);
        for (int i = 0; i < 200; ++i) {
            t[i].t = double(i);
            t[i].mean_n = 1e-6 * double(i) * double(i);
        }
        CHECK_THROWS_AS(asymptotic_rate(t, 1.0), NonlinearTail);
    }
    SECTION("window inside the simulated range") {
        const auto est = asymptotic_rate(synthetic_linear(1e-6, 0.0, 300), 0.25);
        CHECK(est.t_start >= 0.75 * 299.0 - 1.0);
        CHECK(est.t_end <= 299.0);
        CHECK(est.linearity_r2 >= 0.0);
        CHECK(est.linearity_r2 <= 1.0);
    }
}

TEST_CASE("steady state of the decoupled damped system is thermal") {
    const TruncatedSpace s(12);
    SystemParams p;
    p.omega0 = 1.0;
    p.g = 0.0;
    p.kappa = 0.02;
    p.gamma = 0.015;
    p.n_t = 0.1;
    const Superoperator gen = assemble(p, s, ModelKind::Rabi);
    SteadyStateInfo info;
    const DensityMatrix rho = steady_state(gen, &info);
    CHECK(info.residual < 1e-10);

    // independent construction: truncated thermal field (x) atomic Gibbs
    DenseMatrix expected = DenseMatrix::Zero(s.dim_total(), s.dim_total());
    const double q = p.n_t / (p.n_t + 1.0);
    double field_norm = 0.0;
    std::vector<double> pk(s.dim_field());
    for (int k = 0; k <= s.n_max(); ++k) {
        pk[k] = std::pow(q, k);
        field_norm += pk[k];
    }
    const double pg = (p.n_t + 1.0) / (2.0 * p.n_t + 1.0);
    for (int k = 0; k <= s.n_max(); ++k) {
        expected(s.index(0, k), s.index(0, k)) = pg * pk[k] / field_norm;
        expected(s.index(1, k), s.index(1, k)) = (1.0 - pg) * pk[k] / field_norm;
    }
    CHECK((rho.matrix() - expected).cwiseAbs().maxCoeff() < 1e-10);

    double thermal_mean = 0.0;
    for (int k = 0; k <= s.n_max(); ++k) thermal_mean += k * pk[k] / field_norm;
    CHECK_THAT(expectation_real(rho, field_operator(s, FieldOp::Number)),
               WithinAbs(thermal_mean, 1e-10));
    CHECK_THAT(expectation_real(rho, atom_operator(s, AtomOp::Z)),
               WithinAbs(-1.0 / (2.0 * p.n_t + 1.0), 1e-10));
}

TEST_CASE("steady state matches the exact identity at omega0 = 0") {
    // at omega0 = 0 the correlator pair closes exactly and
    // <n>_inf = n_t + 2 Theta chi / kappa holds with equality
    SECTION("weak coupling") {
        const TruncatedSpace s(12);
        SystemParams p = table1_row4();
        p.omega0 = 0.0;
        const Superoperator gen = assemble(p, s, ModelKind::Rabi);
        const DensityMatrix rho = steady_state(gen);
        const double mean_n = expectation_real(rho, field_operator(s, FieldOp::Number));
        CHECK_THAT(mean_n, WithinRel(analytic::stationary(p).n_inf, 1e-6));
    }
    SECTION("independent of the mean photon number") {
        // 60x more photons, same equality
        const TruncatedSpace s(14);
        SystemParams p = table1_row4();
        p.omega0 = 0.0;
        p.g = 0.1;
        const Superoperator gen = assemble(p, s, ModelKind::Rabi);
        const DensityMatrix rho = steady_state(gen);
        const double mean_n = expectation_real(rho, field_operator(s, FieldOp::Number));
        CHECK(mean_n > 0.05);
        CHECK_THAT(mean_n, WithinRel(analytic::stationary(p).n_inf, 1e-6));
    }
}

TEST_CASE("no steady state in the pure-dephasing linear-growth regime") {
    const TruncatedSpace s(6);
    SystemParams p;
    p.omega0 = 1.0;
    p.g = 0.02;
    p.gamma_ph = 0.05;
    const Superoperator gen = assemble(p, s, ModelKind::Rabi);
    CHECK_THROWS_AS(steady_state(gen), NoSteadyState);
}

TEST_CASE("degenerate kernel is detected") {
    // g = 0 and gamma = 0: the atomic populations are conserved, so any
    // mixture of the two atomic sectors is stationary
    const TruncatedSpace s(5);
    SystemParams p;
    p.omega0 = 1.0;
    p.g = 0.0;
    p.kappa = 0.02;
    p.gamma_ph = 0.01;
    const Superoperator gen = assemble(p, s, ModelKind::Rabi);
    CHECK_THROWS_AS(steady_state(gen), DegenerateKernel);
}

TEST_CASE("steady state agrees with the long-time limit of evolve") {
    const TruncatedSpace s(10);
    const SystemParams p = table1_row4();
    const Superoperator gen = assemble(p, s, ModelKind::Rabi);
    const DensityMatrix rho_inf = steady_state(gen);
    const double n_inf = expectation_real(rho_inf, field_operator(s, FieldOp::Number));

    const double t_end = 20.0 / std::min(p.kappa, p.gamma);
    const auto trace = evolve(DensityMatrix::pure(s, 0, 0), gen, t_end, t_end / 40.0);
    CHECK_THAT(trace.back().mean_n, WithinAbs(n_inf, 1e-6));
}

TEST_CASE("truncation ladder") {
    SECTION("no coupling converges immediately") {
        SystemParams p;
        p.omega0 = 1.0;
        p.g = 0.0;
        p.kappa = 0.01;
        p.gamma = 0.01;
        const auto r = truncation_convergence(p, ModelKind::Rabi, Probe::SteadyMeanN);
        CHECK(r.n_max == 4);
    }
    SECTION("reference regime converges by n_max = 12") {
        const auto r = truncation_convergence(table1_row4(), ModelKind::Rabi,
                                              Probe::SteadyMeanN);
        CHECK(r.n_max <= 12);
        CHECK(r.tail_pop < 1e-10);
        CHECK(r.rel_change < 1e-3);
    }
    SECTION("unreachable ceiling reports no convergence") {
        ConvergenceOptions opts;
        opts.n_start = 4;
        opts.n_ceiling = 7;  // no room for a single ladder step
        CHECK_THROWS_AS(truncation_convergence(table1_row4(), ModelKind::Rabi,
                                               Probe::SteadyMeanN, opts),
                        NoConvergence);
    }
}

TEST_CASE("tail overflow fires when the truncation is too small") {
    const TruncatedSpace s(2);
    SystemParams p;
    p.omega0 = 1.0;
    p.g = 0.3;  // strong coupling pushes population up the ladder
    p.gamma_ph = 0.05;
    const Superoperator gen = assemble(p, s, ModelKind::Rabi);
    EvolveOptions opts;
    opts.tail_threshold = 1e-6;
    CHECK_THROWS_AS(evolve(DensityMatrix::pure(s, 0, 0), gen, 200.0, 1.0, opts),
                    TailOverflow);
}

TEST_CASE("step budget failure is reported as a tolerance failure") {
    const TruncatedSpace s(4);
    SystemParams p;
    p.omega0 = 1.0;
    p.g = 0.02;
    p.gamma_ph = 0.05;
    const Superoperator gen = assemble(p, s, ModelKind::Rabi);
    EvolveOptions opts;
    opts.integrator.max_steps = 10;
    CHECK_THROWS_AS(evolve(DensityMatrix::pure(s, 0, 0), gen, 100.0, 1.0, opts),
                    ToleranceFailure);
}

TEST_CASE("halving the tolerance barely moves the result") {
    const TruncatedSpace s(8);
    SystemParams p;
    p.omega0 = 1.0;
    p.g = 0.02;
    p.gamma_ph = 0.05;
    const Superoperator gen = assemble(p, s, ModelKind::Rabi);
    const DensityMatrix rho0 = DensityMatrix::pure(s, 0, 0);

    EvolveOptions loose;
    const auto a = evolve(rho0, gen, 150.0, 5.0, loose);
    EvolveOptions tight;
    tight.integrator.rtol = 0.5e-9;
    tight.integrator.atol = 0.5e-12;
    const auto b = evolve(rho0, gen, 150.0, 5.0, tight);
    CHECK(std::abs(a.back().mean_n - b.back().mean_n) < 2e-9);
}
