#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "openrabi/analytic.hpp"
#include "openrabi/hilbert.hpp"
#include "openrabi/integrate.hpp"
#include "openrabi/liouvillian.hpp"

namespace openrabi {

// Time-stamped observables of one output sample. zeta and alpha are the
// closure variables <2 x^2 sz> and <(xp+px) sz>; the four correlators are
// the dynamic variables of the closed moment system.
struct ObservableRecord {
    double t = 0.0;
    double mean_n = 0.0;
    double mean_sz = 0.0;
    double zeta = 0.0;
    double alpha = 0.0;
    double p_sx = 0.0;
    double x_sx = 0.0;
    double p_sy = 0.0;
    double x_sy = 0.0;
    double trace = 0.0;
    double tail_pop = 0.0;
};

// The fixed observable set measured along every run.
class ObservableSet {
  public:
    explicit ObservableSet(const TruncatedSpace& space)
        : space_(space),
          n_(field_operator(space, FieldOp::Number)),
          sz_(atom_operator(space, AtomOp::Z)),
          zeta_(make_zeta(space)),
          alpha_(make_alpha(space)),
          p_sx_(field_operator(space, FieldOp::P) * atom_operator(space, AtomOp::X)),
          x_sx_(field_operator(space, FieldOp::X) * atom_operator(space, AtomOp::X)),
          p_sy_(field_operator(space, FieldOp::P) * atom_operator(space, AtomOp::Y)),
          x_sy_(field_operator(space, FieldOp::X) * atom_operator(space, AtomOp::Y)) {}

    ObservableRecord measure(double t, const DensityMatrix& rho) const {
        ObservableRecord r;
        r.t = t;
        r.mean_n = expectation_real(rho, n_);
        r.mean_sz = expectation_real(rho, sz_);
        r.zeta = expectation_real(rho, zeta_);
        r.alpha = expectation_real(rho, alpha_);
        r.p_sx = expectation_real(rho, p_sx_);
        r.x_sx = expectation_real(rho, x_sx_);
        r.p_sy = expectation_real(rho, p_sy_);
        r.x_sy = expectation_real(rho, x_sy_);
        r.trace = rho.trace();
        r.tail_pop = rho.tail_population();
        return r;
    }

  private:
    static Operator make_zeta(const TruncatedSpace& space) {
        const Operator x = field_operator(space, FieldOp::X);
        return 2.0 * (x * x * atom_operator(space, AtomOp::Z));
    }
    static Operator make_alpha(const TruncatedSpace& space) {
        const Operator x = field_operator(space, FieldOp::X);
        const Operator p = field_operator(space, FieldOp::P);
        return (x * p + p * x) * atom_operator(space, AtomOp::Z);
    }

    TruncatedSpace space_;
    Operator n_, sz_, zeta_, alpha_, p_sx_, x_sx_, p_sy_, x_sy_;
};

struct EvolveOptions {
    IntegratorOptions integrator{};
    double tail_threshold = 1e-6;    // TailOverflow above this
    double trace_tol = 1e-8;
    double herm_tol = 1e-10;
    double eig_tol = 1e-8;
    bool validate_states = true;     // invariant checks at every output sample
};

struct EvolveStats {
    double max_trace_err = 0.0;
    double max_herm_err = 0.0;
    double min_eigenvalue = 1.0;
    double max_tail_pop = 0.0;
    IntegratorStats integrator{};
};

// Integrates d rho/dt = gen(rho) with the matrix-free generator action,
// sampling observables every dt_out. Every sampled state is checked
// against the density-matrix invariants before measurement.
inline std::vector<ObservableRecord> evolve(const DensityMatrix& rho0,
                                            const Superoperator& gen, double t_end,
                                            double dt_out,
                                            const EvolveOptions& opts = {},
                                            EvolveStats* stats = nullptr) {
    require_same_space(rho0.space(), gen.space());
    if (!(t_end > 0.0)) throw InvalidParams("t_end must be positive");
    if (!(dt_out > 0.0)) throw InvalidParams("dt_out must be positive");

    const ObservableSet obs(gen.space());
    std::vector<ObservableRecord> records;
    records.reserve(static_cast<std::size_t>(t_end / dt_out) + 2);

    Superoperator::Workspace ws;
    EvolveStats local;

    IntegratorStats istats;
    integrate_adaptive(
        [&](double, const DenseMatrix& rho, DenseMatrix& drho) {
            gen.apply(rho, drho, ws);
        },
        rho0.matrix(), 0.0, t_end, dt_out,
        [&](double t, const DenseMatrix& m) {
            DensityMatrix state(gen.space(), m);
            const double trace_err = std::abs(state.trace() - 1.0);
            const double herm_err = state.hermiticity_error();
            const double tail = state.tail_population();
            local.max_trace_err = std::max(local.max_trace_err, trace_err);
            local.max_herm_err = std::max(local.max_herm_err, herm_err);
            local.max_tail_pop = std::max(local.max_tail_pop, tail);
            if (opts.validate_states) {
                const double min_eig = state.min_eigenvalue();
                local.min_eigenvalue = std::min(local.min_eigenvalue, min_eig);
                if (trace_err > opts.trace_tol)
                    throw ToleranceFailure("trace drift " + std::to_string(trace_err) +
                                           " at t=" + std::to_string(t));
                if (herm_err > opts.herm_tol)
                    throw ToleranceFailure("hermiticity drift " +
                                           std::to_string(herm_err) +
                                           " at t=" + std::to_string(t));
                if (min_eig < -opts.eig_tol)
                    throw ToleranceFailure("negative eigenvalue " +
                                           std::to_string(min_eig) +
                                           " at t=" + std::to_string(t));
            }
            if (tail > opts.tail_threshold)
                throw TailOverflow("tail population " + std::to_string(tail) +
                                   " at t=" + std::to_string(t) +
                                   ": increase n_max");
            records.push_back(obs.measure(t, state));
        },
        opts.integrator, &istats);

    local.integrator = istats;
    if (stats) *stats = local;
    return records;
}

struct RateEstimate {
    double slope = 0.0;        // photons per unit time
    double intercept = 0.0;
    double t_start = 0.0;      // fit window
    double t_end = 0.0;
    double residual_rms = 0.0;
    double linearity_r2 = 1.0;
};

// Least-squares linear fit of mean_n versus t over the final
// window_fraction of the trace. NonlinearTail fires only when a
// significant trend is present but not linear; a flat or purely
// oscillatory-around-constant tail is a valid zero-slope result.
inline RateEstimate asymptotic_rate(const std::vector<ObservableRecord>& trace,
                                    double window_fraction = 0.5) {
    if (!(window_fraction > 0.0 && window_fraction <= 1.0))
        throw InvalidParams("window_fraction must be in (0, 1]");
    if (trace.empty()) throw WindowTooShort("empty trace");
    const double t_first = trace.front().t;
    const double t_last = trace.back().t;
    const double t_cut = t_last - window_fraction * (t_last - t_first);

    std::vector<double> ts, ys;
    for (const ObservableRecord& r : trace)
        if (r.t >= t_cut - 1e-12) {
            ts.push_back(r.t);
            ys.push_back(r.mean_n);
        }
    const std::size_t m = ts.size();
    if (m < 10) throw WindowTooShort("fewer than 10 records in the fit window");

    double tbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        tbar += ts[i];
        ybar += ys[i];
    }
    tbar /= double(m);
    ybar /= double(m);
    double stt = 0.0, sty = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        stt += (ts[i] - tbar) * (ts[i] - tbar);
        sty += (ts[i] - tbar) * (ys[i] - ybar);
    }
    RateEstimate est;
    est.slope = sty / stt;
    est.intercept = ybar - est.slope * tbar;
    est.t_start = ts.front();
    est.t_end = ts.back();

    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double pred = est.intercept + est.slope * ts[i];
        ss_res += (ys[i] - pred) * (ys[i] - pred);
        ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
    }
    est.residual_rms = std::sqrt(ss_res / double(m));
    est.linearity_r2 =
        (ss_tot > 0.0) ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;

    const double trend = std::abs(est.slope) * (est.t_end - est.t_start);
    const bool significant = trend > 10.0 * est.residual_rms;
    if (est.linearity_r2 < 0.999 && significant)
        throw NonlinearTail("tail not linear (r2 = " +
                            std::to_string(est.linearity_r2) +
                            "); extend t_end past the transient");
    return est;
}

struct SteadyStateOptions {
    double residual_tol = 1e-10;
    double degenerate_tol = 1e-8;
    double eig_tol = 1e-8;
    bool check_uniqueness = true;
};

struct SteadyStateInfo {
    double residual = 0.0;       // max-norm of gen.apply(rho)
    double sigma_min = 0.0;      // two smallest singular values of the
    double sigma_min2 = 0.0;     // trace-pinned system
};

namespace detail {

// Two smallest singular values of M via block inverse iteration on
// (M^H M)^{-1}, reusing the existing LU factorization. Non-const because
// the adjoint-solve view requires it.
inline void smallest_singular_values(Eigen::SparseLU<SpMat>& lu, int n,
                                     double& s1, double& s2) {
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(n, 2);
    // Fixed deterministic start vectors.
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
    auto next = [&seed]() {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        return double(seed % 1000003ull) / 1000003.0 - 0.5;
    };
    for (int i = 0; i < n; ++i) {
        v(i, 0) = Complex(next(), next());
        v(i, 1) = Complex(next(), next());
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(v);
    v = qr.householderQ() * Eigen::MatrixXcd::Identity(n, 2);

    Eigen::MatrixXcd w(n, 2);
    for (int iter = 0; iter < 30; ++iter) {
        // w = (M^H M)^{-1} v = M^{-1} (M^{-H} v)
        w.col(0) = lu.solve(Eigen::VectorXcd(lu.adjoint().solve(v.col(0))));
        w.col(1) = lu.solve(Eigen::VectorXcd(lu.adjoint().solve(v.col(1))));
        Eigen::HouseholderQR<Eigen::MatrixXcd> q2(w);
        v = q2.householderQ() * Eigen::MatrixXcd::Identity(n, 2);
    }
    w.col(0) = lu.solve(Eigen::VectorXcd(lu.adjoint().solve(v.col(0))));
    w.col(1) = lu.solve(Eigen::VectorXcd(lu.adjoint().solve(v.col(1))));
    Eigen::Matrix2cd t = v.adjoint() * w;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(0.5 * (t + t.adjoint()));
    const double mu1 = std::max(es.eigenvalues()[1], 0.0);  // largest of (M^H M)^{-1}
    const double mu2 = std::max(es.eigenvalues()[0], 0.0);
    s1 = (mu1 > 0.0) ? 1.0 / std::sqrt(mu1) : std::numeric_limits<double>::infinity();
    s2 = (mu2 > 0.0) ? 1.0 / std::sqrt(mu2) : std::numeric_limits<double>::infinity();
}

}  // namespace detail

// Stationary state by direct linear solve: one row of the vectorized
// generator is replaced by the trace row and the system solved against a
// unit right-hand side. The residual is cross-checked against the
// matrix-free action, and a block inverse iteration guards against a
// degenerate kernel.
inline DensityMatrix steady_state(const Superoperator& gen,
                                  SteadyStateInfo* info = nullptr,
                                  const SteadyStateOptions& opts = {}) {
    if (gen.params().has_value()) {
        const SystemParams& p = *gen.params();
        if (p.kappa == 0.0 && p.gamma == 0.0) {
            if ((p.gamma_ph > 0.0 || p.Gamma_ph > 0.0) &&
                gen.kind() == ModelKind::Rabi)
                throw NoSteadyState(
                    "kappa = gamma = 0 with dephasing on: the photon number "
                    "grows without bound");
        }
    }

    const int d = gen.space().dim_total();
    const int n = d * d;
    const SpMat& l = gen.matrix();

    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(l.nonZeros()) + d);
    for (int outer = 0; outer < l.outerSize(); ++outer)
        for (SpMat::InnerIterator it(l, outer); it; ++it)
            if (it.row() != 0) trips.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < d; ++i) trips.emplace_back(0, i + d * i, Complex(1.0, 0.0));
    SpMat m(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();

    Eigen::SparseLU<SpMat> lu;
    lu.compute(m);
    if (lu.info() != Eigen::Success)
        throw DegenerateKernel("trace-pinned generator is numerically singular");

    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
    b[0] = 1.0;
    Eigen::VectorXcd x = lu.solve(b);

    SteadyStateInfo local;
    if (opts.check_uniqueness) {
        detail::smallest_singular_values(lu, n, local.sigma_min, local.sigma_min2);
        if (local.sigma_min <= opts.degenerate_tol ||
            local.sigma_min2 <= opts.degenerate_tol)
            throw DegenerateKernel(
                "stationary state is not unique (smallest singular values " +
                std::to_string(local.sigma_min) + ", " +
                std::to_string(local.sigma_min2) + ")");
    }

    DenseMatrix rho = Eigen::Map<DenseMatrix>(x.data(), d, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();

    const double residual = gen.apply(rho).cwiseAbs().maxCoeff();
    local.residual = residual;
    if (residual > opts.residual_tol)
        throw ToleranceFailure("steady-state residual " + std::to_string(residual));

    DensityMatrix out(gen.space(), std::move(rho));
    const double min_eig = out.min_eigenvalue();
    if (min_eig < -opts.eig_tol)
        throw ToleranceFailure("steady state has negative eigenvalue " +
                               std::to_string(min_eig));
    if (info) *info = local;
    return out;
}

enum class Probe { SteadyMeanN, RateSlope };

struct ConvergenceOptions {
    int n_start = 4;
    int n_step = 4;
    int n_ceiling = 40;
    double rel_tol = 1e-3;          // probe change threshold (0.1%)
    double tail_tol = 1e-10;
    double t_end = 0.0;             // rate probe horizon; 0 = 30/chi
    double dt_out = 1.0;
    double window_fraction = 0.5;
    EvolveOptions evolve{};
};

struct ConvergenceResult {
    int n_max = 0;
    double probe_value = 0.0;
    double rel_change = 0.0;
    double tail_pop = 0.0;
};

namespace detail {

inline std::pair<double, double> probe_value(const SystemParams& params, ModelKind kind,
                                             Probe probe, int n_max,
                                             const ConvergenceOptions& opts) {
    const TruncatedSpace space(n_max);
    const Superoperator gen = assemble(params, space, kind);
    if (probe == Probe::SteadyMeanN) {
        const DensityMatrix rho = steady_state(gen);
        const double n = expectation_real(rho, field_operator(space, FieldOp::Number));
        return {n, rho.tail_population()};
    }
    double t_end = opts.t_end;
    if (t_end <= 0.0) {
        const double ch = analytic::chi(params);
        if (!(ch > 0.0))
            throw InvalidParams("rate probe needs chi > 0 or an explicit t_end");
        t_end = 30.0 / ch;
    }
    EvolveOptions eopts = opts.evolve;
    eopts.tail_threshold = 1.0;  // the ladder itself judges the tail
    EvolveStats stats;
    const auto trace = evolve(DensityMatrix::pure(space, 0, 0), gen, t_end,
                              opts.dt_out, eopts, &stats);
    const RateEstimate est = asymptotic_rate(trace, opts.window_fraction);
    return {est.slope, stats.max_tail_pop};
}

}  // namespace detail

// Walks the truncation ladder until the probe moves by less than rel_tol
// when n_max grows by n_step, and the tail population is negligible.
inline ConvergenceResult truncation_convergence(const SystemParams& params,
                                                ModelKind kind, Probe probe,
                                                const ConvergenceOptions& opts = {}) {
    params.validate();
    auto [value, tail] = detail::probe_value(params, kind, probe, opts.n_start, opts);
    for (int n = opts.n_start; n + opts.n_step <= opts.n_ceiling; n += opts.n_step) {
        auto [next_value, next_tail] =
            detail::probe_value(params, kind, probe, n + opts.n_step, opts);
        const double scale = std::max(std::abs(next_value), 1e-300);
        const double rel = std::abs(next_value - value) / scale;
        if (rel < opts.rel_tol && tail < opts.tail_tol) {
            ConvergenceResult r;
            r.n_max = n;
            r.probe_value = value;
            r.rel_change = rel;
            r.tail_pop = tail;
            return r;
        }
        value = next_value;
        tail = next_tail;
    }
    throw NoConvergence("probe did not stabilize below n_max = " +
                        std::to_string(opts.n_ceiling));
}

}  // namespace openrabi
