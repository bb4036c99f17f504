#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "openrabi/errors.hpp"

namespace openrabi {

struct IntegratorOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double h_min = 1e-12;
    double h_max = std::numeric_limits<double>::infinity();
    double h_init = 0.0;  // 0 = choose automatically
    std::size_t max_steps = 100'000'000;
};

struct IntegratorStats {
    std::size_t n_steps = 0;
    std::size_t n_rejected = 0;
    double h_last = 0.0;
};

// Embedded Dormand-Prince 5(4) pair with PI-free step control and FSAL.
// State is any Eigen matrix/vector type with complex or real scalars; the
// right-hand side is called as rhs(t, y, dydt) and the observer as
// observe(t, y) at every output grid point t = t0 + k*dt_out (k = 0
// included) and at t_end.
template <class State, class Rhs, class Observer>
void integrate_adaptive(Rhs&& rhs, State y, double t0, double t_end, double dt_out,
                        Observer&& observe, const IntegratorOptions& opt = {},
                        IntegratorStats* stats = nullptr) {
    if (!(t_end > t0)) throw InvalidParams("t_end must exceed t0");
    if (!(dt_out > 0.0)) throw InvalidParams("dt_out must be positive");

    // Dormand-Prince coefficients.
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                     a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                     a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                     a65 = -5103.0 / 18656.0;
    constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                     b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
    // Difference between the 5th and the embedded 4th order solution.
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                     e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y;
    State ytmp = y, ynew = y, yerr = y;

    double t = t0;
    rhs(t, y, k1);

    auto error_norm = [&](const State& err, const State& ya, const State& yb) {
        const auto scale = opt.atol +
                           opt.rtol * ya.cwiseAbs().cwiseMax(yb.cwiseAbs()).array();
        return std::sqrt((err.cwiseAbs().array() / scale).square().mean());
    };

    double h = opt.h_init;
    if (h <= 0.0) {
        // Crude but serviceable: start from the derivative magnitude and let
        // the controller adapt from there.
        const double dy = std::sqrt(y.cwiseAbs2().sum()) + opt.atol;
        const double df = std::sqrt(k1.cwiseAbs2().sum()) + 1e-300;
        h = std::min({0.01 * dy / df, dt_out, t_end - t0});
        h = std::max(h, 1e2 * opt.h_min);
    }

    IntegratorStats local;
    observe(t, y);

    const std::size_t n_out = static_cast<std::size_t>(
        std::ceil((t_end - t0) / dt_out - 1e-9));
    for (std::size_t kout = 1; kout <= n_out; ++kout) {
        const double t_target = std::min(t0 + double(kout) * dt_out, t_end);
        while (t < t_target) {
            bool clipped = false;
            double h_try = h;
            if (t + h_try >= t_target) {
                h_try = t_target - t;
                clipped = true;
            }

            ytmp = y + h_try * (a21 * k1);
            rhs(t + c2 * h_try, ytmp, k2);
            ytmp = y + h_try * (a31 * k1 + a32 * k2);
            rhs(t + c3 * h_try, ytmp, k3);
            ytmp = y + h_try * (a41 * k1 + a42 * k2 + a43 * k3);
            rhs(t + c4 * h_try, ytmp, k4);
            ytmp = y + h_try * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            rhs(t + c5 * h_try, ytmp, k5);
            ytmp = y + h_try * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            rhs(t + h_try, ytmp, k6);
            ynew = y + h_try * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            rhs(t + h_try, ynew, k7);
            yerr = h_try * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            const double err = error_norm(yerr, y, ynew);
            if (err <= 1.0) {
                t = clipped ? t_target : t + h_try;
                y.swap(ynew);
                k1.swap(k7);  // first-same-as-last
                ++local.n_steps;
                double factor = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
                factor = std::clamp(factor, 0.2, 5.0);
                h = std::min(h_try * factor, opt.h_max);
            } else {
                ++local.n_rejected;
                const double factor = std::max(0.2, 0.9 * std::pow(err, -0.2));
                h = h_try * factor;
                if (h < opt.h_min)
                    throw ToleranceFailure(
                        "step size underflow: local error target unreachable");
            }
            if (local.n_steps + local.n_rejected > opt.max_steps)
                throw ToleranceFailure("step budget exhausted before t_end");
        }
        observe(t, y);
    }
    local.h_last = h;
    if (stats) *stats = local;
}

}  // namespace openrabi
