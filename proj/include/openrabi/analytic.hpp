#pragma once

#include <iostream>

#include "openrabi/errors.hpp"
#include "openrabi/params.hpp"

namespace openrabi {
namespace analytic {

// Combined damping rate of the atom-field correlators:
//   chi = gamma_ph + Gamma_ph + kappa/2 + gamma (n_t + 1/2).
inline double chi(const SystemParams& p) {
    p.validate();
    return p.gamma_ph + p.Gamma_ph + 0.5 * p.kappa + p.gamma * (p.n_t + 0.5);
}

// Theta = g^2 / (Delta_+^2 + chi^2), the dimensionless strength that
// governs the anomalous photon population.
inline double theta(const SystemParams& p) {
    const double c = chi(p);
    const double dp = p.delta_plus();
    return p.g * p.g / (dp * dp + c * c);
}

// Asymptotic photon creation rate for the pure-dephasing case,
//   <ndot>_a = 2 gamma_ph g^2 / (Delta_+^2 + gamma_ph^2).
// Derived for kappa = gamma = 0; still useful as an order-of-magnitude
// reference with small damping, so out-of-regime calls warn instead of
// failing.
inline double photon_rate_asymptotic(const SystemParams& p) {
    p.validate();
    if (p.kappa > 0.0 || p.gamma > 0.0)
        std::clog << "openrabi: photon_rate_asymptotic called with damping on "
                     "(kappa="
                  << p.kappa << ", gamma=" << p.gamma
                  << "); the formula assumes pure dephasing\n";
    const double dp = p.delta_plus();
    return 2.0 * p.gamma_ph * p.g * p.g / (dp * dp + p.gamma_ph * p.gamma_ph);
}

struct StationaryValues {
    double n_inf;
    double sz_inf;
};

// Stationary mean photon number and population inversion:
//   <n>_inf  = n_t + 2 Theta chi / kappa
//   <sz>_inf = -1/(2 n_t + 1) + 4 Theta chi / (gamma (n_t + 1/2)).
inline StationaryValues stationary(const SystemParams& p) {
    p.validate();
    if (p.kappa <= 0.0 || p.gamma <= 0.0)
        throw DivisionByZero(
            "stationary values require kappa > 0 and gamma > 0");
    const double c = chi(p);
    const double th = theta(p);
    StationaryValues v;
    v.n_inf = p.n_t + 2.0 * th * c / p.kappa;
    v.sz_inf = -1.0 / (2.0 * p.n_t + 1.0) + 4.0 * th * c / (p.gamma * (p.n_t + 0.5));
    return v;
}

struct BoundValues {
    double n_lower;  // Theta
    double n_upper;  // 2 Theta chi / kappa
    double s_lower;  // 4 Theta
    double s_upper;  // 4 Theta chi / (gamma (n_t + 1/2))
};

inline BoundValues bounds(const SystemParams& p) {
    p.validate();
    if (p.kappa <= 0.0 || p.gamma <= 0.0)
        throw DivisionByZero("bounds require kappa > 0 and gamma > 0");
    const double c = chi(p);
    const double th = theta(p);
    BoundValues b;
    b.n_lower = th;
    b.n_upper = 2.0 * th * c / p.kappa;
    b.s_lower = 4.0 * th;
    b.s_upper = 4.0 * th * c / (p.gamma * (p.n_t + 0.5));
    return b;
}

struct AnalyticPrediction {
    double chi;
    double theta;
    double ndot_a;
    double n_inf;
    double sz_inf;
    double n_lower;
    double n_upper;
    double s_lower;
    double s_upper;
};

inline AnalyticPrediction predict(const SystemParams& p) {
    AnalyticPrediction a{};
    a.chi = chi(p);
    a.theta = theta(p);
    const double dp = p.delta_plus();
    a.ndot_a = 2.0 * p.gamma_ph * p.g * p.g / (dp * dp + p.gamma_ph * p.gamma_ph);
    const StationaryValues v = stationary(p);
    a.n_inf = v.n_inf;
    a.sz_inf = v.sz_inf;
    const BoundValues b = bounds(p);
    a.n_lower = b.n_lower;
    a.n_upper = b.n_upper;
    a.s_lower = b.s_lower;
    a.s_upper = b.s_upper;
    return a;
}

}  // namespace analytic
}  // namespace openrabi
