#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "openrabi/analytic.hpp"
#include "openrabi/errors.hpp"
#include "openrabi/integrate.hpp"
#include "openrabi/params.hpp"

namespace openrabi {
namespace moments {

// The six dynamic variables of the closed moment system: the mean photon
// number, the population inversion, and the four atom-field correlators.
struct MomentState {
    double mean_n = 0.0;
    double mean_sz = -1.0;
    double p_sx = 0.0;
    double x_sx = 0.0;
    double p_sy = 0.0;
    double x_sy = 0.0;
};

// Closure values for the two unresolved variables zeta = <2 x^2 sigma_z>
// and alpha = <(xp+px) sigma_z>. Near-vacuum states give (-1, 0); the pair
// is injectable so that values measured from the full model can be fed
// back in to quantify the closure error.
struct Closure {
    double zeta = -1.0;
    double alpha = 0.0;
};

namespace detail {
inline void require_unit_omega(const SystemParams& p) {
    if (p.omega != 1.0)
        throw InvalidParams("the moment equations are written in units of omega = 1");
}
}  // namespace detail

// Right-hand side of the moment system (units of omega = 1):
//   d<n>/dt    = -sqrt(2) g <p sx> - kappa (<n> - n_t)
//   d<sz>/dt   = 2 sqrt(2) g <x sy> - (gamma/2) [1 + (2 n_t + 1) <sz>]
//   d<p sx>/dt = -<x sx> - omega0 <p sy> - chi <p sx> - sqrt(2) g
//   d<x sx>/dt = <p sx> - omega0 <x sy> - chi <x sx>
//   d<p sy>/dt = omega0 <p sx> - <x sy> - chi <p sy> - sqrt(2) g alpha
//   d<x sy>/dt = <p sy> + omega0 <x sx> - chi <x sy> - sqrt(2) g zeta
inline MomentState moment_rhs(const MomentState& s, const SystemParams& p,
                              const Closure& c = {}) {
    p.validate();
    detail::require_unit_omega(p);
    const double ch = analytic::chi(p);
    const double sq2g = std::sqrt(2.0) * p.g;
    MomentState d;
    d.mean_n = -sq2g * s.p_sx - p.kappa * (s.mean_n - p.n_t);
    d.mean_sz = 2.0 * sq2g * s.x_sy -
                0.5 * p.gamma * (1.0 + (2.0 * p.n_t + 1.0) * s.mean_sz);
    d.p_sx = -s.x_sx - p.omega0 * s.p_sy - ch * s.p_sx - sq2g;
    d.x_sx = s.p_sx - p.omega0 * s.x_sy - ch * s.x_sx;
    d.p_sy = p.omega0 * s.p_sx - s.x_sy - ch * s.p_sy - sq2g * c.alpha;
    d.x_sy = s.p_sy + p.omega0 * s.x_sx - ch * s.x_sy - sq2g * c.zeta;
    return d;
}

// Fixed point of the correlator block, ordered (p_sx, x_sx, p_sy, x_sy).
inline std::array<double, 4> correlator_fixed_point(const SystemParams& p,
                                                    const Closure& c = {}) {
    p.validate();
    detail::require_unit_omega(p);
    const double ch = analytic::chi(p);
    if (!(ch > 0.0))
        throw SingularSystem(
            "chi = 0: undamped correlator rotation has no fixed point");
    const double w0 = p.omega0;
    const double sq2g = std::sqrt(2.0) * p.g;
    Eigen::Matrix4d a;
    // d y / dt = a y + b with the damping on the diagonal.
    a << -ch, -1.0, -w0, 0.0,
         1.0, -ch, 0.0, -w0,
         w0, 0.0, -ch, -1.0,
         0.0, w0, 1.0, -ch;
    Eigen::Vector4d b(-sq2g, 0.0, -sq2g * c.alpha, -sq2g * c.zeta);
    Eigen::Vector4d y = a.fullPivLu().solve(-b);
    return {y[0], y[1], y[2], y[3]};
}

using MomentTrajectory = std::vector<std::pair<double, MomentState>>;

// Integrates the closed linear system with the shared adaptive integrator.
inline MomentTrajectory integrate_moments(const MomentState& initial,
                                          const SystemParams& p, const Closure& c,
                                          double t_end, double dt_out = 1.0,
                                          const IntegratorOptions& opt = {}) {
    p.validate();
    detail::require_unit_omega(p);
    using Vec6 = Eigen::Matrix<double, 6, 1>;
    Vec6 y;
    y << initial.mean_n, initial.mean_sz, initial.p_sx, initial.x_sx, initial.p_sy,
        initial.x_sy;
    auto unpack = [](const Vec6& v) {
        MomentState s;
        s.mean_n = v[0];
        s.mean_sz = v[1];
        s.p_sx = v[2];
        s.x_sx = v[3];
        s.p_sy = v[4];
        s.x_sy = v[5];
        return s;
    };
    MomentTrajectory out;
    out.reserve(static_cast<std::size_t>(t_end / dt_out) + 2);
    integrate_adaptive(
        [&](double, const Vec6& v, Vec6& dv) {
            const MomentState d = moment_rhs(unpack(v), p, c);
            dv << d.mean_n, d.mean_sz, d.p_sx, d.x_sx, d.p_sy, d.x_sy;
        },
        y, 0.0, t_end, dt_out,
        [&](double t, const Vec6& v) { out.emplace_back(t, unpack(v)); }, opt);
    return out;
}

}  // namespace moments
}  // namespace openrabi
