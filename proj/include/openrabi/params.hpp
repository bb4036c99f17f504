#pragma once

#include <cmath>

#include "openrabi/errors.hpp"

namespace openrabi {

// All physical rates and frequencies, dimensionless in units of the cavity
// frequency (omega = 1 by normalization).
struct SystemParams {
    double omega = 1.0;      // cavity frequency (unit of all other rates)
    double omega0 = 1.0;     // atomic transition frequency
    double g = 0.0;          // atom-field coupling
    double kappa = 0.0;      // cavity relaxation rate
    double gamma = 0.0;      // atomic relaxation rate
    double gamma_ph = 0.0;   // atomic pure dephasing rate
    double Gamma_ph = 0.0;   // cavity pure dephasing rate
    double n_t = 0.0;        // thermal occupation of the reservoirs

    double delta() const { return omega0 - omega; }
    double delta_plus() const { return omega + omega0; }

    // omega0 may be negative: the detuning tables sweep delta_plus below the
    // cavity frequency, which with omega pinned at 1 puts omega0 below zero.
    void validate() const {
        if (!(omega > 0.0)) throw InvalidParams("omega must be positive");
        if (!std::isfinite(omega0)) throw InvalidParams("omega0 must be finite");
        if (!(g >= 0.0)) throw InvalidParams("g must be >= 0");
        if (!(kappa >= 0.0)) throw InvalidParams("kappa must be >= 0");
        if (!(gamma >= 0.0)) throw InvalidParams("gamma must be >= 0");
        if (!(gamma_ph >= 0.0)) throw InvalidParams("gamma_ph must be >= 0");
        if (!(Gamma_ph >= 0.0)) throw InvalidParams("Gamma_ph must be >= 0");
        if (!(n_t >= 0.0)) throw InvalidParams("n_t must be >= 0");
    }
};

// JaynesCummings drops exactly the counter-rotating coupling term; Rabi
// keeps it.
enum class ModelKind { Rabi, JaynesCummings };

}  // namespace openrabi
