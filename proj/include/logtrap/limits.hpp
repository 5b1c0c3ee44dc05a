#pragma once

#include <algorithm>
#include <cmath>

#include "logtrap/errors.hpp"

namespace logtrap {

// hbar = 1 internally; omega0 kept explicit so the formulas read like the
// dimensional statements they implement.
struct LimitInputs {
    double gamma = 0.0;
    double T_dec = 0.0; // units 1/omega0
    double omega0 = 1.0;

    void validate() const {
        if (!(gamma > 0.0 && T_dec > 0.0 && omega0 > 0.0))
            throw parameter_error("LimitInputs: all inputs must be positive");
    }
};

// Decoherence-bounded ceiling on the factorable semiprime:
//   N < min( (gamma*T_dec)^2, (omega0/gamma)^2 ).
inline double max_semiprime(const LimitInputs& in) {
    in.validate();
    const double lower = in.gamma * in.T_dec;
    const double upper = in.omega0 / in.gamma;
    return std::min(lower * lower, upper * upper);
}

// Drive strength maximizing the bound; there N_max = omega0 * T_dec.
inline double optimal_gamma(double T_dec, double omega0 = 1.0) {
    if (!(T_dec > 0.0 && omega0 > 0.0))
        throw parameter_error("optimal_gamma: inputs must be positive");
    return std::sqrt(omega0 / T_dec);
}

struct RabiWindowCheck {
    bool slow_enough = false; // Omega << omega0 / N
    bool fast_enough = false; // Omega >> 1 / T_dec
    double lower_ratio = 0.0; // Omega * T_dec
    double upper_ratio = 0.0; // Omega * N / omega0

    bool pass() const { return slow_enough && fast_enough; }
};

// Both inequalities the Rabi frequency has to satisfy, with an explicit
// margin standing in for ">>" (default 20x).
inline RabiWindowCheck rabi_window_check(double Omega, double T_dec, double N,
                                         double omega0 = 1.0, double margin = 20.0) {
    if (!(Omega > 0.0 && T_dec > 0.0 && N > 0.0 && omega0 > 0.0 && margin > 0.0))
        throw parameter_error("rabi_window_check: inputs must be positive");
    RabiWindowCheck out;
    out.lower_ratio = Omega * T_dec;
    out.upper_ratio = Omega * N / omega0;
    out.fast_enough = out.lower_ratio >= margin;
    out.slow_enough = out.upper_ratio <= 1.0 / margin;
    return out;
}

} // namespace logtrap
