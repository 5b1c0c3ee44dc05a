#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "logtrap/errors.hpp"

namespace logtrap {

// All energies in this library are dimensionless, in units of hbar*omega0.
// The reference energy enters only at I/O boundaries.

inline void require_odd_scaling(std::int64_t L) {
    if (L < 3 || L % 2 == 0)
        throw parameter_error("scaling parameter L must be odd and >= 3");
}

// Target single-particle law of the one-dimensional problem,
// E_k(L) = ln(k/L + 1), with E_0 = 0.
inline double level_1d(std::int64_t k, std::int64_t L) {
    require_odd_scaling(L);
    if (k < 0) throw parameter_error("level_1d: k must be non-negative");
    return std::log1p(static_cast<double>(k) / static_cast<double>(L));
}

// s-state law after odd-state selection and rescaling K = (L+1)/2:
// E_j^3d(K) = ln(j/K + 1) = level_1d(2j+1, 2K-1) - level_1d(1, 2K-1).
inline double level_3d(std::int64_t j, std::int64_t K) {
    if (K < 2) throw parameter_error("level_3d: K must be >= 2");
    if (j < 0) throw parameter_error("level_3d: j must be non-negative");
    return std::log1p(static_cast<double>(j) / static_cast<double>(K));
}

// Gap between s levels j and j+1; the measurement decode window is half
// of the smaller gap adjacent to a level.
inline double level_3d_gap(std::int64_t j, std::int64_t K) {
    return level_3d(j + 1, K) - level_3d(j, K);
}

struct SpectrumTarget {
    std::int64_t L;
    std::int64_t K;          // (L+1)/2, integer because L is odd
    double energy_unit = 1.0; // hbar*omega0 at the I/O boundary

    explicit SpectrumTarget(std::int64_t L_, double unit = 1.0)
        : L(L_), K((L_ + 1) / 2), energy_unit(unit) {
        require_odd_scaling(L_);
    }
};

// A number to factor. The prime pair is oracle knowledge: tests and the
// simulation harness may fill it in, the decode path never reads it.
struct Semiprime {
    std::int64_t N;
    std::optional<std::pair<std::int64_t, std::int64_t>> oracle_factors; // (p, q), p >= q

    explicit Semiprime(std::int64_t N_) : N(N_) {
        if (N_ < 2) throw parameter_error("Semiprime: N must be >= 2");
    }
    Semiprime(std::int64_t N_, std::int64_t p, std::int64_t q) : Semiprime(N_) {
        if (p < q) std::swap(p, q);
        if (p * q != N_) throw parameter_error("Semiprime: p*q != N");
        oracle_factors = {p, q};
    }
};

inline bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Trial division by 2..K. Returns the reduced value and the removed
// factors in the order they were divided out.
struct PreDivision {
    std::int64_t reduced;
    std::vector<std::int64_t> removed;
};

inline PreDivision divide_small_factors(std::int64_t N, std::int64_t K) {
    if (N < 1) throw parameter_error("divide_small_factors: N must be positive");
    if (K < 2) throw parameter_error("divide_small_factors: K must be >= 2");
    PreDivision out{N, {}};
    for (std::int64_t d = 2; d <= K; ++d) {
        while (out.reduced % d == 0) {
            out.reduced /= d;
            out.removed.push_back(d);
        }
    }
    return out;
}

// Two-boson state |p-K, q-K> whose total energy is ln(N/K^2).
struct FactorState {
    std::int64_t j1; // p - K
    std::int64_t j2; // q - K
    double total_energy;
};

inline FactorState factor_state_of(const Semiprime& n, std::int64_t K) {
    if (!n.oracle_factors)
        throw parameter_error("factor_state_of: oracle factors required");
    const auto [p, q] = *n.oracle_factors;
    if (q <= K)
        throw protocol_domain_error("factor_state_of: factor <= K has no excited index");
    return FactorState{p - K, q - K,
                       std::log(static_cast<double>(n.N) / static_cast<double>(K * K))};
}

// Invert a measured single-particle energy e = ln(j/K+1) back to the
// nearest level index, then divide. Decode uses only e, K and N.
struct DecodedFactor {
    std::int64_t q;      // factor read off the measured energy
    std::int64_t other;  // N / q
    std::int64_t level;  // j = q - K
    double residual;     // |e - E_j^3d|
};

inline DecodedFactor factor_from_energy(double e, std::int64_t K, std::int64_t N,
                                        double tolerance_scale = 0.5) {
    if (K < 2) throw parameter_error("factor_from_energy: K must be >= 2");
    if (!(e > 0.0) || !std::isfinite(e))
        throw decode_error("factor_from_energy: energy must be positive and finite");
    const double jf = static_cast<double>(K) * std::expm1(e);
    std::int64_t best = -1;
    double best_res = 0.0;
    const auto lo = static_cast<std::int64_t>(std::floor(jf));
    for (std::int64_t j = std::max<std::int64_t>(1, lo - 1); j <= lo + 2; ++j) {
        const double res = std::fabs(e - level_3d(j, K));
        if (best < 0 || res < best_res) {
            best = j;
            best_res = res;
        }
    }
    const double local_gap =
        std::min(level_3d_gap(best, K), best > 1 ? level_3d_gap(best - 1, K) : level_3d_gap(best, K));
    if (best_res > tolerance_scale * local_gap)
        throw decode_error("factor_from_energy: no level within tolerance of measurement");
    const std::int64_t q = best + K;
    if (N % q != 0)
        throw inconsistency_error("factor_from_energy: decoded level does not divide N");
    return DecodedFactor{q, N / q, best, best_res};
}

} // namespace logtrap
