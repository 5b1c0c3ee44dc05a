#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "logtrap/dynamics.hpp"
#include "logtrap/interaction.hpp"
#include "logtrap/inverse_spectral.hpp"
#include "logtrap/radial.hpp"
#include "logtrap/spectrum.hpp"

namespace logtrap {

// Smallest drive detuning to a neighboring total energy,
// min over +- of |ln((N+-1)/N)|, which behaves as 1/N.
inline double resonance_margin(std::int64_t N) {
    if (N < 2) throw parameter_error("resonance_margin: N must be >= 2");
    const double n = static_cast<double>(N);
    return std::min(std::log((n + 1.0) / n), -std::log((n - 1.0) / n));
}

enum class ProtocolMode { rwa, full };

inline const char* to_string(ProtocolMode m) { return m == ProtocolMode::rwa ? "rwa" : "full"; }

struct ProtocolConfig {
    std::int64_t N_raw = 0;  // as given
    std::int64_t N = 0;      // after pre-division
    std::int64_t L = 3;
    std::int64_t K = 2;
    std::vector<std::int64_t> predivided;
    bool runnable = false;
    std::string note;

    double gamma = 0.0;    // 0 = choose automatically from the resonance margin
    double T_window = 0.0; // 0 = choose automatically as 22/Omega
    std::uint64_t seed = 0;
    ProtocolMode mode = ProtocolMode::rwa;
    int attempt_cap = 64;
    int ell_max = 2;   // spectator channels carried by the full solver
    double tol = 1e-9; // amplitude tolerance of the full solver

    // Simulation-side oracle: trial-division factorization of N. The decode
    // path never touches this; it exists so the harness can size the basis
    // and evaluate the true Rabi frequency.
    Semiprime oracle() const {
        for (std::int64_t d = 2; d * d <= N; ++d)
            if (N % d == 0) return Semiprime(N, N / d, d);
        throw protocol_domain_error("oracle: N is prime");
    }
};

// Divide out every factor <= K and decide whether a protocol run makes
// sense for the remainder. Degenerate inputs are reported, not thrown.
inline ProtocolConfig prepare(std::int64_t N_raw, std::int64_t L) {
    require_odd_scaling(L);
    if (N_raw < 2) throw parameter_error("prepare: N must be >= 2");
    ProtocolConfig cfg;
    cfg.N_raw = N_raw;
    cfg.L = L;
    cfg.K = (L + 1) / 2;
    auto pre = divide_small_factors(N_raw, cfg.K);
    cfg.N = pre.reduced;
    cfg.predivided = std::move(pre.removed);
    if (cfg.N == 1) {
        cfg.note = "fully pre-divided; nothing left to factor";
    } else if (is_prime(cfg.N)) {
        cfg.note = "remainder is prime; nothing left to factor";
    } else {
        const auto sp = cfg.oracle();
        if (!is_prime(sp.oracle_factors->first) || !is_prime(sp.oracle_factors->second)) {
            cfg.note = "remainder is not a semiprime; protocol not applicable";
        } else {
            cfg.runnable = true;
        }
    }
    return cfg;
}

struct ProtocolResult {
    std::int64_t N_raw = 0, N = 0, L = 0, K = 0;
    std::vector<std::int64_t> predivided;
    std::optional<std::pair<std::int64_t, std::int64_t>> factors; // (p, q), p >= q
    int attempts = 0;
    double Omega = 0.0;
    double margin = 0.0; // detuning to the nearest non-factor total energy
    std::uint64_t seed = 0;
    ProtocolMode mode = ProtocolMode::rwa;
    bool window_ok = true;
    std::string failure;

    bool success() const { return factors.has_value(); }
};

// Everything the simulation needs about the trap for one (N, L):
// the inverted potential, the radial basis sized to reach the factor
// state, the ground-row element table, and the factor coupling.
struct PhysicsStack {
    InversionReport inversion;
    RadialBasis basis;
    MatrixElementTable table;
    FactorState fs{0, 0, 0.0};
    double w_factor_plain = 0.0;   // tabulated radial element
    double coupling_factor = 0.0;  // with bosonic symmetrization factor
};

struct StackOptions {
    double inversion_tol = 1e-8;
    double damping = 1.0;
    int max_iter = 6000;
    int extra_levels = 1;       // fitted levels beyond the factor state
    std::optional<Grid> grid;   // default: sized from the fit window
};

inline PhysicsStack build_physics(const ProtocolConfig& cfg, const StackOptions& opt = {}) {
    if (!cfg.runnable) throw protocol_domain_error("build_physics: config is not runnable");
    const auto sp = cfg.oracle();
    const auto [p, q] = *sp.oracle_factors;
    if (q <= cfg.K)
        throw protocol_domain_error("build_physics: a factor <= K survived pre-division");
    const int j_max = static_cast<int>(p - cfg.K);

    InversionConfig inv_cfg;
    inv_cfg.L = cfg.L;
    inv_cfg.m_fit = 2 * j_max + 1 + 2 * opt.extra_levels;
    inv_cfg.tol = opt.inversion_tol;
    inv_cfg.damping = opt.damping;
    inv_cfg.max_iter = opt.max_iter;
    const Grid grid = opt.grid.value_or(default_grid_for(cfg.L, inv_cfg.m_fit));

    PhysicsStack stack;
    stack.inversion = invert_spectrum(inv_cfg, grid);
    if (!stack.inversion.converged)
        throw domain_truncation_error("build_physics: inversion did not converge");
    stack.basis = lift_to_3d(stack.inversion);
    if (cfg.mode == ProtocolMode::full && cfg.ell_max > 0) {
        // spectator channels deep enough to clear the pair cutoff
        const double e_cut = std::log(static_cast<double>(cfg.N)) -
                             2.0 * std::log(static_cast<double>(cfg.K)) +
                             3.0 * level_3d_gap(0, cfg.K);
        int m_per_channel = 4;
        while (true) {
            stack.basis.ensure_channels(cfg.ell_max, m_per_channel);
            bool deep_enough = true;
            for (int ell = 1; ell <= cfg.ell_max; ++ell)
                deep_enough &= stack.basis.channel(ell).energies.back() > e_cut;
            if (deep_enough) break;
            m_per_channel += 2;
        }
    }
    const int k_max = cfg.mode == ProtocolMode::full ? std::max(j_max, 12) : j_max;
    stack.table = MatrixElementTable::build(
        stack.basis, cfg.mode == ProtocolMode::full ? cfg.ell_max : 0,
        std::min(k_max, stack.basis.s_count() - 1));
    stack.fs = factor_state_of(sp, cfg.K);
    stack.w_factor_plain =
        stack.table.at(static_cast<int>(stack.fs.j1), static_cast<int>(stack.fs.j2), 0);
    const double sym = stack.fs.j1 == stack.fs.j2 ? 1.0 : std::sqrt(2.0);
    stack.coupling_factor = sym * stack.w_factor_plain;
    return stack;
}

// The factorization driver. Repeats prepare-drive-measure until a
// non-ground outcome, then decodes the factor from the measured energy
// alone. A ground-pair measurement collapses the system back to where it
// started, so each attempt is a fresh trajectory.
inline ProtocolResult run(const ProtocolConfig& cfg, const PhysicsStack& stack) {
    if (!cfg.runnable) throw protocol_domain_error("run: config is not runnable");
    ProtocolResult res;
    res.N_raw = cfg.N_raw;
    res.N = cfg.N;
    res.L = cfg.L;
    res.K = cfg.K;
    res.predivided = cfg.predivided;
    res.seed = cfg.seed;
    res.mode = cfg.mode;
    res.margin = resonance_margin(cfg.N);

    DriveSpec drive;
    drive.omega_ext = std::log(static_cast<double>(cfg.N)) -
                      2.0 * std::log(static_cast<double>(cfg.K));
    // auto gamma: keep the Rabi energy a factor 25 under the resonance margin
    drive.gamma = cfg.gamma > 0.0
                      ? cfg.gamma
                      : 2.0 * (res.margin / 25.0) / std::fabs(stack.coupling_factor);
    res.Omega = rabi_frequency(drive.gamma, stack.coupling_factor);
    const double T = cfg.T_window > 0.0 ? cfg.T_window : 22.0 / res.Omega;
    res.window_ok = res.Omega * T >= measurement_window_factor;

    std::mt19937_64 rng(cfg.seed);

    std::optional<TwoBosonBasis> pair_basis;
    if (cfg.mode == ProtocolMode::full) {
        const double e_cut = stack.fs.total_energy + 3.0 * level_3d_gap(0, cfg.K);
        pair_basis = build_basis(stack.basis, e_cut, cfg.ell_max);
        pair_basis->require_ket(static_cast<int>(stack.fs.j1), static_cast<int>(stack.fs.j2), 0);
    }

    for (int attempt = 1; attempt <= cfg.attempt_cap; ++attempt) {
        MeasurementOutcome out;
        if (cfg.mode == ProtocolMode::rwa) {
            out = sample_measurement_rwa(res.Omega, T, stack.fs, cfg.K, rng);
        } else {
            out = sample_measurement_full(*pair_basis, drive, stack.table, T, res.Omega,
                                          cfg.tol, rng);
        }
        res.window_ok = res.window_ok && out.window_ok;
        if (out.is_ground) continue;
        res.attempts = attempt;
        // read one of the two single-particle energies; the partner follows
        // from division
        std::uniform_int_distribution<int> coin(0, 1);
        const double e = coin(rng) ? out.e1 : out.e2;
        const auto decoded = factor_from_energy(e, cfg.K, cfg.N);
        const std::int64_t a = decoded.q, b = decoded.other;
        res.factors = a >= b ? std::make_pair(a, b) : std::make_pair(b, a);
        return res;
    }
    res.attempts = cfg.attempt_cap;
    res.failure = "attempt cap exceeded without a non-ground outcome";
    return res;
}

} // namespace logtrap
