#pragma once

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "logtrap/interaction.hpp"
#include "logtrap/radial.hpp"
#include "logtrap/spectrum.hpp"

namespace logtrap {

// Symmetrized two-boson ket {(k1,ell,m), (k2,ell,-m)} with k1 >= k2 and
// m >= 0 when k1 == k2, so each unordered pair appears exactly once.
// Only m1 + m2 = 0 pairs enter: nothing else couples to the ground pair.
struct PairKet {
    double energy = 0.0; // e1 + e2, relative to the single-particle s ground
    double e1 = 0.0, e2 = 0.0;
    int k1 = 0, k2 = 0, ell = 0, m = 0;

    bool equal_triples() const { return k1 == k2 && m == 0; }
    bool is_ground() const { return k1 == 0 && k2 == 0 && ell == 0 && m == 0; }
    // 1/sqrt(2) normalization of distinct pairs doubles the cross element
    double symmetrization() const { return equal_triples() ? 1.0 : std::sqrt(2.0); }
};

struct TwoBosonBasis {
    std::vector<PairKet> kets; // ascending energy, deterministic tie-break
    int ground_index = -1;
    double e_cut = 0.0;
    int ell_max = 0;

    int size() const { return static_cast<int>(kets.size()); }

    std::optional<int> find_ket(int k1, int k2, int ell, int m = 0) const {
        if (k1 < k2) std::swap(k1, k2);
        for (int i = 0; i < size(); ++i) {
            const auto& k = kets[i];
            if (k.k1 == k1 && k.k2 == k2 && k.ell == ell && std::abs(k.m) == std::abs(m))
                return i;
        }
        return std::nullopt;
    }

    int require_ket(int k1, int k2, int ell, int m = 0) const {
        if (auto i = find_ket(k1, k2, ell, m)) return *i;
        throw domain_truncation_error("TwoBosonBasis: required pair above the basis cutoff");
    }
};

// Enumerate all symmetrized pairs with total energy <= E_cut from the
// single-particle channels ell = 0..ell_max. Channels must be populated
// deep enough that their top level clears the cutoff, otherwise the
// enumeration would silently miss pairs.
inline TwoBosonBasis build_basis(const RadialBasis& basis, double e_cut, int ell_max) {
    if (ell_max < 0) throw parameter_error("build_basis: ell_max must be >= 0");
    const double slack = 1e-9; // keep the ground pair at E_cut = 0
    TwoBosonBasis out;
    out.e_cut = e_cut;
    out.ell_max = ell_max;
    for (int ell = 0; ell <= ell_max; ++ell) {
        const std::vector<double>& en =
            ell == 0 ? basis.s_energies : basis.channel(ell).energies;
        if (ell == 0 || en.front() <= e_cut) {
            if (en.back() <= e_cut)
                throw parameter_error(
                    "build_basis: populate more single-particle states past the cutoff");
        }
        for (int k1 = 0; k1 < static_cast<int>(en.size()); ++k1) {
            for (int k2 = 0; k2 <= k1; ++k2) {
                const double e = en[k1] + en[k2];
                if (e > e_cut + slack) continue;
                const int m_lo = (k1 == k2) ? 0 : -ell;
                for (int m = m_lo; m <= ell; ++m) {
                    PairKet k;
                    k.energy = e;
                    k.e1 = en[k1];
                    k.e2 = en[k2];
                    k.k1 = k1;
                    k.k2 = k2;
                    k.ell = ell;
                    k.m = m;
                    out.kets.push_back(k);
                }
            }
        }
    }
    std::sort(out.kets.begin(), out.kets.end(), [](const PairKet& a, const PairKet& b) {
        if (a.energy != b.energy) return a.energy < b.energy;
        if (a.ell != b.ell) return a.ell < b.ell;
        if (a.k1 != b.k1) return a.k1 < b.k1;
        if (a.k2 != b.k2) return a.k2 < b.k2;
        return a.m < b.m;
    });
    for (int i = 0; i < out.size(); ++i)
        if (out.kets[i].is_ground()) out.ground_index = i;
    if (out.ground_index < 0)
        throw parameter_error("build_basis: cutoff excludes even the ground pair");
    return out;
}

struct DriveSpec {
    double gamma = 0.0;     // hbar*omega0*alpha^-3, so gamma*W is a frequency
    double omega_ext = 0.0; // units of omega0

    void validate() const {
        if (!(gamma >= 0.0)) throw parameter_error("DriveSpec: gamma must be >= 0");
        if (!(omega_ext > 0.0)) throw parameter_error("DriveSpec: omega_ext must be positive");
    }
};

struct TwoBosonState {
    std::vector<std::complex<double>> amplitudes;
    double time = 0.0;

    static TwoBosonState ground(const TwoBosonBasis& basis) {
        TwoBosonState s;
        s.amplitudes.assign(basis.size(), {0.0, 0.0});
        s.amplitudes[basis.ground_index] = 1.0;
        return s;
    }

    double norm_sq() const {
        double s = 0.0;
        for (const auto& b : amplitudes) s += std::norm(b);
        return s;
    }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<std::complex<double>>> amplitudes; // [sample][ket]
    double max_norm_error = 0.0;

    double population(int sample, int ket) const { return std::norm(amplitudes[sample][ket]); }
};

namespace detail {

// Bosonic coupling of ket i to the ground pair: symmetrization factor and
// the (-1)^m conjugation sign on top of the tabulated radial element.
inline double ground_coupling(const PairKet& k, const MatrixElementTable& table, bool reverse) {
    const double w = reverse ? table.at_reverse(k.k1, k.k2, k.ell) : table.at(k.k1, k.k2, k.ell);
    const double sign = (k.m % 2 == 0) ? 1.0 : -1.0;
    return k.symmetrization() * sign * w;
}

struct CoupledSystem {
    std::vector<double> e_rel;  // pair energy minus ground-pair energy
    std::vector<double> c_to;   // ground row couplings  W_{g;X}
    std::vector<double> c_from; // excited rows          W_{X;g}
    int ground = 0;
    double gamma = 0.0, omega = 0.0;

    CoupledSystem(const TwoBosonBasis& basis, const DriveSpec& drive,
                  const MatrixElementTable& table) {
        drive.validate();
        ground = basis.ground_index;
        gamma = drive.gamma;
        omega = drive.omega_ext;
        const double e_g = basis.kets[ground].energy;
        for (const auto& k : basis.kets) {
            e_rel.push_back(k.energy - e_g);
            c_to.push_back(ground_coupling(k, table, false));
            c_from.push_back(ground_coupling(k, table, true));
        }
    }

    void operator()(const std::vector<std::complex<double>>& b,
                    std::vector<std::complex<double>>& db, double t) const {
        const int n = static_cast<int>(b.size());
        const double drive = gamma * std::sin(omega * t);
        const std::complex<double> minus_i(0.0, -1.0);
        std::complex<double> acc(0.0, 0.0);
        for (int i = 0; i < n; ++i) {
            const auto phase = std::polar(1.0, e_rel[i] * t);
            db[i] = minus_i * drive * phase * c_from[i] * b[ground];
            acc += std::conj(phase) * c_to[i] * b[i];
        }
        db[ground] = minus_i * drive * acc;
    }

    double largest_gap() const {
        double g = 0.0;
        for (double e : e_rel) g = std::max(g, std::fabs(e));
        return g;
    }
};

} // namespace detail

// Integrate the driven coupled system in the interaction picture from the
// ground pair (or a caller-provided state). `tol` is the norm-preservation
// budget on the amplitudes; the stepper runs two orders tighter.
inline Trajectory evolve_full(const TwoBosonBasis& basis, const DriveSpec& drive,
                              const MatrixElementTable& table, double t_end,
                              double tol = 1e-9, int n_samples = 400,
                              std::optional<TwoBosonState> initial = std::nullopt) {
    namespace ode = boost::numeric::odeint;
    if (!(t_end > 0.0)) throw parameter_error("evolve_full: t_end must be positive");
    if (n_samples < 2) throw parameter_error("evolve_full: need at least 2 samples");
    const detail::CoupledSystem sys(basis, drive, table);
    TwoBosonState state = initial.value_or(TwoBosonState::ground(basis));
    if (std::fabs(state.norm_sq() - 1.0) > 1e-6)
        throw parameter_error("evolve_full: initial state not normalized");

    std::vector<double> times(n_samples);
    for (int i = 0; i < n_samples; ++i) times[i] = t_end * i / (n_samples - 1);

    Trajectory traj;
    traj.times = times;
    traj.amplitudes.reserve(n_samples);
    auto observer = [&](const std::vector<std::complex<double>>& b, double) {
        traj.amplitudes.push_back(b);
        double norm = 0.0;
        for (const auto& x : b) norm += std::norm(x);
        traj.max_norm_error = std::max(traj.max_norm_error, std::fabs(norm - 1.0));
    };
    auto stepper = ode::make_controlled(tol * 1e-2, tol * 1e-2,
                                        ode::runge_kutta_dopri5<std::vector<std::complex<double>>>());
    try {
        ode::integrate_times(stepper, sys, state.amplitudes, times.begin(), times.end(),
                             1e-3, observer);
    } catch (const std::overflow_error&) {
        throw stiffness_error("evolve_full: step size underflow; largest energy gap " +
                              std::to_string(sys.largest_gap()));
    }
    return traj;
}

// State at a single time, for measurement sampling.
inline TwoBosonState evolve_to(const TwoBosonBasis& basis, const DriveSpec& drive,
                               const MatrixElementTable& table, double t, double tol = 1e-9) {
    namespace ode = boost::numeric::odeint;
    TwoBosonState state = TwoBosonState::ground(basis);
    if (t <= 0.0) return state;
    const detail::CoupledSystem sys(basis, drive, table);
    auto stepper = ode::make_controlled(tol * 1e-2, tol * 1e-2,
                                        ode::runge_kutta_dopri5<std::vector<std::complex<double>>>());
    try {
        ode::integrate_adaptive(stepper, sys, state.amplitudes, 0.0, t, 1e-3);
    } catch (const std::overflow_error&) {
        throw stiffness_error("evolve_to: step size underflow; largest energy gap " +
                              std::to_string(sys.largest_gap()));
    }
    state.time = t;
    return state;
}

// Closed-form two-level solution once every oscillating coupling is
// dropped: b_00 = cos(Omega t), b_pq = sin(Omega t), Omega = gamma*W/2
// (hbar = 1). W is the bosonic ground-to-factor element.
struct RabiSolution {
    double Omega = 0.0;
    double b00 = 1.0;
    double bpq = 0.0;
};

inline RabiSolution rwa_solution(const DriveSpec& drive, double w_factor, double t) {
    RabiSolution s;
    s.Omega = 0.5 * drive.gamma * std::fabs(w_factor);
    s.b00 = std::cos(s.Omega * t);
    s.bpq = std::sin(s.Omega * t);
    return s;
}

inline double rabi_frequency(double gamma, double w_factor) {
    return 0.5 * gamma * std::fabs(w_factor);
}

struct MeasurementOutcome {
    double t = 0.0;
    int ket_index = -1; // index into the basis; -1 means RWA two-level ground
    bool is_ground = true;
    double e1 = 0.0, e2 = 0.0; // the two single-particle energies
    bool window_ok = true;     // Omega * T >= 20 held
};

constexpr double measurement_window_factor = 20.0;

// Collapse of the RWA two-level state at a fixed time (test hook).
inline MeasurementOutcome rwa_outcome_at(double t, double Omega, const FactorState& fs,
                                         std::int64_t K, std::mt19937_64& rng,
                                         bool window_ok = true) {
    const double p = std::sin(Omega * t) * std::sin(Omega * t);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    MeasurementOutcome out;
    out.t = t;
    out.window_ok = window_ok;
    if (unit(rng) < p) {
        out.is_ground = false;
        out.ket_index = -2;
        out.e1 = level_3d(fs.j1, K);
        out.e2 = level_3d(fs.j2, K);
    }
    return out;
}

// Measure at a time drawn uniformly from [0, T]; RWA route.
inline MeasurementOutcome sample_measurement_rwa(double Omega, double T, const FactorState& fs,
                                                 std::int64_t K, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ut(0.0, T);
    const double t = ut(rng);
    return rwa_outcome_at(t, Omega, fs, K, rng, Omega * T >= measurement_window_factor);
}

// Measure at a time drawn uniformly from [0, T]; full-system route:
// integrate to t and collapse onto a basis pair with probability |b|^2.
inline MeasurementOutcome sample_measurement_full(const TwoBosonBasis& basis,
                                                  const DriveSpec& drive,
                                                  const MatrixElementTable& table, double T,
                                                  double Omega_check, double tol,
                                                  std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ut(0.0, T);
    const double t = ut(rng);
    const auto state = evolve_to(basis, drive, table, t, tol);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double u = unit(rng) * state.norm_sq();
    int pick = basis.size() - 1;
    for (int i = 0; i < basis.size(); ++i) {
        u -= std::norm(state.amplitudes[i]);
        if (u <= 0.0) {
            pick = i;
            break;
        }
    }
    MeasurementOutcome out;
    out.t = t;
    out.ket_index = pick;
    out.is_ground = (pick == basis.ground_index);
    out.e1 = basis.kets[pick].e1;
    out.e2 = basis.kets[pick].e2;
    out.window_ok = Omega_check * T >= measurement_window_factor;
    return out;
}

// Collapse a stored trajectory at a random sampling instant (nearest
// stored sample). Omega_check = 0 skips the window flag.
inline MeasurementOutcome sample_measurement(const Trajectory& traj, const TwoBosonBasis& basis,
                                             std::mt19937_64& rng, double Omega_check = 0.0) {
    if (traj.times.empty()) throw parameter_error("sample_measurement: empty trajectory");
    std::uniform_real_distribution<double> ut(0.0, traj.times.back());
    const double t = ut(rng);
    std::size_t idx = 0;
    double best = std::fabs(traj.times[0] - t);
    for (std::size_t i = 1; i < traj.times.size(); ++i) {
        const double d = std::fabs(traj.times[i] - t);
        if (d < best) {
            best = d;
            idx = i;
        }
    }
    const auto& b = traj.amplitudes[idx];
    double norm = 0.0;
    for (const auto& x : b) norm += std::norm(x);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double u = unit(rng) * norm;
    int pick = basis.size() - 1;
    for (int i = 0; i < basis.size(); ++i) {
        u -= std::norm(b[i]);
        if (u <= 0.0) {
            pick = i;
            break;
        }
    }
    MeasurementOutcome out;
    out.t = t;
    out.ket_index = pick;
    out.is_ground = (pick == basis.ground_index);
    out.e1 = basis.kets[pick].e1;
    out.e2 = basis.kets[pick].e2;
    out.window_ok = Omega_check == 0.0 || Omega_check * traj.times.back() >= measurement_window_factor;
    return out;
}

} // namespace logtrap
