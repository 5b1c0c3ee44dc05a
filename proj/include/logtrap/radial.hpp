#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "logtrap/eigensolver.hpp"
#include "logtrap/inverse_spectral.hpp"

namespace logtrap {

// R(0) for s states by one-sided quadratic extrapolation through the first
// three interior samples; u is proportional to r near the origin so R = u/r
// has a finite limit there.
inline std::vector<double> radial_from_u(const std::vector<double>& u, double h, int ell) {
    const int nr = static_cast<int>(u.size());
    std::vector<double> R(nr, 0.0);
    for (int i = 1; i < nr; ++i) R[i] = u[i] / (i * h);
    if (ell == 0) {
        const double x1 = h, x2 = 2 * h, x3 = 3 * h;
        R[0] = R[1] * x2 * x3 / ((x1 - x2) * (x1 - x3)) +
               R[2] * x1 * x3 / ((x2 - x1) * (x2 - x3)) +
               R[3] * x1 * x2 / ((x3 - x1) * (x3 - x2));
    }
    return R;
}

struct EllChannel {
    std::vector<double> energies;           // shifted so the s ground sits at 0
    std::vector<std::vector<double>> u;     // half-line functions, sum u^2 h = 1
    std::vector<std::vector<double>> R;     // u / r
};

// s-state basis lifted from the 1D solution plus general-ell channels
// solved on demand. All energies carry the common shift -ln(1/L + 1) that
// maps odd 1D levels onto E_j^3d(K), K = (L+1)/2.
struct RadialBasis {
    std::int64_t L = 0;
    std::int64_t K = 0;
    Grid grid;
    double h = 0.0;
    PotentialOnGrid potential; // gauged so the 1D ground level is 0
    double shift = 0.0;        // ln(1/L + 1)
    std::vector<double> s_energies;
    std::vector<std::vector<double>> s_functions; // v_j(r), v_j(0) = 0
    std::vector<std::vector<double>> radial_R;    // R_j = v_j / r
    std::map<int, EllChannel> ell_channels;

    int s_count() const { return static_cast<int>(s_energies.size()); }

    const EllChannel& channel(int ell) const {
        auto it = ell_channels.find(ell);
        if (it == ell_channels.end())
            throw parameter_error("RadialBasis: ell channel not populated");
        return it->second;
    }

    // Populate channels ell = 0..ell_max with m states each. The ell = 0
    // channel comes from the same half-line solve and must agree with the
    // lifted s states; it is stored for cross-checks.
    void ensure_channels(int ell_max, int m_per_channel) {
        for (int ell = 0; ell <= ell_max; ++ell) {
            auto it = ell_channels.find(ell);
            if (it != ell_channels.end() &&
                static_cast<int>(it->second.energies.size()) >= m_per_channel)
                continue;
            auto pairs = dirichlet_halfline(potential, m_per_channel, ell, 0.0);
            EllChannel ch;
            for (auto& p : pairs) {
                ch.energies.push_back(p.energy - shift);
                ch.R.push_back(radial_from_u(p.u, h, ell));
                ch.u.push_back(std::move(p.u));
            }
            ell_channels[ell] = std::move(ch);
        }
    }
};

// Select the odd 1D states as s states: v_j(r; K) = u_{2j+1}(r; L) on the
// half line, renormalized there and shifted by -ln(1/L + 1).
inline RadialBasis lift_to_3d(const InversionReport& inv) {
    require_odd_scaling(inv.L); // even L never reaches here, but keep the contract
    const Grid grid = inv.potential.grid;
    const int m_fit = static_cast<int>(inv.level_errors.size());
    const int n_s = (m_fit - 1) / 2;
    if (n_s < 1) throw parameter_error("lift_to_3d: m_fit too small for any s state");

    RadialBasis basis;
    basis.L = inv.L;
    basis.K = (inv.L + 1) / 2;
    basis.grid = grid;
    basis.h = grid.spacing();
    basis.potential = inv.potential;
    basis.shift = level_1d(1, inv.L);

    auto pairs = solve_lowest(inv.potential, m_fit, 0.0);
    const int c = grid.center();
    const int nr = grid.half_points();
    for (int j = 0; j < n_s; ++j) {
        const auto& full = pairs[2 * j + 1];
        std::vector<double> v(nr, 0.0);
        for (int i = 1; i < nr; ++i) v[i] = full.u[c + i];
        detail::normalize_grid(v, basis.h);
        if (v[1] < 0.0)
            for (double& x : v) x = -x;
        basis.s_energies.push_back(full.energy - basis.shift);
        basis.radial_R.push_back(radial_from_u(v, basis.h, 0));
        basis.s_functions.push_back(std::move(v));
    }
    return basis;
}

// Lowest m eigenpairs of the effective radial problem in one ell channel.
inline EllChannel solve_ell_channel(const PotentialOnGrid& pot, int ell, int m,
                                    double energy_shift = 0.0) {
    auto pairs = dirichlet_halfline(pot, m, ell, 0.0);
    EllChannel ch;
    const double h = pot.grid.spacing();
    for (auto& p : pairs) {
        ch.energies.push_back(p.energy - energy_shift);
        ch.R.push_back(radial_from_u(p.u, h, ell));
        ch.u.push_back(std::move(p.u));
    }
    return ch;
}

struct LevelEntry {
    int k = 0;
    int ell = 0;
    double energy = 0.0;
    int multiplicity = 1; // essential (2l+1)-fold m degeneracy
};

struct DegeneracyAudit {
    std::vector<LevelEntry> levels; // ascending in energy, all below cutoff
    double min_gap = 0.0;
    LevelEntry closest_a, closest_b;
    std::vector<std::pair<LevelEntry, LevelEntry>> flagged;
    double cutoff = 0.0;
    double flag_threshold = 0.0;
};

namespace detail {

inline void census_gaps(DegeneracyAudit& audit) {
    std::sort(audit.levels.begin(), audit.levels.end(),
              [](const LevelEntry& a, const LevelEntry& b) { return a.energy < b.energy; });
    bool first = true;
    for (std::size_t i = 0; i + 1 < audit.levels.size(); ++i) {
        const double gap = audit.levels[i + 1].energy - audit.levels[i].energy;
        if (first || gap < audit.min_gap) {
            audit.min_gap = gap;
            audit.closest_a = audit.levels[i];
            audit.closest_b = audit.levels[i + 1];
            first = false;
        }
        if (gap < audit.flag_threshold)
            audit.flagged.emplace_back(audit.levels[i], audit.levels[i + 1]);
    }
}

} // namespace detail

// Gap census over distinct (k, ell) levels below the cutoff. m multiplets
// are recorded as one level with multiplicity 2l+1, never as separate
// entries, so any gap reported here is between genuinely distinct levels.
inline DegeneracyAudit audit_degeneracy(const RadialBasis& basis, double energy_cutoff,
                                        double flag_threshold = 1e-4,
                                        bool require_full_coverage = true) {
    if (basis.ell_channels.empty())
        throw parameter_error("audit_degeneracy: no ell channels populated");
    if (require_full_coverage) {
        const auto& last = basis.ell_channels.rbegin()->second;
        if (last.energies.front() <= energy_cutoff)
            throw contract_error(
                "audit_degeneracy: populate ell channels until the channel ground "
                "exceeds the cutoff");
    }
    DegeneracyAudit audit;
    audit.cutoff = energy_cutoff;
    audit.flag_threshold = flag_threshold;
    for (const auto& [ell, ch] : basis.ell_channels) {
        for (int k = 0; k < static_cast<int>(ch.energies.size()); ++k) {
            const double e = ch.energies[k];
            if (e <= energy_cutoff)
                audit.levels.push_back(LevelEntry{k, ell, e, 2 * ell + 1});
            else
                break; // energies ascend within a channel
        }
    }
    detail::census_gaps(audit);
    return audit;
}

// Reference audit for the isotropic harmonic oscillator, E_{k,l} = 2k+l+3/2.
// Channels are Richardson-refined so the n = 2k+l degeneracies come out
// exact to well below the flag threshold.
inline DegeneracyAudit harmonic_reference_audit(double energy_cutoff,
                                                double flag_threshold = 1e-4,
                                                Grid grid = Grid(12.0, 1201)) {
    auto vfun = [](double x) { return 0.5 * x * x; };
    DegeneracyAudit audit;
    audit.cutoff = energy_cutoff;
    audit.flag_threshold = flag_threshold;
    for (int ell = 0;; ++ell) {
        const double ground = ell + 1.5;
        if (ground > energy_cutoff) break;
        const int m = std::max(1, static_cast<int>((energy_cutoff - ground) / 2.0) + 1);
        auto energies = refined_energies(vfun, grid, m, ell);
        for (int k = 0; k < static_cast<int>(energies.size()); ++k)
            if (energies[k] <= energy_cutoff)
                audit.levels.push_back(LevelEntry{k, ell, energies[k], 2 * ell + 1});
    }
    detail::census_gaps(audit);
    return audit;
}

} // namespace logtrap
