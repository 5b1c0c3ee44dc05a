#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "logtrap/eigensolver.hpp"
#include "logtrap/grid.hpp"
#include "logtrap/spectrum.hpp"

namespace logtrap {

enum class InitialGuess {
    semiclassical, // Abel-inverted WKB profile of the target law (default)
    harmonic       // harmonic well matched to the lowest target gap
};

struct InversionConfig {
    std::int64_t L = 3;
    int m_fit = 16;
    double tol = 1e-8;
    int max_iter = 3000;
    double damping = 0.5;
    InitialGuess initial = InitialGuess::semiclassical;
    // Absolute target energies overriding the log law; used for synthetic
    // spectra in tests. Residuals and convergence always act on level
    // differences from the ground state.
    std::optional<std::vector<double>> custom_targets;

    void validate() const {
        require_odd_scaling(L);
        if (m_fit < 2) throw parameter_error("InversionConfig: m_fit must be >= 2");
        if (!(tol > 0.0)) throw parameter_error("InversionConfig: tol must be positive");
        if (!(damping > 0.0) || damping > 1.0)
            throw parameter_error("InversionConfig: damping must be in (0, 1]");
        if (max_iter < 1) throw parameter_error("InversionConfig: max_iter must be >= 1");
        if (custom_targets && static_cast<int>(custom_targets->size()) != m_fit)
            throw parameter_error("InversionConfig: custom_targets size != m_fit");
    }

    std::vector<double> targets() const {
        if (custom_targets) return *custom_targets;
        std::vector<double> t(m_fit);
        for (int k = 0; k < m_fit; ++k) t[k] = level_1d(k, L);
        return t;
    }
};

struct InversionReport {
    PotentialOnGrid potential;
    std::vector<double> level_errors; // (E_k - E_0) - (t_k - t_0), k < m_fit
    int iterations = 0;
    bool converged = false;
    std::int64_t L = 0;
    double tol = 0.0;

    double max_error() const {
        double m = 0.0;
        for (double e : level_errors) m = std::max(m, std::fabs(e));
        return m;
    }
};

// Semiclassical turning point of the log law: the Bohr-Sommerfeld phase
// of E_k(L) = ln(k/L+1) inverts in closed form (Abel) to
//   xi(V) = L * sqrt(pi/2) * exp(V) * erf(sqrt(V)).
inline double wkb_turning_point(std::int64_t L, double energy) {
    return static_cast<double>(L) * std::sqrt(M_PI / 2.0) * std::exp(energy) *
           std::erf(std::sqrt(std::max(energy, 0.0)));
}

// Initial potential from the inverted WKB profile: V(xi) solves
// wkb_turning_point(L, V) = |xi|, monotone so plain bisection does.
inline PotentialOnGrid wkb_initial_potential(std::int64_t L, Grid grid) {
    require_odd_scaling(L);
    return PotentialOnGrid::from_function(grid, [L](double x) {
        if (x < 1e-14) return 0.0;
        double hi = 1.0;
        while (wkb_turning_point(L, hi) < x) hi *= 2.0;
        double lo = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double mid = 0.5 * (lo + hi);
            (wkb_turning_point(L, mid) < x ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    });
}

inline PotentialOnGrid harmonic_initial_potential(std::int64_t L, Grid grid) {
    require_odd_scaling(L);
    const double w = level_1d(1, L);
    return PotentialOnGrid::from_function(grid, [w](double x) { return 0.5 * w * w * x * x; });
}

// First-order Hellmann-Feynman step: dE_k/dV(xi) = u_k(xi)^2, so each
// level error is distributed over its own density, normalized by the total
// density so overlapping states do not over-correct:
//   V_new = V + damping * sum_k (t_k - E_k) u_k^2 / rho,  rho = sum_k u_k^2 + eps.
// Targets and energies are compared as differences from the ground level.
inline PotentialOnGrid hf_update(const PotentialOnGrid& current,
                                 const std::vector<EigenPair>& pairs,
                                 const std::vector<double>& targets, double damping) {
    const int n = current.grid.n;
    const int m = static_cast<int>(pairs.size());
    if (static_cast<int>(targets.size()) != m)
        throw parameter_error("hf_update: targets/pairs size mismatch");
    std::vector<double> resid(m);
    for (int k = 0; k < m; ++k)
        resid[k] = (targets[k] - targets[0]) - (pairs[k].energy - pairs[0].energy);
    std::vector<double> rho(n, 0.0), corr(n, 0.0);
    double rho_max = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < m; ++k) {
            const double d = pairs[k].u[i] * pairs[k].u[i];
            rho[i] += d;
            corr[i] += resid[k] * d;
        }
        rho_max = std::max(rho_max, rho[i]);
    }
    const double eps = 1e-12 * rho_max;
    std::vector<double> v = current.values;
    for (int i = 0; i < n; ++i) v[i] += damping * corr[i] / (rho[i] + eps);
    return PotentialOnGrid::symmetrized(current.grid, v);
}

namespace detail {

// Replace the potential outside the fitted states' support (density below
// 1e-12 of its peak) by a logarithmic continuation fitted to the last
// decade of supported points, keeping the well confining.
inline void extend_log_tail(std::vector<double>& v, const std::vector<double>& dens, Grid grid) {
    const int n = grid.n;
    const int c = grid.center();
    double dmax = 0.0;
    for (double d : dens) dmax = std::max(dmax, d);
    const double eps = 1e-12 * dmax;
    int iend = c;
    for (int i = n - 1; i > c; --i)
        if (dens[i] > eps) {
            iend = i;
            break;
        }
    if (iend >= n - 1 || iend - c < 20) return;
    const int i0 = c + static_cast<int>(0.9 * (iend - c));
    if (iend - i0 < 8) return;
    // least squares V ~ a + b ln(xi) over [i0, iend]
    double sl = 0.0, sll = 0.0, sv = 0.0, slv = 0.0;
    const int cnt = iend - i0 + 1;
    for (int i = i0; i <= iend; ++i) {
        const double l = std::log(grid.point(i));
        sl += l;
        sll += l * l;
        sv += v[i];
        slv += l * v[i];
    }
    double b = (cnt * slv - sl * sv) / (cnt * sll - sl * sl);
    b = std::max(b, 0.25);
    const double x_end = grid.point(iend);
    for (int i = iend + 1; i < n; ++i) v[i] = v[iend] + b * std::log(grid.point(i) / x_end);
    for (int i = 0; i < n - 1 - iend; ++i) v[i] = v[n - 1 - i];
}

} // namespace detail

// Iterate the Hellmann-Feynman update until the lowest m_fit levels match
// the targets within cfg.tol. The returned potential is gauged so the
// ground-state energy equals the ground target exactly (0 for the log law).
// Non-convergence is reported, not thrown; the caller decides.
inline InversionReport invert_spectrum(const InversionConfig& cfg, Grid grid) {
    cfg.validate();
    const auto targets = cfg.targets();
    PotentialOnGrid pot = cfg.initial == InitialGuess::semiclassical
                              ? wkb_initial_potential(cfg.L, grid)
                              : harmonic_initial_potential(cfg.L, grid);
    int iterations = 0;
    std::vector<EigenPair> pairs;
    for (; iterations < cfg.max_iter; ++iterations) {
        pairs = solve_lowest(pot, cfg.m_fit, 0.0);
        // target levels must stay bound on this grid
        if (pairs[0].energy + (targets.back() - targets.front()) > pot.edge_value())
            throw domain_truncation_error("invert_spectrum: top target level unbound on grid");
        double mx = 0.0;
        for (int k = 0; k < cfg.m_fit; ++k)
            mx = std::max(mx, std::fabs((targets[k] - targets[0]) -
                                        (pairs[k].energy - pairs[0].energy)));
        if (mx <= cfg.tol) break;
        pot = hf_update(pot, pairs, targets, cfg.damping);
    }
    // continue the tail beyond the fitted states' support, then gauge
    std::vector<double> dens(grid.n, 0.0);
    for (const auto& p : pairs)
        for (int i = 0; i < grid.n; ++i) dens[i] += p.u[i] * p.u[i];
    std::vector<double> v = pot.values;
    detail::extend_log_tail(v, dens, grid);
    pot = PotentialOnGrid(grid, std::move(v));

    auto final_pairs = solve_lowest(pot, cfg.m_fit, 0.0);
    const double gauge = final_pairs[0].energy - targets[0];
    for (double& x : pot.values) x -= gauge;

    InversionReport rep;
    rep.level_errors.resize(cfg.m_fit);
    for (int k = 0; k < cfg.m_fit; ++k)
        rep.level_errors[k] = (final_pairs[k].energy - final_pairs[0].energy) -
                              (targets[k] - targets[0]);
    rep.potential = std::move(pot);
    rep.iterations = iterations;
    rep.converged = rep.max_error() <= cfg.tol;
    rep.L = cfg.L;
    rep.tol = cfg.tol;
    return rep;
}

// Grid wide enough that the top fitted level sits well inside the box:
// 1.25 x its semiclassical turning point plus a decay margin, h ~ 0.02.
inline Grid default_grid_for(std::int64_t L, int m_fit) {
    const double e_top = level_1d(m_fit - 1, L);
    const double xmax = std::ceil(1.25 * wkb_turning_point(L, e_top) + 4.0);
    int n = static_cast<int>(std::lround(xmax / 0.02));
    return Grid(xmax, 2 * n + 1);
}

} // namespace logtrap
