#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "logtrap/grid.hpp"
#include "logtrap/tridiag.hpp"

namespace logtrap {

enum class Parity { even, odd };

struct EigenPair {
    double energy = 0.0;
    std::vector<double> u; // sampled on the grid, sum u^2 h = 1
    int index = 0;
    Parity parity = Parity::even;
};

namespace detail {

// Sign convention: the wavefunction rises from zero at the left edge,
// u'(left) > 0. The first sample clearly above noise decides.
inline void fix_sign(std::vector<double>& u) {
    double peak = 0.0;
    for (double x : u) peak = std::max(peak, std::fabs(x));
    for (double x : u) {
        if (std::fabs(x) > 1e-10 * peak) {
            if (x < 0.0)
                for (double& y : u) y = -y;
            return;
        }
    }
}

inline void normalize_grid(std::vector<double>& u, double h) {
    double s = 0.0;
    for (double x : u) s += x * x;
    s = 1.0 / std::sqrt(s * h);
    for (double& x : u) x *= s;
}

inline Parity detect_parity(const std::vector<double>& u) {
    const int n = static_cast<int>(u.size());
    double overlap = 0.0;
    for (int i = 0; i < n; ++i) overlap += u[i] * u[n - 1 - i];
    return overlap >= 0.0 ? Parity::even : Parity::odd;
}

inline void check_confinement(double top_energy, double edge_value, double margin) {
    if (top_energy > edge_value - margin)
        throw domain_truncation_error(
            "potential is not confining on this grid for the requested states");
}

} // namespace detail

// Lowest m eigenpairs of -1/2 u'' + V u = E u on the full line, Dirichlet
// boundaries at +-xmax, second-order central differences. `confine_margin`
// is how far (in hbar*omega0) the highest requested energy must stay below
// the potential's edge value; internal pipeline callers that work with
// slowly growing log tails pass 0 (bound-only check).
inline std::vector<EigenPair> solve_lowest(const PotentialOnGrid& pot, int m,
                                           double confine_margin = 1.0) {
    const int n = pot.grid.n;
    const double h = pot.grid.spacing();
    if (m < 1 || m > n / 4) throw parameter_error("solve_lowest: m out of range");
    std::vector<double> diag(n), off(n - 1, -0.5 / (h * h));
    for (int i = 0; i < n; ++i) diag[i] = 1.0 / (h * h) + pot.values[i];
    auto eig = detail::lowest_eigenpairs(std::move(diag), std::move(off), m);
    detail::check_confinement(eig.values.back(), pot.edge_value(), confine_margin);
    std::vector<EigenPair> out(m);
    for (int k = 0; k < m; ++k) {
        out[k].energy = eig.values[k];
        out[k].u = std::move(eig.vectors[k]);
        detail::normalize_grid(out[k].u, h);
        detail::fix_sign(out[k].u);
        out[k].index = k;
        out[k].parity = detail::detect_parity(out[k].u);
    }
    return out;
}

// Half-line problem u(0) = 0 on r_i = i*h, i = 0..half_points-1, with an
// optional centrifugal term l(l+1)/(2 r^2) added from the first interior
// point on. Returns wavefunctions sampled on the half-line including the
// r = 0 node, normalized to sum u^2 h = 1, positive near the origin.
inline std::vector<EigenPair> dirichlet_halfline(const PotentialOnGrid& pot, int m,
                                                 int ell = 0, double confine_margin = 1.0) {
    if (ell < 0) throw parameter_error("dirichlet_halfline: ell must be >= 0");
    const double h = pot.grid.spacing();
    const int nr = pot.grid.half_points();
    const int ni = nr - 2; // interior points r_1 .. r_{nr-2}
    if (m < 1 || m > ni / 4) throw parameter_error("dirichlet_halfline: m out of range");
    const int c = pot.grid.center();
    std::vector<double> diag(ni), off(ni - 1, -0.5 / (h * h));
    for (int i = 0; i < ni; ++i) {
        const double r = (i + 1) * h;
        diag[i] = 1.0 / (h * h) + pot.values[c + i + 1] +
                  (ell > 0 ? 0.5 * ell * (ell + 1) / (r * r) : 0.0);
    }
    auto eig = detail::lowest_eigenpairs(std::move(diag), std::move(off), m);
    detail::check_confinement(eig.values.back(), pot.edge_value(), confine_margin);
    std::vector<EigenPair> out(m);
    for (int k = 0; k < m; ++k) {
        out[k].energy = eig.values[k];
        out[k].u.assign(nr, 0.0);
        std::copy(eig.vectors[k].begin(), eig.vectors[k].end(), out[k].u.begin() + 1);
        detail::normalize_grid(out[k].u, h);
        detail::fix_sign(out[k].u);
        out[k].index = k;
        out[k].parity = Parity::odd;
    }
    return out;
}

// Residual ||H u - E u|| / ||u|| in the grid norm, skipping the boundary rows.
inline double eigen_residual(const PotentialOnGrid& pot, const EigenPair& p) {
    const int n = pot.grid.n;
    const double h = pot.grid.spacing();
    double num = 0.0, den = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
        const double hu = -0.5 * (p.u[i - 1] - 2.0 * p.u[i] + p.u[i + 1]) / (h * h) +
                          pot.values[i] * p.u[i];
        const double r = hu - p.energy * p.u[i];
        num += r * r;
        den += p.u[i] * p.u[i];
    }
    return std::sqrt(num / den);
}

// Richardson-refined energies: solve at h and h/2 and combine, killing the
// O(h^2) discretization term. The potential is re-evaluated analytically on
// the fine grid, so this takes a callable rather than sampled values.
template <std::invocable<double> F>
std::vector<double> refined_energies(F&& vfun, Grid grid, int m, int ell = -1,
                                     double confine_margin = 1.0) {
    const Grid fine(grid.xmax, 2 * grid.n - 1);
    auto coarse_pot = PotentialOnGrid::from_function(grid, vfun);
    auto fine_pot = PotentialOnGrid::from_function(fine, vfun);
    auto solve = [&](const PotentialOnGrid& p) {
        return ell < 0 ? solve_lowest(p, m, confine_margin)
                       : dirichlet_halfline(p, m, ell, confine_margin);
    };
    auto ec = solve(coarse_pot);
    auto ef = solve(fine_pot);
    std::vector<double> out(m);
    for (int k = 0; k < m; ++k) out[k] = (4.0 * ef[k].energy - ec[k].energy) / 3.0;
    return out;
}

} // namespace logtrap
