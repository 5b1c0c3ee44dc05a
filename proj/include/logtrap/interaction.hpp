#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

#include "logtrap/radial.hpp"
#include "logtrap/spectrum.hpp"

namespace logtrap {

struct QuantumTriple {
    int k = 0;
    int ell = 0;
    int m = 0;

    QuantumTriple() = default;
    QuantumTriple(int k_, int ell_, int m_) : k(k_), ell(ell_), m(m_) {
        if (k < 0 || ell < 0 || std::abs(m) > ell)
            throw parameter_error("QuantumTriple: need k, ell >= 0 and |m| <= ell");
    }
    bool operator==(const QuantumTriple&) const = default;
};

namespace detail {

// Composite Simpson on the uniform half-line grid; an even sample count
// gets a trapezoid on the last interval, where the integrand has decayed.
inline double simpson(const std::vector<double>& f, double h) {
    std::size_t n = f.size();
    double tail = 0.0;
    if (n % 2 == 0) {
        tail = 0.5 * h * (f[n - 2] + f[n - 1]);
        --n;
    }
    double s = f[0] + f[n - 1];
    for (std::size_t i = 1; i < n - 1; i += 2) s += 4.0 * f[i];
    for (std::size_t i = 2; i < n - 1; i += 2) s += 2.0 * f[i];
    return s * h / 3.0 + tail;
}

inline void check_normalized(const std::vector<double>& u, double h, const char* what) {
    double s = 0.0;
    for (double x : u) s += x * x;
    if (std::fabs(s * h - 1.0) > 1e-6)
        throw contract_error(std::string("interaction: unnormalized basis function: ") + what);
}

} // namespace detail

// Radial part of the contact matrix element against the ground pair:
//   (1/4pi) * int dr r^2 R_{0,0}^2 R_{k1,ell} R_{k2,ell}.
// Selection rules are the caller's business (see w_general); this is the
// bare quadrature.
inline double w_ground_to(int k1, int k2, int ell, const RadialBasis& basis) {
    const std::vector<double>* Ra = nullptr;
    const std::vector<double>* Rb = nullptr;
    const std::vector<double>* ua = nullptr;
    const std::vector<double>* ub = nullptr;
    if (ell == 0) {
        if (k1 >= basis.s_count() || k2 >= basis.s_count())
            throw parameter_error("w_ground_to: s state index out of range");
        Ra = &basis.radial_R[k1];
        Rb = &basis.radial_R[k2];
        ua = &basis.s_functions[k1];
        ub = &basis.s_functions[k2];
    } else {
        const auto& ch = basis.channel(ell);
        if (k1 >= static_cast<int>(ch.energies.size()) ||
            k2 >= static_cast<int>(ch.energies.size()))
            throw parameter_error("w_ground_to: channel index out of range");
        Ra = &ch.R[k1];
        Rb = &ch.R[k2];
        ua = &ch.u[k1];
        ub = &ch.u[k2];
    }
    detail::check_normalized(basis.s_functions[0], basis.h, "ground s state");
    detail::check_normalized(*ua, basis.h, "ket state 1");
    detail::check_normalized(*ub, basis.h, "ket state 2");
    const auto& R0 = basis.radial_R[0];
    const std::size_t nr = R0.size();
    std::vector<double> f(nr);
    for (std::size_t i = 0; i < nr; ++i) {
        const double r = static_cast<double>(i) * basis.h;
        f[i] = r * r * R0[i] * R0[i] * (*Ra)[i] * (*Rb)[i];
    }
    return detail::simpson(f, basis.h) / (4.0 * M_PI);
}

// Contact element between arbitrary pairs as far as the spherical-harmonic
// orthonormality reductions carry: at least one side must be a pure s pair,
// which is all the driven problem ever needs (the bra is the ground pair).
// Selection-rule zeros are returned exactly, without quadrature. The
// conjugate pair (m, -m) carries the sign (-1)^m from Y_l^m* = (-1)^m Y_l^-m.
inline double w_general(const QuantumTriple& a1, const QuantumTriple& a2,
                        const QuantumTriple& b1, const QuantumTriple& b2,
                        const RadialBasis& basis) {
    const bool bra_s = (a1.ell == 0 && a2.ell == 0);
    const bool ket_s = (b1.ell == 0 && b2.ell == 0);
    if (!bra_s && !ket_s)
        throw parameter_error("w_general: one side must be an s-state pair");
    const QuantumTriple& s1 = bra_s ? a1 : b1;
    const QuantumTriple& s2 = bra_s ? a2 : b2;
    const QuantumTriple& g1 = bra_s ? b1 : a1;
    const QuantumTriple& g2 = bra_s ? b2 : a2;
    if (g1.ell != g2.ell) return 0.0;
    if (g1.m + g2.m != 0) return 0.0;
    const double sign = (g1.m % 2 == 0) ? 1.0 : -1.0;
    if (s1.k == 0 && s2.k == 0)
        return sign * w_ground_to(g1.k, g2.k, g1.ell, basis);
    // general s bra: same angular reduction, different radial s functions
    const auto& ch = g1.ell == 0
                         ? basis.radial_R
                         : basis.channel(g1.ell).R;
    if (s1.k >= basis.s_count() || s2.k >= basis.s_count() ||
        g1.k >= static_cast<int>(ch.size()) || g2.k >= static_cast<int>(ch.size()))
        throw parameter_error("w_general: state index out of range");
    const std::size_t nr = basis.radial_R[0].size();
    std::vector<double> f(nr);
    for (std::size_t i = 0; i < nr; ++i) {
        const double r = static_cast<double>(i) * basis.h;
        f[i] = r * r * basis.radial_R[s1.k][i] * basis.radial_R[s2.k][i] * ch[g1.k][i] *
               ch[g2.k][i];
    }
    return sign * detail::simpson(f, basis.h) / (4.0 * M_PI);
}

// Ground-row table of plain radial elements, the only coupling the driven
// two-boson problem needs at first order in the weak drive. Immutable after
// build apart from the asymmetry hook used as a negative control in tests.
struct MatrixElementTable {
    using Key = std::tuple<int, int, int>; // (ell, khigh, klow)
    std::map<Key, double> entries;
    std::map<Key, double> reverse_overrides; // test hook: excited->ground side

    static Key key(int k1, int k2, int ell) {
        return {ell, std::max(k1, k2), std::min(k1, k2)};
    }

    bool contains(int k1, int k2, int ell) const { return entries.count(key(k1, k2, ell)) > 0; }

    double at(int k1, int k2, int ell) const {
        auto it = entries.find(key(k1, k2, ell));
        if (it == entries.end())
            throw parameter_error("MatrixElementTable: element not tabulated");
        return it->second;
    }

    // Coupling used on the excited->ground row; equals at() unless a test
    // injected an asymmetry to break hermiticity on purpose.
    double at_reverse(int k1, int k2, int ell) const {
        auto it = reverse_overrides.find(key(k1, k2, ell));
        return it != reverse_overrides.end() ? it->second : at(k1, k2, ell);
    }

    void override_reverse(int k1, int k2, int ell, double value) {
        reverse_overrides[key(k1, k2, ell)] = value;
    }

    static MatrixElementTable build(const RadialBasis& basis, int ell_max, int k_max) {
        MatrixElementTable table;
        for (int ell = 0; ell <= ell_max; ++ell) {
            const int count =
                ell == 0 ? std::min(k_max + 1, basis.s_count())
                         : std::min(k_max + 1,
                                    static_cast<int>(basis.channel(ell).energies.size()));
            for (int k1 = 0; k1 < count; ++k1)
                for (int k2 = 0; k2 <= k1; ++k2)
                    table.entries[key(k1, k2, ell)] = w_ground_to(k1, k2, ell, basis);
        }
        return table;
    }
};

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
};

namespace detail {

inline ScalingFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) throw parameter_error("fit_loglog: need at least 2 points");
    double sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(std::fabs(y[i]));
        sx += lx;
        sxx += lx * lx;
        sy += ly;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    if (!(std::fabs(denom) > 1e-300))
        throw parameter_error("fit_loglog: degenerate abscissas");
    ScalingFit fit;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::log(std::fabs(y[i])) - (fit.intercept + fit.slope * std::log(x[i]));
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / n);
    return fit;
}

} // namespace detail

// Least-squares exponent of |W_{0,0;p-K,q-K}| against N over a set of
// semiprimes with oracle factors.
inline ScalingFit scaling_probe(const RadialBasis& basis, const std::vector<Semiprime>& targets) {
    std::vector<double> ns, ws;
    for (const auto& sp : targets) {
        const auto fs = factor_state_of(sp, basis.K);
        ns.push_back(static_cast<double>(sp.N));
        ws.push_back(w_ground_to(static_cast<int>(fs.j1), static_cast<int>(fs.j2), 0, basis));
    }
    std::size_t distinct = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        bool dup = false;
        for (std::size_t j = 0; j < i; ++j) dup |= ns[j] == ns[i];
        if (!dup) ++distinct;
    }
    if (distinct < 2) throw parameter_error("scaling_probe: need at least 2 distinct N");
    return detail::fit_loglog(ns, ws);
}

} // namespace logtrap
