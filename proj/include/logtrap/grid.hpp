#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <vector>

#include "logtrap/errors.hpp"

namespace logtrap {

// Uniform symmetric grid in the dimensionless coordinate xi = alpha*x.
// n is odd so xi = 0 is a node; that node is what ties the 1D problem
// to the half-line radial problem.
struct Grid {
    double xmax = 15.0;
    int n = 3001;

    Grid() = default;
    Grid(double xmax_, int n_) : xmax(xmax_), n(n_) {
        if (!(xmax > 0.0)) throw parameter_error("Grid: xmax must be positive");
        if (n < 201 || n % 2 == 0) throw parameter_error("Grid: n must be odd and >= 201");
    }

    double spacing() const { return 2.0 * xmax / (n - 1); }
    double point(int i) const { return -xmax + i * spacing(); }
    int center() const { return (n - 1) / 2; }
    // number of half-line samples r_i = i*h, i = 0..half_points()-1
    int half_points() const { return center() + 1; }

    bool operator==(const Grid&) const = default;
};

// Even-symmetric potential sampled on a Grid, in units of hbar*omega0.
// Symmetry is required bitwise: construct through from_function or
// symmetrized to guarantee it.
struct PotentialOnGrid {
    Grid grid;
    std::vector<double> values;

    PotentialOnGrid() = default;
    PotentialOnGrid(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (static_cast<int>(values.size()) != grid.n)
            throw parameter_error("PotentialOnGrid: value count does not match grid");
        const int n = grid.n;
        for (int i = 0; i < n / 2; ++i)
            if (values[i] != values[n - 1 - i])
                throw parameter_error("PotentialOnGrid: values are not even-symmetric");
    }

    template <std::invocable<double> F>
    static PotentialOnGrid from_function(Grid g, F&& f) {
        std::vector<double> v(g.n);
        // evaluate on |xi| so even symmetry holds bitwise
        for (int i = 0; i <= g.center(); ++i) {
            const double val = f(std::fabs(g.point(i)));
            v[i] = val;
            v[g.n - 1 - i] = val;
        }
        return PotentialOnGrid(g, std::move(v));
    }

    static PotentialOnGrid symmetrized(Grid g, const std::vector<double>& v) {
        if (static_cast<int>(v.size()) != g.n)
            throw parameter_error("PotentialOnGrid: value count does not match grid");
        std::vector<double> s(g.n);
        for (int i = 0; i < g.n; ++i) s[i] = 0.5 * (v[i] + v[g.n - 1 - i]);
        for (int i = 0; i < g.n / 2; ++i) s[g.n - 1 - i] = s[i];
        return PotentialOnGrid(g, std::move(s));
    }

    double edge_value() const { return values.front(); }

    PotentialOnGrid mirrored() const {
        return PotentialOnGrid(grid, std::vector<double>(values.rbegin(), values.rend()));
    }
};

} // namespace logtrap
