#pragma once

#include <boost/math/interpolators/cardinal_quintic_b_spline.hpp>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "logtrap/grid.hpp"

namespace logtrap {

// Central potential shape v(rho) with its derivative, either an analytic
// pair (test oracles) or a quintic spline of the quantum grid potential.
// The spline is C^4, smooth enough that a high-order stepper conserves
// energy to the 1e-8 contract.
struct RadialShape {
    std::function<double(double)> v;
    std::function<double(double)> dv;
    double rho_min = 0.0;
    double rho_max = 0.0;

    static RadialShape from_grid(const PotentialOnGrid& pot) {
        const int nr = pot.grid.half_points();
        const double h = pot.grid.spacing();
        auto data = std::make_shared<std::vector<double>>(
            pot.values.begin() + pot.grid.center(), pot.values.end());
        auto spline =
            std::make_shared<boost::math::interpolators::cardinal_quintic_b_spline<double>>(
                data->data(), data->size(), 0.0, h);
        RadialShape s;
        s.v = [spline](double r) { return (*spline)(r); };
        s.dv = [spline](double r) { return spline->prime(r); };
        s.rho_min = 0.0;
        s.rho_max = (nr - 1) * h;
        return s;
    }

    static RadialShape analytic(std::function<double(double)> v,
                                std::function<double(double)> dv, double rho_min,
                                double rho_max) {
        return RadialShape{std::move(v), std::move(dv), rho_min, rho_max};
    }
};

// Internal units mu = V0 = J = 1, so alpha_cl = 1 and the quantum grid
// coordinate doubles as the classical dimensionless radius.
struct OrbitConfig {
    double energy = 0.86; // in units of V0
    double J = 1.0;
    RadialShape shape;
    int periods = 5;
    double tol = 1e-12;        // stepper tolerance
    int samples_per_period = 256;

    double u_eff(double rho) const { return 0.5 * J * J / (rho * rho) + shape.v(rho); }
    double du_eff(double rho) const { return -J * J / (rho * rho * rho) + shape.dv(rho); }
};

struct TurningPoint {
    double t = 0.0;
    double rho = 0.0;
    double theta = 0.0;
    bool inner = false;
};

struct OrbitTrace {
    std::vector<std::array<double, 3>> samples; // (t, rho, theta)
    std::vector<TurningPoint> turning_points;   // includes the t = 0 start
    double energy = 0.0;
    double angular_momentum = 0.0;
    double max_energy_drift = 0.0; // relative, over accepted steps
    double rho_inner = 0.0, rho_outer = 0.0;
    double radial_period = 0.0; // mean inner-to-inner time
};

namespace detail {

inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Turning radii of E in the effective potential, bracketing the minimum.
inline std::pair<double, double> turning_radii(const OrbitConfig& cfg) {
    const double lo_edge = std::max(cfg.shape.rho_min, 1e-4);
    const double hi_edge = cfg.shape.rho_max;
    // locate the effective minimum by scan
    double rho_star = lo_edge, u_star = cfg.u_eff(lo_edge);
    const int scan = 4000;
    for (int i = 0; i <= scan; ++i) {
        const double r = lo_edge + (hi_edge - lo_edge) * i / scan;
        const double u = cfg.u_eff(r);
        if (u < u_star) {
            u_star = u;
            rho_star = r;
        }
    }
    if (cfg.energy <= u_star)
        throw no_motion_error("orbit: energy below the effective-potential minimum");
    if (cfg.u_eff(hi_edge) < cfg.energy)
        throw domain_truncation_error("orbit: energy escapes the sampled potential");
    auto f = [&](double r) { return cfg.u_eff(r) - cfg.energy; };
    const double rin = bisect(f, lo_edge, rho_star);
    const double rout = bisect(f, rho_star, hi_edge);
    return {rin, rout};
}

// Crude radial period for the integration horizon: cos-substitution
// quadrature of dt = drho / v_rho, regular at both ends.
inline double period_estimate(const OrbitConfig& cfg, double rin, double rout) {
    const int n = 2000;
    double sum = 0.0;
    std::vector<double> g(n + 1, 0.0);
    for (int i = 1; i < n; ++i) {
        const double th = M_PI * i / n;
        const double rho = 0.5 * (rin + rout) - 0.5 * (rout - rin) * std::cos(th);
        const double arg = std::max(2.0 * (cfg.energy - cfg.u_eff(rho)), 0.0);
        g[i] = 0.5 * (rout - rin) * std::sin(th) / std::sqrt(arg + 1e-300);
    }
    g[0] = 2.0 * g[1] - g[2];
    g[n] = 2.0 * g[n - 1] - g[n - 2];
    for (int i = 0; i < n; ++i) sum += 0.5 * (g[i] + g[i + 1]) * (M_PI / n);
    return 2.0 * sum;
}

} // namespace detail

// Integrate (rho, p_rho, theta) under the central force with conserved J,
// starting at the inner turning point with theta = 0. Turning points are
// located by sign changes of the radial velocity between accepted steps
// and refined to machine precision by Newton iterations on re-integrated
// local states.
inline OrbitTrace integrate_orbit(const OrbitConfig& cfg) {
    namespace ode = boost::numeric::odeint;
    using Y = std::array<double, 3>;
    if (cfg.periods < 0) throw parameter_error("integrate_orbit: periods must be >= 0");
    auto [rin, rout] = detail::turning_radii(cfg);

    OrbitTrace trace;
    trace.energy = cfg.energy;
    trace.angular_momentum = cfg.J;
    trace.rho_inner = rin;
    trace.rho_outer = rout;
    trace.turning_points.push_back({0.0, rin, 0.0, true});
    if (cfg.periods == 0) {
        trace.samples.push_back({0.0, rin, 0.0});
        return trace;
    }

    const double period = detail::period_estimate(cfg, rin, rout);
    trace.radial_period = period;
    const double horizon = (cfg.periods + 0.75) * period;
    const double dt_obs = period / cfg.samples_per_period;

    auto rhs = [&cfg](const Y& y, Y& dy, double) {
        dy[0] = y[1];
        dy[1] = -cfg.du_eff(y[0]);
        dy[2] = cfg.J / (y[0] * y[0]);
    };
    auto stepper = ode::make_dense_output(cfg.tol, cfg.tol, ode::runge_kutta_dopri5<Y>());

    Y y{rin, 0.0, 0.0};
    stepper.initialize(y, 0.0, 1e-4);
    const double mid = 0.5 * (rin + rout);
    int inner_seen = 0;
    double next_sample = 0.0;
    double prev_pr = 0.0;
    double prev_t = 0.0;
    trace.samples.push_back({0.0, rin, 0.0});

    while (inner_seen < cfg.periods && stepper.current_time() < 4.0 * horizon) {
        stepper.do_step(rhs);
        const double t1 = stepper.current_time();
        const Y& y1 = stepper.current_state();
        // record equally spaced samples off the dense interpolant
        while (next_sample <= t1) {
            if (next_sample >= prev_t) {
                Y ys;
                stepper.calc_state(next_sample, ys);
                trace.samples.push_back({next_sample, ys[0], ys[2]});
            }
            next_sample += dt_obs;
        }
        const double e_now = 0.5 * y1[1] * y1[1] + cfg.u_eff(y1[0]);
        trace.max_energy_drift = std::max(
            trace.max_energy_drift, std::fabs(e_now - cfg.energy) / std::fabs(cfg.energy));
        // radial turning: p_rho crosses zero
        if (prev_t > 0.0 && prev_pr != 0.0 && ((prev_pr < 0.0) != (y1[1] < 0.0))) {
            double ta = prev_t, tb = t1;
            Y ys;
            for (int it = 0; it < 80; ++it) {
                const double tm = 0.5 * (ta + tb);
                stepper.calc_state(tm, ys);
                if ((ys[1] < 0.0) == (prev_pr < 0.0))
                    ta = tm;
                else
                    tb = tm;
                if (tb - ta < 1e-14 * std::max(1.0, t1)) break;
            }
            const double tstar = 0.5 * (ta + tb);
            stepper.calc_state(tstar, ys);
            TurningPoint tp{tstar, ys[0], ys[2], ys[0] < mid};
            trace.turning_points.push_back(tp);
            if (tp.inner) ++inner_seen;
        }
        prev_pr = y1[1];
        prev_t = t1;
    }
    if (inner_seen < cfg.periods)
        throw stiffness_error("integrate_orbit: failed to cover the requested periods");
    // refine the mean radial period from the recorded inner turnings
    std::vector<const TurningPoint*> inner;
    for (const auto& tp : trace.turning_points)
        if (tp.inner) inner.push_back(&tp);
    if (inner.size() >= 2)
        trace.radial_period =
            (inner.back()->t - inner.front()->t) / static_cast<double>(inner.size() - 1);
    return trace;
}

struct ApsidalResult {
    double angle = 0.0;         // mean delta-theta between consecutive inner turnings
    bool closed = false;        // matches 2*pi*(a/b) for a small rational
    double closure_error = 0.0; // distance to the nearest small rational multiple
    int a = 0, b = 0;
};

// Mean polar advance per radial period and the closure verdict against
// small rational multiples of 2*pi (a/b <= 8, b <= 8).
inline ApsidalResult apsidal_angle(const OrbitTrace& trace, double closure_tol = 1e-3) {
    std::vector<const TurningPoint*> inner;
    for (const auto& tp : trace.turning_points)
        if (tp.inner) inner.push_back(&tp);
    if (inner.size() < 2)
        throw parameter_error("apsidal_angle: need at least two inner turning points");
    ApsidalResult res;
    res.angle = (inner.back()->theta - inner.front()->theta) /
                static_cast<double>(inner.size() - 1);
    res.closure_error = std::numeric_limits<double>::infinity();
    for (int b = 1; b <= 8; ++b) {
        for (int a = 1; a <= 8 * b; ++a) {
            const double target = 2.0 * M_PI * a / b;
            const double err = std::fabs(res.angle - target);
            if (err < res.closure_error) {
                res.closure_error = err;
                res.a = a;
                res.b = b;
            }
        }
    }
    res.closed = res.closure_error <= closure_tol;
    return res;
}

} // namespace logtrap
