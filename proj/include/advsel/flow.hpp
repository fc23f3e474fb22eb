#ifndef ADVSEL_FLOW_HPP
#define ADVSEL_FLOW_HPP

// Forward and backward characteristic flows of dx/dt = f(x), with
//  - Liouville jacobian accumulated as an augmented integral of f',
//  - arbitrary path integrals of scalar fields along the trajectory,
//  - root clamping: once within tol_root of a hyperbolic root and moving
//    toward it, the trajectory snaps to the root and the remaining
//    integrals continue analytically (constant rates at a fixed point),
//  - exit detection when the trajectory leaves a stated window.

#include <cmath>
#include <optional>
#include <vector>

#include "expr.hpp"
#include "problem.hpp"
#include "rk.hpp"

namespace advsel {

enum class FlowDir { Forward, Backward };

struct FlowResult {
    double endpoint = 0.0;
    double jacobian = 1.0; // d(endpoint)/d(start)
    std::vector<double> path_integrals;
    bool clamped = false;
    double clamp_time = 0.0;
    std::optional<double> exit_time; // left the window before t
};

// Dense-output record of one trajectory; state layout:
//   y[0] = position, y[1] = signed integral of f' (log jacobian),
//   y[2 + i] = integral of fields[i] along the trajectory.
struct FlowCache {
    FlowDir dir = FlowDir::Forward;
    double t_end = 0.0;
    DenseSolution dense;
    bool clamped = false;
    double clamp_time = 0.0;
    std::optional<double> exit_time;

    void eval(double t, State& out) const { dense.eval(t, out); }

    double position(double t) const {
        State s;
        dense.eval(t, s);
        return s[0];
    }
    double log_jacobian(double t) const {
        State s;
        dense.eval(t, s);
        return s[1];
    }
    double path_integral(double t, std::size_t i) const {
        State s;
        dense.eval(t, s);
        return s[2 + i];
    }
};

namespace flowdetail {

struct ClampTargets {
    std::vector<double> roots; // hyperbolic root locations

    static ClampTargets from_spec(const ProblemSpec& spec) {
        ClampTargets ct;
        for (const auto& e : spec.equilibria)
            if (!e.is_plateau()) ct.roots.push_back(e.location);
        return ct;
    }
};

} // namespace flowdetail

// Integrate the flow from x0 over [0, t]. `fields` are integrated along the
// trajectory. The window defaults to the domain widened by one width on each
// side; leaving it stops integration and sets exit_time.
inline FlowCache flow_cache(const ProblemSpec& spec, double x0, double t, FlowDir dir,
                            const std::vector<Expr>& fields,
                            std::optional<OdeOptions> ode_opt = std::nullopt) {
    const double sgn = (dir == FlowDir::Forward) ? 1.0 : -1.0;
    const double w = spec.domain_width();
    const double win_lo = spec.domain_lo - w, win_hi = spec.domain_hi + w;
    auto targets = flowdetail::ClampTargets::from_spec(spec);

    OdeOptions opt;
    if (ode_opt) {
        opt = *ode_opt;
    } else {
        opt.rel_tol = spec.num.ode_rel_tol;
        opt.abs_tol = spec.num.ode_abs_tol;
    }

    const std::size_t nf = fields.size();
    State y(2 + nf, 0.0);
    y[0] = x0;

    auto rhs = [&](double, const State& s, State& ds) {
        double x = s[0];
        double fx = spec.f(x);
        ds[0] = sgn * fx;
        ds[1] = sgn * spec.f_prime(x);
        for (std::size_t i = 0; i < nf; ++i) ds[2 + i] = fields[i](x);
    };

    FlowCache cache;
    cache.dir = dir;
    cache.t_end = t;

    bool clamped = false;
    double clamp_at = 0.0, clamp_root = 0.0;

    // Already at (numerically on) a root: freeze immediately.
    for (double root : targets.roots) {
        if (std::abs(x0 - root) < spec.num.tol_root) {
            cache.clamped = true;
            cache.clamp_time = 0.0;
            cache.dense.has_tail = true;
            cache.dense.tail_t0 = 0.0;
            State y0(2 + nf, 0.0);
            y0[0] = root;
            cache.dense.tail_y0 = y0;
            State rate(2 + nf, 0.0);
            rate[1] = sgn * spec.f_prime(root);
            for (std::size_t i = 0; i < nf; ++i) rate[2 + i] = fields[i](root);
            cache.dense.tail_rate = rate;
            return cache;
        }
    }

    auto post = [&](double tc, State& s) {
        double x = s[0];
        if (x < win_lo || x > win_hi) {
            cache.exit_time = tc;
            return StepAction::Stop;
        }
        double v = sgn * spec.f(x);
        for (double root : targets.roots) {
            if (std::abs(x - root) < spec.num.tol_root &&
                v * (root - x) >= 0) {
                s[0] = root;
                clamped = true;
                clamp_at = tc;
                clamp_root = root;
                return StepAction::Stop;
            }
        }
        return StepAction::Continue;
    };

    double reached = integrate(rhs, y, 0.0, t, opt, post, &cache.dense);

    if (clamped) {
        cache.clamped = true;
        cache.clamp_time = clamp_at;
        // frozen tail: constant rates at the fixed point
        cache.dense.has_tail = true;
        cache.dense.tail_t0 = reached;
        cache.dense.tail_y0 = y;
        State rate(2 + nf, 0.0);
        rate[1] = sgn * spec.f_prime(clamp_root);
        for (std::size_t i = 0; i < nf; ++i) rate[2 + i] = fields[i](clamp_root);
        cache.dense.tail_rate = rate;
    } else if (cache.exit_time) {
        // hold the exit state (mass handling is the caller's business)
        cache.dense.has_tail = true;
        cache.dense.tail_t0 = reached;
        cache.dense.tail_y0 = y;
        cache.dense.tail_rate.assign(2 + nf, 0.0);
    }
    return cache;
}

inline FlowResult flow_run(const ProblemSpec& spec, double x0, double t, FlowDir dir,
                           const std::vector<Expr>& fields,
                           std::optional<OdeOptions> ode_opt = std::nullopt) {
    FlowCache c = flow_cache(spec, x0, t, dir, fields, ode_opt);
    State s;
    c.dense.eval(t, s);
    FlowResult res;
    res.endpoint = s[0];
    res.jacobian = std::exp(s[1]);
    res.path_integrals.assign(s.begin() + 2, s.end());
    res.clamped = c.clamped;
    res.clamp_time = c.clamp_time;
    res.exit_time = c.exit_time;
    return res;
}

inline FlowResult flow_forward(const ProblemSpec& spec, double y0, double t,
                               const std::vector<Expr>& fields = {},
                               std::optional<OdeOptions> ode_opt = std::nullopt) {
    return flow_run(spec, y0, t, FlowDir::Forward, fields, ode_opt);
}

inline FlowResult flow_backward(const ProblemSpec& spec, double x0, double t,
                                const std::vector<Expr>& fields = {},
                                std::optional<OdeOptions> ode_opt = std::nullopt) {
    return flow_run(spec, x0, t, FlowDir::Backward, fields, ode_opt);
}

// |X(s, Y(t,x)) - Y(t-s, x)|, a pure consistency probe.
inline double check_flow_identity(const ProblemSpec& spec, double x, double t, double s) {
    double ytx = flow_backward(spec, x, t).endpoint;
    double lhs = flow_forward(spec, ytx, s).endpoint;
    double rhs = flow_backward(spec, x, t - s).endpoint;
    return std::abs(lhs - rhs);
}

} // namespace advsel

#endif
