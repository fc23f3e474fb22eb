#ifndef ADVSEL_RK_HPP
#define ADVSEL_RK_HPP

// Adaptive embedded Runge-Kutta 5(4) (Dormand-Prince) over
// std::vector<double> state, with optional dense output (Hairer's
// 4th-order continuous extension) and a post-step hook for clamping /
// early termination. The hook may modify the state; the integrator then
// refreshes the FSAL derivative.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace advsel {

using State = std::vector<double>;

struct OdeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OdeOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double h_init = 0.0; // 0 = automatic
    double h_max = std::numeric_limits<double>::infinity();
    long max_steps = 50'000'000;
};

enum class StepAction { Continue, StateModified, Stop };

struct DenseSegment {
    double t0 = 0, t1 = 0;
    // Hairer cont1..cont5 per component; u(theta) =
    // c1 + th*(c2 + (1-th)*(c3 + th*(c4 + (1-th)*c5)))
    std::vector<double> c1, c2, c3, c4, c5;

    void eval(double t, State& out) const {
        double th = (t1 == t0) ? 0.0 : (t - t0) / (t1 - t0);
        double th1 = 1.0 - th;
        std::size_t n = c1.size();
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = c1[i] + th * (c2[i] + th1 * (c3[i] + th * (c4[i] + th1 * c5[i])));
    }
};

struct DenseSolution {
    double t_begin = 0, t_end = 0;
    std::vector<DenseSegment> segments;
    // After a Stop or clamp-freeze the trailing state can extend linearly:
    // components evolve with constant rates (used for frozen fixed points).
    bool has_tail = false;
    double tail_t0 = 0;
    State tail_y0, tail_rate;

    void eval(double t, State& out) const {
        if (has_tail && t >= tail_t0) {
            std::size_t n = tail_y0.size();
            out.resize(n);
            for (std::size_t i = 0; i < n; ++i)
                out[i] = tail_y0[i] + tail_rate[i] * (t - tail_t0);
            return;
        }
        if (segments.empty()) throw OdeError("dense solution is empty");
        // binary search for the segment containing t
        std::size_t lo = 0, hi = segments.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (t <= segments[mid].t1) hi = mid;
            else lo = mid + 1;
        }
        segments[lo].eval(t, out);
    }

    State eval(double t) const {
        State s;
        eval(t, s);
        return s;
    }
};

namespace rkdetail {

// Dormand-Prince coefficients.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0,
                        d7 = 69997945.0 / 29380423.0;

} // namespace rkdetail

// Integrate dy/dt = rhs(t, y) from t0 to t1 (t1 > t0).
//   rhs(t, y, dy)
//   post_step(t, y) -> StepAction, called after each accepted step; may
//     modify y (return StateModified) or end integration (return Stop).
//   collect: if non-null, receives dense segments.
// Returns the reached time (== t1 unless Stop).
template <class RHS, class PostStep>
double integrate(RHS&& rhs, State& y, double t0, double t1, const OdeOptions& opt,
                 PostStep&& post_step, DenseSolution* collect = nullptr) {
    using namespace rkdetail;
    const std::size_t n = y.size();
    State k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);

    if (collect) {
        collect->t_begin = t0;
        collect->segments.clear();
        collect->has_tail = false;
    }

    double t = t0;
    rhs(t, y, k1);

    auto err_norm = [&](const State& y0, const State& y1) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
            double e = (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                        e6 * k6[i] + e7 * k7[i]) /
                       sc;
            s += e * e;
        }
        return std::sqrt(s / n);
    };

    // initial step heuristic
    double h = opt.h_init;
    if (h <= 0) {
        double d0 = 0, d1n = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double sc = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1n += (k1[i] / sc) * (k1[i] / sc);
        }
        d0 = std::sqrt(d0 / n);
        d1n = std::sqrt(d1n / n);
        h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
        h = std::min(h, (t1 - t0) * 0.1);
        h = std::max(h, 1e-12);
    }
    h = std::min(h, opt.h_max);

    long steps = 0;
    while (t < t1) {
        if (++steps > opt.max_steps) throw OdeError("max step count exceeded");
        bool last = false;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }
        if (h <= std::abs(t) * 1e-16 && !last)
            throw OdeError("step size underflow at t = " + std::to_string(t));

        // stages
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] +
                      h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                           a65 * k5[i]);
        rhs(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] +
                      h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, ynew, k7); // FSAL

        double err = err_norm(y, ynew);
        if (err <= 1.0) {
            if (collect) {
                DenseSegment seg;
                seg.t0 = t;
                seg.t1 = t + h;
                seg.c1.resize(n);
                seg.c2.resize(n);
                seg.c3.resize(n);
                seg.c4.resize(n);
                seg.c5.resize(n);
                for (std::size_t i = 0; i < n; ++i) {
                    double dy = ynew[i] - y[i];
                    seg.c1[i] = y[i];
                    seg.c2[i] = dy;
                    seg.c3[i] = h * k1[i] - dy;
                    seg.c4[i] = dy - h * k7[i] - seg.c3[i];
                    seg.c5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                     d6 * k6[i] + d7 * k7[i]);
                }
                collect->segments.push_back(std::move(seg));
            }
            t += h;
            y = ynew;
            k1 = k7;

            StepAction act = post_step(t, y);
            if (act == StepAction::StateModified) rhs(t, y, k1);
            if (act == StepAction::Stop) {
                if (collect) collect->t_end = t;
                return t;
            }

            double fac = (err == 0) ? 5.0 : 0.9 * std::pow(err, -0.2);
            h = std::min(h * std::clamp(fac, 0.2, 5.0), opt.h_max);
        } else {
            double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            h *= fac;
        }
    }
    if (collect) collect->t_end = t;
    return t;
}

template <class RHS>
double integrate(RHS&& rhs, State& y, double t0, double t1, const OdeOptions& opt,
                 DenseSolution* collect = nullptr) {
    return integrate(std::forward<RHS>(rhs), y, t0, t1, opt,
                     [](double, State&) { return StepAction::Continue; }, collect);
}

} // namespace advsel

#endif
