#ifndef ADVSEL_QUAD_HPP
#define ADVSEL_QUAD_HPP

// Quadrature along the trait axis, including integrals of g(s)/f(s) over
// intervals whose endpoints approach roots of f. Near a root the integrand
// behaves like a power of (s - root); the substitution u = ln|s - root|
// on the subinterval nearest the root makes it smooth there.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "expr.hpp"
#include "problem.hpp"

namespace advsel {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class F>
double adaptive_quad(F&& f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    using boost::math::quadrature::gauss_kronrod;
    double err = 0;
    double v = gauss_kronrod<double, 15>::integrate(std::forward<F>(f), a, b, 12, rel_tol, &err);
    return v;
}

// Integral with integrable power-law endpoint singularities.
template <class F>
double endpoint_aware_quad(F&& f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(std::forward<F>(f), a, b, rel_tol);
}

namespace quaddetail {

// Roots of f adjacent to the open interval containing (from, to).
struct IntervalBracket {
    bool has_left = false, has_right = false;
    double left = 0, right = 0;
};

inline IntervalBracket bracket_interval(const ProblemSpec& spec, double lo, double hi) {
    IntervalBracket br;
    for (const auto& e : spec.equilibria) {
        if (e.is_plateau()) {
            // treat plateau edges as roots for bracketing purposes
            if (e.plateau->second <= lo + spec.num.tol_root &&
                (!br.has_left || e.plateau->second > br.left)) {
                br.has_left = true;
                br.left = e.plateau->second;
            }
            if (e.plateau->first >= hi - spec.num.tol_root &&
                (!br.has_right || e.plateau->first < br.right)) {
                br.has_right = true;
                br.right = e.plateau->first;
            }
            continue;
        }
        double x = e.location;
        if (x <= lo + spec.num.tol_root && (!br.has_left || x > br.left)) {
            br.has_left = true;
            br.left = x;
        }
        if (x >= hi - spec.num.tol_root && (!br.has_right || x < br.right)) {
            br.has_right = true;
            br.right = x;
        }
        if (x > lo + spec.num.tol_root && x < hi - spec.num.tol_root)
            throw QuadratureError("integration interval straddles a root of f at x = " +
                                  std::to_string(x));
    }
    return br;
}

} // namespace quaddetail

// integral of numerator(s) / f(s) over [from, to], both inside a single
// root-free interval (endpoints may sit arbitrarily close to the adjacent
// roots, but not on them unless the numerator vanishes there too).
inline double spatial_characteristic_integral(const ProblemSpec& spec, double from,
                                              double to, const Expr& numerator) {
    if (from == to) return 0.0;
    double sign = 1.0;
    double lo = from, hi = to;
    if (lo > hi) {
        std::swap(lo, hi);
        sign = -1.0;
    }

    auto br = quaddetail::bracket_interval(spec, lo, hi);
    const double rel = spec.num.quad_rel_tol;
    const double len = hi - lo;

    auto plain = [&](double s) {
        double fs = spec.f(s);
        if (fs == 0.0) throw QuadratureError("f vanishes inside the integration interval");
        return numerator(s) / fs;
    };

    // Non-integrable endpoint guard: endpoint exactly on a root with a
    // non-vanishing numerator diverges like 1/(s - root).
    auto guard = [&](double endpoint, double root) {
        if (std::abs(endpoint - root) <= 1e-300) {
            double num_at = numerator.eval_or_nan(root);
            if (std::isfinite(num_at) && std::abs(num_at) > 0)
                throw QuadratureError("non-integrable endpoint at root x = " +
                                      std::to_string(root));
        }
    };
    if (br.has_left) guard(lo, br.left);
    if (br.has_right) guard(hi, br.right);

    double total = 0.0;
    double mid_lo = lo, mid_hi = hi;

    // Log-substituted piece next to each nearby root: s = root + sgn e^u.
    auto log_piece = [&](double root, double p_lo, double p_hi) {
        // p_lo, p_hi on the same side of root; integrate in u = ln|s-root|
        double sgn_side = (p_lo > root) ? 1.0 : -1.0;
        double u_lo = std::log(std::abs(p_lo - root));
        double u_hi = std::log(std::abs(p_hi - root));
        auto g = [&](double u) {
            double s = root + sgn_side * std::exp(u);
            double fs = spec.f(s);
            if (fs == 0.0) return 0.0; // only at the far limit of the window
            return numerator(s) * (s - root) / fs;
        };
        double v = adaptive_quad(g, std::min(u_lo, u_hi), std::max(u_lo, u_hi), rel);
        return (u_hi >= u_lo) ? v : -v;
    };

    const double near_frac = 0.25;
    if (br.has_left && lo > br.left && (lo - br.left) < near_frac * len) {
        double cut = std::min(hi, br.left + near_frac * len);
        if (cut > lo) {
            total += log_piece(br.left, lo, cut);
            mid_lo = cut;
        }
    }
    if (br.has_right && hi < br.right && (br.right - hi) < near_frac * len && mid_lo < hi) {
        double cut = std::max(mid_lo, br.right - near_frac * len);
        if (cut < hi) {
            total += log_piece(br.right, cut, hi);
            mid_hi = cut;
        }
    }
    if (mid_lo < mid_hi) total += adaptive_quad(plain, mid_lo, mid_hi, rel);

    return sign * total;
}

} // namespace advsel

#endif
