#ifndef ADVSEL_ROOTFIND_HPP
#define ADVSEL_ROOTFIND_HPP

// Bracketing root refinement (Brent) and equilibrium detection for the
// velocity field: grid sign-scan, refinement, stability classification,
// plateau (f identically ~0 on a run of grid cells) detection.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "expr.hpp"

namespace advsel {

// Classic Brent: inverse quadratic / secant / bisection. f(a) and f(b)
// must have opposite signs.
template <class F>
double brent(F&& f, double a, double b, double xtol, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0) return a;
    if (fb == 0) return b;
    if (std::abs(fa) < std::abs(fb)) {
        std::swap(a, b);
        std::swap(fa, fb);
    }
    double c = a, fc = fa, d = b - a, s = b, fs = fb;
    bool mflag = true;
    for (int it = 0; it < max_iter && fs != 0 && std::abs(b - a) > xtol; ++it) {
        if (fa != fc && fb != fc) {
            s = a * fb * fc / ((fa - fb) * (fa - fc)) +
                b * fa * fc / ((fb - fa) * (fb - fc)) +
                c * fa * fb / ((fc - fa) * (fc - fb));
        } else {
            s = b - fb * (b - a) / (fb - fa);
        }
        double lo = 0.25 * (3 * a + b);
        bool bad = !((s > std::min(lo, b) && s < std::max(lo, b))) ||
                   (mflag && std::abs(s - b) >= 0.5 * std::abs(b - c)) ||
                   (!mflag && std::abs(s - b) >= 0.5 * std::abs(c - d)) ||
                   (mflag && std::abs(b - c) < xtol) ||
                   (!mflag && std::abs(c - d) < xtol);
        if (bad) {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if (fa * fs < 0) {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if (std::abs(fa) < std::abs(fb)) {
            std::swap(a, b);
            std::swap(fa, fb);
        }
    }
    return std::abs(fb) <= std::abs(fs) ? b : s;
}

enum class Stability { Stable, Unstable, NonHyperbolic };

inline const char* stability_name(Stability s) {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::Unstable: return "unstable";
        case Stability::NonHyperbolic: return "non-hyperbolic";
    }
    return "?";
}

struct Equilibrium {
    double location = 0.0;
    double slope = 0.0; // f'(location)
    Stability kind = Stability::NonHyperbolic;
    std::optional<std::pair<double, double>> plateau; // f ~ 0 on this segment
    bool merged_warning = false; // two roots closer than grid spacing

    bool is_plateau() const { return plateau.has_value(); }
};

inline Stability classify_slope(double slope, double tol_hyperbolic) {
    if (std::abs(slope) <= tol_hyperbolic) return Stability::NonHyperbolic;
    return slope < 0 ? Stability::Stable : Stability::Unstable;
}

// Sign scan on grid_n nodes, Brent refinement of each sign change,
// plateau runs where |f| < tol_root on consecutive nodes.
inline std::vector<Equilibrium> find_equilibria(const Expr& f, double lo, double hi,
                                                int grid_n, double tol_root,
                                                double tol_hyperbolic) {
    Expr fp = f.derivative();
    std::vector<Equilibrium> out;
    const double h = (hi - lo) / (grid_n - 1);
    auto fv = [&](double x) { return f(x); };

    std::vector<double> xs(grid_n), vals(grid_n);
    for (int i = 0; i < grid_n; ++i) {
        xs[i] = lo + i * h;
        vals[i] = f(xs[i]);
    }

    int i = 0;
    while (i < grid_n) {
        if (std::abs(vals[i]) < tol_root) {
            int j = i;
            while (j + 1 < grid_n && std::abs(vals[j + 1]) < tol_root) ++j;
            if (j > i) {
                // run of near-zero nodes: plateau equilibrium
                Equilibrium e;
                e.plateau = std::make_pair(xs[i], xs[j]);
                e.location = 0.5 * (xs[i] + xs[j]);
                e.slope = 0.0;
                e.kind = Stability::NonHyperbolic;
                out.push_back(e);
            } else {
                Equilibrium e;
                e.location = xs[i];
                e.slope = fp.eval_or_nan(xs[i]);
                e.kind = classify_slope(e.slope, tol_hyperbolic);
                out.push_back(e);
            }
            i = j + 1;
            continue;
        }
        if (i + 1 < grid_n && std::abs(vals[i + 1]) >= tol_root &&
            vals[i] * vals[i + 1] < 0) {
            double root = brent(fv, xs[i], xs[i + 1], tol_root * 0.5);
            Equilibrium e;
            e.location = root;
            e.slope = fp.eval_or_nan(root);
            e.kind = classify_slope(e.slope, tol_hyperbolic);
            out.push_back(e);
        }
        ++i;
    }

    // Merge warning: flag pairs closer than one grid cell.
    for (std::size_t k = 1; k < out.size(); ++k)
        if (!out[k].is_plateau() && !out[k - 1].is_plateau() &&
            out[k].location - out[k - 1].location < h)
            out[k].merged_warning = out[k - 1].merged_warning = true;

    return out;
}

} // namespace advsel

#endif
