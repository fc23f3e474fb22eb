#ifndef ADVSEL_VANISHING_HPP
#define ADVSEL_VANISHING_HPP

// Estimate how the initial density vanishes at a point: n0(x̄ ± h) ~ C h^α.
// α = 0 encodes n0(x̄) > 0. A one-sided window that is identically zero
// (below the machine floor) is reported as ExactlyZeroNearby.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "expr.hpp"

namespace advsel {

enum class VanishingSource { UserDeclared, Fitted, ExactlyZeroNearby };

struct VanishingOrder {
    double alpha = 0.0;
    double C = 1.0;
    VanishingSource source = VanishingSource::Fitted;
    double fit_residual = 0.0; // rms log-log residual, Fitted only

    bool exactly_zero() const { return source == VanishingSource::ExactlyZeroNearby; }
};

enum class Side { Left, Right };

struct VanishingFitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Window h in {2^-k}, k = 6..16, scaled by the domain width; least-squares
// slope of log n0(x̄ ± h) vs log h.
inline VanishingOrder vanishing_order(const Expr& n0, double xbar, Side side,
                                      double domain_width, double tol_fit,
                                      double value_tol = 1e-12) {
    const double sgn = (side == Side::Right) ? 1.0 : -1.0;
    const double floor_ = 1e-300;

    double at = n0.eval_or_nan(xbar);
    if (std::isfinite(at) && at > value_tol) {
        VanishingOrder v;
        v.alpha = 0.0;
        v.C = at;
        v.source = VanishingSource::Fitted;
        return v;
    }

    std::vector<double> lh, lv;
    bool all_zero = true;
    for (int k = 6; k <= 16; ++k) {
        double h = std::ldexp(domain_width, -k);
        double val = n0.eval_or_nan(xbar + sgn * h);
        if (!std::isfinite(val)) continue;
        if (val > floor_) {
            all_zero = false;
            lh.push_back(std::log(h));
            lv.push_back(std::log(val));
        }
    }
    if (all_zero) {
        VanishingOrder v;
        v.source = VanishingSource::ExactlyZeroNearby;
        return v;
    }
    if (lh.size() < 3)
        throw VanishingFitError("too few usable samples for vanishing-order fit");

    // least squares lv = alpha*lh + logC
    double n = static_cast<double>(lh.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lh.size(); ++i) {
        sx += lh[i];
        sy += lv[i];
        sxx += lh[i] * lh[i];
        sxy += lh[i] * lv[i];
    }
    double alpha = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double logC = (sy - alpha * sx) / n;

    double ss = 0;
    for (std::size_t i = 0; i < lh.size(); ++i) {
        double r = lv[i] - (alpha * lh[i] + logC);
        ss += r * r;
    }
    double rms = std::sqrt(ss / n);
    if (rms > tol_fit)
        throw VanishingFitError("vanishing-order fit residual " + std::to_string(rms) +
                                " exceeds tolerance " + std::to_string(tol_fit));

    VanishingOrder v;
    v.alpha = std::max(0.0, alpha);
    v.C = std::exp(logC);
    v.source = VanishingSource::Fitted;
    v.fit_residual = rms;
    return v;
}

} // namespace advsel

#endif
