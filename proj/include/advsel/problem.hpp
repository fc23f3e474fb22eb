#ifndef ADVSEL_PROBLEM_HPP
#define ADVSEL_PROBLEM_HPP

// ProblemSpec: the validated (f, r, n0) triple with domain metadata.
// validate() samples on a dense grid, computes the support hull, and
// checks the standing hypotheses (n0 >= 0 and not identically zero,
// r > 0, compact support inside the domain, positive invariance of the
// domain under the flow -- the last one a warning, not an error).

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "expr.hpp"
#include "rootfind.hpp"
#include "vanishing.hpp"

namespace advsel {

enum class ViolationKind {
    NonNegativityViolation,
    EmptySupport,
    SupportExceedsDomain,
    NotPositivelyInvariant, // warning
    ExpressionFault,
};

struct Violation {
    ViolationKind kind;
    std::string field;   // "f" | "r" | "n0" | "domain"
    std::string message;
    bool fatal = true;
};

struct ProblemSpec {
    Expr f, r, n0;
    Expr f_prime, r_prime, n0_prime;
    double domain_lo = 0.0, domain_hi = 1.0;
    double support_lo = 0.0, support_hi = 1.0;
    std::optional<AlphaHint> alpha_hint;
    NumericConfig num;
    std::vector<Equilibrium> equilibria;
    std::vector<Violation> warnings;

    double domain_width() const { return domain_hi - domain_lo; }

    // n0 extended by zero outside its support hull; evaluation faults
    // outside the support are irrelevant by construction.
    double n0_at(double x) const {
        if (x < support_lo || x > support_hi) return 0.0;
        double v = n0.eval_or_nan(x);
        return (std::isfinite(v) && v > 0) ? v : 0.0;
    }

    double sup_r() const {
        int n = num.grid_n;
        double m = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            double x = domain_lo + (domain_hi - domain_lo) * i / (n - 1);
            double v = r.eval_or_nan(x);
            if (std::isfinite(v)) m = std::max(m, v);
        }
        return m;
    }
};

struct ValidationResult {
    std::optional<ProblemSpec> spec;
    std::vector<Violation> violations; // fatal ones; warnings live on the spec

    bool ok() const { return spec.has_value(); }
};

inline ValidationResult validate(const RawConfig& cfg) {
    ValidationResult out;
    std::vector<Violation> fatal;

    Expr f, r, n0;
    try {
        f = parse_expression(cfg.f);
        r = parse_expression(cfg.r);
        n0 = parse_expression(cfg.n0);
    } catch (const ExprError& e) {
        fatal.push_back({ViolationKind::ExpressionFault, "", e.what(), true});
        out.violations = fatal;
        return out;
    }

    if (!(cfg.domain_lo < cfg.domain_hi)) {
        fatal.push_back({ViolationKind::ExpressionFault, "domain",
                         "domain must satisfy lo < hi", true});
        out.violations = fatal;
        return out;
    }

    const int n = std::max(cfg.numerics.grid_n, 256);
    const double lo = cfg.domain_lo, hi = cfg.domain_hi;
    const double floor_ = 1e-300;

    double sup_lo = std::numeric_limits<double>::infinity();
    double sup_hi = -std::numeric_limits<double>::infinity();
    bool n0_negative = false, r_nonpositive = false;
    double n0_neg_at = 0, r_bad_at = 0;

    for (int i = 0; i < n; ++i) {
        double x = lo + (hi - lo) * i / (n - 1);
        double nv = n0.eval_or_nan(x);
        double rv = r.eval_or_nan(x);
        if (std::isfinite(nv)) {
            if (nv < -1e-12) {
                n0_negative = true;
                n0_neg_at = x;
            }
            if (nv > floor_) {
                sup_lo = std::min(sup_lo, x);
                sup_hi = std::max(sup_hi, x);
            }
        }
        if (!std::isfinite(rv) || rv <= 0) {
            r_nonpositive = true;
            r_bad_at = x;
        }
    }

    if (n0_negative)
        fatal.push_back({ViolationKind::NonNegativityViolation, "n0",
                         "n0 is negative near x = " + std::to_string(n0_neg_at), true});
    if (r_nonpositive)
        fatal.push_back({ViolationKind::NonNegativityViolation, "r",
                         "r is not strictly positive near x = " + std::to_string(r_bad_at), true});
    if (!(sup_lo <= sup_hi))
        fatal.push_back({ViolationKind::EmptySupport, "n0",
                         "n0 has no positive values on the domain", true});

    // Compact support inside the domain: n0 must be (numerically) zero just
    // outside both boundaries.
    for (int i = 1; i <= 32; ++i) {
        double m = 0.02 * (hi - lo) * i / 32.0;
        double vl = n0.eval_or_nan(lo - m);
        double vr = n0.eval_or_nan(hi + m);
        if ((std::isfinite(vl) && vl > floor_) || (std::isfinite(vr) && vr > floor_)) {
            fatal.push_back({ViolationKind::SupportExceedsDomain, "n0",
                             "n0 is positive outside the domain", true});
            break;
        }
    }

    if (!fatal.empty()) {
        out.violations = fatal;
        return out;
    }

    // Refine the support hull: hunt the exact transition between the last
    // zero node and the first positive node on each side.
    double h = (hi - lo) / (n - 1);
    auto refine_edge = [&](double zero_side, double pos_side) {
        double a = zero_side, b = pos_side;
        for (int it = 0; it < 60 && std::abs(b - a) > 1e-14 * (hi - lo); ++it) {
            double m = 0.5 * (a + b);
            double v = n0.eval_or_nan(m);
            if (std::isfinite(v) && v > floor_) b = m;
            else a = m;
        }
        return 0.5 * (a + b);
    };
    if (sup_lo > lo + 0.5 * h) sup_lo = refine_edge(sup_lo - h, sup_lo);
    else sup_lo = lo;
    if (sup_hi < hi - 0.5 * h) sup_hi = refine_edge(sup_hi + h, sup_hi);
    else sup_hi = hi;

    ProblemSpec spec;
    spec.f = f;
    spec.r = r;
    spec.n0 = n0;
    spec.f_prime = f.derivative();
    spec.r_prime = r.derivative();
    spec.n0_prime = n0.derivative();
    spec.domain_lo = lo;
    spec.domain_hi = hi;
    spec.support_lo = sup_lo;
    spec.support_hi = sup_hi;
    spec.alpha_hint = cfg.alpha_hint;
    spec.num = cfg.numerics;
    spec.equilibria = find_equilibria(f, lo, hi, cfg.numerics.grid_n,
                                      cfg.numerics.tol_root, cfg.numerics.tol_hyperbolic);

    // Positive invariance of the domain: f must not point outward at either
    // boundary (outward-pointing ends are a warning -- mass can exit).
    double f_lo = f.eval_or_nan(lo), f_hi = f.eval_or_nan(hi);
    if (std::isfinite(f_lo) && f_lo < -spec.num.tol_root)
        spec.warnings.push_back({ViolationKind::NotPositivelyInvariant, "f",
                                 "f points outward at the left domain boundary", false});
    if (std::isfinite(f_hi) && f_hi > spec.num.tol_root)
        spec.warnings.push_back({ViolationKind::NotPositivelyInvariant, "f",
                                 "f points outward at the right domain boundary", false});
    // f vanishing at a boundary without a detected root nearby: the
    // behavior outside the domain is unknowable from the config.
    auto near_root = [&](double x) {
        for (const auto& e : spec.equilibria) {
            if (e.is_plateau() && x >= e.plateau->first - h && x <= e.plateau->second + h)
                return true;
            if (!e.is_plateau() && std::abs(e.location - x) <= h) return true;
        }
        return false;
    };
    if (std::isfinite(f_lo) && std::abs(f_lo) <= spec.num.tol_root && !near_root(lo))
        spec.warnings.push_back({ViolationKind::NotPositivelyInvariant, "f",
                                 "f vanishes at the left boundary without a declared root", false});
    if (std::isfinite(f_hi) && std::abs(f_hi) <= spec.num.tol_root && !near_root(hi))
        spec.warnings.push_back({ViolationKind::NotPositivelyInvariant, "f",
                                 "f vanishes at the right boundary without a declared root", false});

    out.spec = std::move(spec);
    return out;
}

inline ValidationResult validate_text(const std::string& text) {
    return validate(parse_config_text(text));
}

} // namespace advsel

#endif
