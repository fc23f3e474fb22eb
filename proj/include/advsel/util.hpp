#ifndef ADVSEL_UTIL_HPP
#define ADVSEL_UTIL_HPP

#include <cmath>
#include <limits>
#include <vector>

namespace advsel {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// log(sum exp(a_i)) with max shift; empty input -> -inf.
inline double log_sum_exp(const std::vector<double>& a) {
    double m = neg_inf;
    for (double v : a) m = std::max(m, v);
    if (m == neg_inf) return neg_inf;
    double s = 0;
    for (double v : a) s += std::exp(v - m);
    return m + std::log(s);
}

// Signed variant: terms sign_i * exp(a_i). Returns (log|sum|, sign).
struct SignedLog {
    double log_abs = neg_inf;
    int sign = 0;
};

inline SignedLog signed_log_sum_exp(const std::vector<double>& a,
                                    const std::vector<int>& sign) {
    double m = neg_inf;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (sign[i] != 0) m = std::max(m, a[i]);
    if (m == neg_inf) return {};
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (sign[i] != 0) s += sign[i] * std::exp(a[i] - m);
    SignedLog out;
    if (s == 0) return out;
    out.sign = s > 0 ? 1 : -1;
    out.log_abs = m + std::log(std::abs(s));
    return out;
}

struct LinFit {
    double slope = 0, intercept = 0, r2 = 0;
    std::size_t n = 0;
};

inline LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    LinFit f;
    f.n = x.size();
    if (f.n < 2) return f;
    double n = static_cast<double>(f.n);
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < f.n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    double den = n * sxx - sx * sx;
    if (den == 0) return f;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    double sst = syy - sy * sy / n;
    double ssr = 0;
    for (std::size_t i = 0; i < f.n; ++i) {
        double e = y[i] - (f.slope * x[i] + f.intercept);
        ssr += e * e;
    }
    f.r2 = (sst > 0) ? 1.0 - ssr / sst : 1.0;
    return f;
}

// Gauss-Legendre nodes/weights on [-1, 1], small fixed orders.
inline const std::vector<std::pair<double, double>>& gauss_legendre_16() {
    static const std::vector<std::pair<double, double>> gl = {
        {-0.9894009349916499, 0.0271524594117541}, {-0.9445750230732326, 0.0622535239386479},
        {-0.8656312023878318, 0.0951585116824928}, {-0.7554044083550030, 0.1246289712555339},
        {-0.6178762444026438, 0.1495959888165767}, {-0.4580167776572274, 0.1691565193950025},
        {-0.2816035507792589, 0.1826034150449236}, {-0.0950125098376374, 0.1894506104550685},
        {0.0950125098376374, 0.1894506104550685},  {0.2816035507792589, 0.1826034150449236},
        {0.4580167776572274, 0.1691565193950025},  {0.6178762444026438, 0.1495959888165767},
        {0.7554044083550030, 0.1246289712555339},  {0.8656312023878318, 0.0951585116824928},
        {0.9445750230732326, 0.0622535239386479},  {0.9894009349916499, 0.0271524594117541},
    };
    return gl;
}

} // namespace advsel

#endif
