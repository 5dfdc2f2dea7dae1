// Chi-squared upper quantile: Wilson-Hilferty starting point refined by a
// bracketed Newton iteration on the regularized upper incomplete gamma Q.

#include <algorithm>
#include <cmath>
#include <limits>

#include "delayrc/errors.hpp"
#include "delayrc/readout.hpp"

namespace delayrc {

namespace {

// Acklam's rational approximation of the standard normal quantile.
double normal_quantile(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double low = 0.02425;
    if (p < low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - low) return -normal_quantile(1.0 - p);
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Regularized lower incomplete gamma by its power series (x < a + 1).
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma by modified Lentz continued fraction (x >= a + 1).
double gamma_q_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double gamma_q(double a, double x) {
    if (x <= 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_fraction(a, x);
}

double chi2_pdf(double k, double x) {
    if (x <= 0.0) return 0.0;
    const double h = 0.5 * k;
    return std::exp((h - 1.0) * std::log(x) - 0.5 * x - h * std::log(2.0) - std::lgamma(h));
}

}  // namespace

double chi2_upper_tail(int n_v, double x) { return gamma_q(0.5 * n_v, 0.5 * x); }

double chi2_threshold(int n_v, double p_value) {
    if (n_v < 1) throw ConfigError("chi2_threshold: degrees of freedom must be positive");
    if (!(p_value > 0.0 && p_value < 1.0)) throw ConfigError("chi2_threshold: p must lie in (0, 1)");
    const double k = n_v;

    const double z = normal_quantile(1.0 - p_value);
    const double wh = 2.0 / (9.0 * k);
    double x = k * std::pow(1.0 - wh + z * std::sqrt(wh), 3.0);
    if (!(x > 0.0)) x = 0.5 * k;

    // Bracket the root of Q(x) - p, Q decreasing in x.
    double lo = 0.0;
    double hi = std::max(x, k);
    while (chi2_upper_tail(n_v, hi) > p_value) hi *= 2.0;

    for (int it = 0; it < 200; ++it) {
        const double q = chi2_upper_tail(n_v, x);
        const double f = q - p_value;
        if (f > 0.0) lo = x; else hi = x;
        const double slope = -chi2_pdf(k, x);
        double next = slope != 0.0 ? x - f / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-13 * std::max(1.0, x)) return next;
        x = next;
    }
    return x;
}

}  // namespace delayrc
