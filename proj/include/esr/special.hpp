#pragma once

// Scalar special functions used by the distribution catalog.

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>

namespace esr::special {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;

inline double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

inline double normal_sf(double x) { return 0.5 * std::erfc(x * std::numbers::sqrt2 / 2.0); }

namespace detail {

// Wichura, AS 241 (PPND16). Relative accuracy about 1e-16 over (0, 1).
inline double ppnd16(double p) {
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                 45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
              133.14166789178437745) * r + 3.387132872796366608);
        const double den =
            (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                 21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
              42.313330701600911252) * r + 1.0);
        return q * num / den;
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
                 1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
              4.6303378461565452959) * r + 1.42343711074968357734);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
                 0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
              2.05319162663775882187) * r + 1.0);
        val = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
                 0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
              5.4637849111641143699) * r + 6.6579046435011037772);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
                 7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
              0.59983220655588793769) * r + 1.0);
        val = num / den;
    }
    return q < 0.0 ? -val : val;
}

} // namespace detail

/// Standard normal lower-tail quantile: returns x with P(Z <= x) = p.
/// AS 241 start followed by one Newton step on the tail-appropriate CDF.
inline double normal_quantile(double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    double x = detail::ppnd16(p);
    const double dens = normal_pdf(x);
    if (dens > 0.0) {
        if (p <= 0.5)
            x -= (normal_cdf(x) - p) / dens;
        else
            x += (normal_sf(x) - (1.0 - p)) / dens;
    }
    return x;
}

/// x with P(Z > x) = v, accurate for tiny v.
inline double normal_upper_quantile(double v) { return -normal_quantile(v); }

// Student-t with nu degrees of freedom, location 0, scale 1.

inline double student_t_pdf(double t, double nu) {
    const double log_c = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) - 0.5 * std::log(nu * std::numbers::pi);
    return std::exp(log_c - 0.5 * (nu + 1.0) * std::log1p(t * t / nu));
}

/// P(T > t).
inline double student_t_sf(double t, double nu) {
    const double x = nu / (nu + t * t);
    const double tail = 0.5 * boost::math::ibeta(0.5 * nu, 0.5, x);
    return t >= 0.0 ? tail : 1.0 - tail;
}

inline double student_t_cdf(double t, double nu) { return student_t_sf(-t, nu); }

/// t >= 0 with P(T > t) = v for v in (0, 1/2]: bracketing bisection with
/// Newton polish, absolute tolerance 1e-12 (relative for |t| > 1).
inline double student_t_upper_tail_root(double v, double nu) {
    double lo = 0.0;
    double hi = 1.0;
    while (student_t_sf(hi, nu) > v) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) return hi;
    }
    // Normal approximation as a starting point, clamped into the bracket.
    double t = normal_upper_quantile(v);
    if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double g = student_t_sf(t, nu) - v; // decreasing in t
        if (g > 0.0)
            lo = t;
        else
            hi = t;
        const double dens = student_t_pdf(t, nu);
        double next = dens > 0.0 ? t + g / dens : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::fabs(next - t);
        t = next;
        if (step <= 1e-12 * std::fmax(1.0, std::fabs(t)) || hi - lo <= 1e-12 * std::fmax(1.0, hi)) break;
    }
    return t;
}

/// Lower-tail quantile of Student-t.
inline double student_t_quantile(double p, double nu) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    if (p == 0.5) return 0.0;
    return p < 0.5 ? -student_t_upper_tail_root(p, nu) : student_t_upper_tail_root(1.0 - p, nu);
}

} // namespace esr::special
