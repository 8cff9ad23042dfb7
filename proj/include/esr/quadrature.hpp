#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
// The interval with the largest |K15 - G7| estimate is bisected until the
// summed estimate meets the tolerance. Endpoints are never evaluated, which
// lets callers integrate integrable endpoint singularities after a change of
// variables.

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace esr::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
    bool converged = false;
};

struct Options {
    double abs_tol = 1e-12;
    double rel_tol = 0.0;
    int max_intervals = 4000;
};

namespace detail {

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1) gauss += kWg[j / 2] * sum;
    }
    kronrod *= half;
    gauss *= half;
    double err = std::fabs(kronrod - gauss);
    if (!std::isfinite(kronrod)) err = std::numeric_limits<double>::infinity();
    return {a, b, kronrod, err};
}

} // namespace detail

template <class F>
Result integrate(F&& f, double a, double b, const Options& opts = {}) {
    if (a == b) return {0.0, 0.0, 0, true};
    std::priority_queue<detail::Segment> heap;
    std::vector<detail::Segment> frozen; // too narrow to split further
    heap.push(detail::gk15(f, a, b));
    double total = heap.top().value;
    double total_err = heap.top().error;
    int intervals = 1;
    auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::fabs(total)); };
    while (total_err > target() && intervals < opts.max_intervals && !heap.empty()) {
        const detail::Segment s = heap.top();
        heap.pop();
        const double mid = 0.5 * (s.a + s.b);
        if (!(mid > s.a && mid < s.b) || (s.b - s.a) <= 1e-15 * std::max(std::fabs(s.a), std::fabs(s.b))) {
            frozen.push_back(s);
            continue;
        }
        const detail::Segment left = detail::gk15(f, s.a, mid);
        const detail::Segment right = detail::gk15(f, mid, s.b);
        total += left.value + right.value - s.value;
        total_err += left.error + right.error - s.error;
        heap.push(left);
        heap.push(right);
        ++intervals;
    }
    // Re-sum to shed accumulated cancellation in the running totals.
    double value = 0.0, error = 0.0;
    for (const auto& s : frozen) value += s.value, error += s.error;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    const bool ok = std::isfinite(value) && error <= std::max(opts.abs_tol, opts.rel_tol * std::fabs(value));
    return {value, error, intervals, ok};
}

} // namespace esr::quad
