#pragma once

// Expected-shortfall estimators on a sample X_1..X_N.
//
// plug-in      T_N   = (1/a) int_{1-a}^1 X_(ceil(uN)) du, evaluated exactly as a
//                      weighted sum of the top order statistics
// blocks       plug-in on disjoint blocks of m consecutive observations; with
//                      gap g only the trailing m of every (g + m)-stride is kept
// truncated    T_N clamped to [Q(beta1), Q(beta2)], Q the linearly interpolated
//                      quantile function of the block estimates
// median       Q(1/2) of the block estimates
// trimmed      plug-in after dropping the floor(c N^e) largest observations

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "esr/error.hpp"
#include "esr/functionals.hpp"

namespace esr::estim {

struct PlugIn {};

struct Truncated {
    std::size_t m = 250;
    double beta1 = 0.5;
    double beta2 = 0.6;
    std::size_t gap = 0;
};

struct MedianOfBlocks {
    std::size_t m = 250;
    std::size_t gap = 0;
};

struct Trimmed {
    double c = 0.25;
    double exponent = 1.0 / 3.0;
};

using EstimatorConfig = std::variant<PlugIn, Truncated, MedianOfBlocks, Trimmed>;

inline std::string kind_name(const EstimatorConfig& cfg) {
    struct V {
        std::string operator()(const PlugIn&) const { return "plugin"; }
        std::string operator()(const Truncated&) const { return "truncated"; }
        std::string operator()(const MedianOfBlocks&) const { return "median_of_blocks"; }
        std::string operator()(const Trimmed&) const { return "trimmed"; }
    };
    return std::visit(V{}, cfg);
}

namespace detail {

inline void check_betas(double beta1, double beta2) {
    if (!(beta1 >= 0.0 && beta1 <= 1.0)) throw InvalidParameter("beta1", "must lie in [0, 1]");
    if (!(beta2 >= 0.0 && beta2 <= 1.0)) throw InvalidParameter("beta2", "must lie in [0, 1]");
    if (!(beta1 <= beta2)) throw InvalidParameter("beta1", "must not exceed beta2");
}

inline void check_sample(std::span<const double> x) {
    if (x.empty()) throw PreconditionError("empty sample");
    for (double v : x)
        if (!std::isfinite(v)) throw InvalidParameter("sample", "contains a non-finite value");
}

/// Plug-in ES of `x`; reorders `x`.
inline double plugin_inplace(std::span<double> x, double alpha) {
    const std::size_t n = x.size();
    const double nd = static_cast<double>(n);
    std::size_t k = static_cast<std::size_t>(std::floor((1.0 - alpha) * nd));
    k = std::min(k, n - 1);
    std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k), x.end());
    // Only X_(k+1) needs its exact rank; the rest of the tail carries equal
    // weight 1/N, so its order is irrelevant.
    // The weights w_(k+1) = (k+1)/N - (1-a) and 1/N sum to a, so the estimate
    // is X_(k+1) plus the excess of the remaining tail; exact on constant data.
    const double first = x[k];
    double excess = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) excess += x[i] - first;
    return first + excess / (nd * alpha);
}

/// Interpolated quantile of already sorted values.
inline double interp_sorted(std::span<const double> sorted, double beta) {
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double h = beta * static_cast<double>(n - 1);
    const std::size_t j = std::min(static_cast<std::size_t>(std::floor(h)), n - 1);
    if (j + 1 >= n) return sorted[n - 1];
    const double frac = h - static_cast<double>(j);
    return sorted[j] + frac * (sorted[j + 1] - sorted[j]);
}

inline std::size_t block_count(std::size_t n, std::size_t m, std::size_t gap) {
    if (m == 0 || n < gap + m) return 0;
    return (n - gap - m) / (m + gap) + 1;
}

} // namespace detail

/// Reusable buffers for repeated estimation (one per worker thread).
struct Workspace {
    std::vector<double> scratch;
    std::vector<double> blocks;
};

inline double plugin_es(std::span<const double> sample, RiskLevel level) {
    detail::check_sample(sample);
    std::vector<double> scratch(sample.begin(), sample.end());
    return detail::plugin_inplace(scratch, level.value());
}

/// Linear interpolation between the order statistics placed at (j-1)/(n-1);
/// a single value is returned as is.
inline double interp_quantile(std::span<const double> values, double beta) {
    if (values.empty()) throw PreconditionError("interp_quantile needs at least one value");
    if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidParameter("beta", "must lie in [0, 1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return detail::interp_sorted(sorted, beta);
}

namespace detail {

inline void blocks_into(std::span<const double> sample, double alpha, std::size_t m, std::size_t gap,
                        Workspace& ws) {
    if (m < 1) throw InvalidParameter("m", "must be >= 1");
    const std::size_t count = block_count(sample.size(), m, gap);
    if (count == 0) throw PreconditionError("no complete block: need m + gap <= N");
    ws.blocks.resize(count);
    ws.scratch.resize(m);
    for (std::size_t j = 0; j < count; ++j) {
        const std::size_t start = j * (m + gap) + gap;
        std::copy_n(sample.begin() + static_cast<std::ptrdiff_t>(start), m, ws.scratch.begin());
        ws.blocks[j] = plugin_inplace(ws.scratch, alpha);
    }
}

} // namespace detail

inline std::vector<double> block_estimates(std::span<const double> sample, RiskLevel level, std::size_t m,
                                           std::size_t gap = 0) {
    detail::check_sample(sample);
    Workspace ws;
    detail::blocks_into(sample, level.value(), m, gap, ws);
    return ws.blocks;
}

struct TruncatedResult {
    double estimate = 0.0;
    double plugin = 0.0;
    double lower = 0.0; // Q(beta1)
    double upper = 0.0; // Q(beta2)
    std::size_t blocks = 0;
};

namespace detail {

inline TruncatedResult truncated_ws(std::span<const double> sample, double alpha, const Truncated& cfg,
                                    Workspace& ws) {
    check_betas(cfg.beta1, cfg.beta2);
    if (cfg.m < 1) throw InvalidParameter("m", "must be >= 1");
    const std::size_t count = block_count(sample.size(), cfg.m, cfg.gap);
    if (count < 2) {
        const std::size_t max_m = sample.size() / 2 > cfg.gap ? sample.size() / 2 - cfg.gap : 0;
        throw PreconditionError("need >= 2 complete blocks; reduce m (with gap " + std::to_string(cfg.gap) +
                                " and N=" + std::to_string(sample.size()) + ", m <= " + std::to_string(max_m) + ")");
    }
    blocks_into(sample, alpha, cfg.m, cfg.gap, ws);
    std::sort(ws.blocks.begin(), ws.blocks.end());
    TruncatedResult r;
    r.blocks = count;
    r.lower = interp_sorted(ws.blocks, cfg.beta1);
    r.upper = interp_sorted(ws.blocks, cfg.beta2);
    ws.scratch.assign(sample.begin(), sample.end());
    r.plugin = plugin_inplace(ws.scratch, alpha);
    r.estimate = std::min(std::max(r.plugin, r.lower), r.upper);
    return r;
}

} // namespace detail

/// Plug-in estimate together with the clamp interval it was truncated to.
inline TruncatedResult truncated_es_detail(std::span<const double> sample, RiskLevel level, const Truncated& cfg) {
    detail::check_sample(sample);
    Workspace ws;
    return detail::truncated_ws(sample, level.value(), cfg, ws);
}

inline double truncated_es(std::span<const double> sample, RiskLevel level, std::size_t m, double beta1, double beta2,
                           std::size_t gap = 0) {
    return truncated_es_detail(sample, level, Truncated{m, beta1, beta2, gap}).estimate;
}

/// Interpolated median of the block estimates. With a single complete block
/// this is that block's plug-in estimate.
inline double median_of_blocks(std::span<const double> sample, RiskLevel level, std::size_t m, std::size_t gap = 0) {
    auto blocks = block_estimates(sample, level, m, gap);
    std::sort(blocks.begin(), blocks.end());
    return detail::interp_sorted(blocks, 0.5);
}

inline std::size_t trim_count(std::size_t n, double c, double exponent) {
    // The relative nudge keeps exact integers such as 0.25 * 64^(1/3) = 1 from
    // flooring to 0 through pow() rounding.
    return static_cast<std::size_t>(std::floor(c * std::pow(static_cast<double>(n), exponent) * (1.0 + 1e-12)));
}

namespace detail {

inline double trimmed_inplace(std::span<double> x, double alpha, double c, double exponent) {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidParameter("trim_c", "must be a finite positive number");
    if (!std::isfinite(exponent)) throw InvalidParameter("trim_exp", "must be finite");
    const std::size_t k = trim_count(x.size(), c, exponent);
    if (k >= x.size()) throw PreconditionError("trimming removes every observation (k >= N)");
    const std::size_t keep = x.size() - k;
    if (k > 0) std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(keep), x.end());
    return plugin_inplace(x.first(keep), alpha);
}

} // namespace detail

inline double trimmed_es(std::span<const double> sample, RiskLevel level, double c = 0.25,
                         double exponent = 1.0 / 3.0) {
    detail::check_sample(sample);
    std::vector<double> scratch(sample.begin(), sample.end());
    return detail::trimmed_inplace(scratch, level.value(), c, exponent);
}

/// ceil(11 / eps^2).
inline std::size_t suggested_block_size(double eps) {
    if (!(eps > 0.0) || !(eps <= 1.0)) throw InvalidParameter("eps", "must lie in (0, 1]");
    return static_cast<std::size_t>(std::ceil(11.0 / (eps * eps) * (1.0 - 1e-12)));
}

inline void validate(const EstimatorConfig& cfg) {
    struct V {
        void operator()(const PlugIn&) const {}
        void operator()(const Truncated& t) const {
            if (t.m < 1) throw InvalidParameter("m", "must be >= 1");
            detail::check_betas(t.beta1, t.beta2);
        }
        void operator()(const MedianOfBlocks& b) const {
            if (b.m < 1) throw InvalidParameter("m", "must be >= 1");
        }
        void operator()(const Trimmed& t) const {
            if (!(t.c > 0.0) || !std::isfinite(t.c)) throw InvalidParameter("trim_c", "must be a finite positive number");
            if (!std::isfinite(t.exponent)) throw InvalidParameter("trim_exp", "must be finite");
        }
    };
    std::visit(V{}, cfg);
}

/// Non-fatal remarks about a configuration.
inline std::vector<std::string> config_warnings(const EstimatorConfig& cfg) {
    std::vector<std::string> out;
    if (const auto* t = std::get_if<Truncated>(&cfg)) {
        if (t->beta1 < 0.35 || t->beta2 > 0.65)
            out.push_back("beta1/beta2 outside [0.35, 0.65]; the finite-sample guarantee does not cover this choice");
    }
    return out;
}

/// Minimum sample size for which the configuration is defined.
inline std::size_t min_sample_size(const EstimatorConfig& cfg) {
    if (const auto* t = std::get_if<Truncated>(&cfg)) return 2 * (t->m + t->gap);
    if (const auto* b = std::get_if<MedianOfBlocks>(&cfg)) return b->m + b->gap;
    return 1;
}

struct Estimate {
    double value = 0.0;
    bool has_interval = false;
    double lower = 0.0;
    double upper = 0.0;
};

/// Applies any estimator; `ws` is reused across calls to avoid allocation.
inline Estimate estimate(const EstimatorConfig& cfg, std::span<const double> sample, RiskLevel level, Workspace& ws) {
    detail::check_sample(sample);
    const double a = level.value();
    struct V {
        std::span<const double> x;
        double a;
        Workspace& ws;
        Estimate operator()(const PlugIn&) const {
            ws.scratch.assign(x.begin(), x.end());
            return {detail::plugin_inplace(ws.scratch, a)};
        }
        Estimate operator()(const Truncated& t) const {
            const auto r = detail::truncated_ws(x, a, t, ws);
            return {r.estimate, true, r.lower, r.upper};
        }
        Estimate operator()(const MedianOfBlocks& b) const {
            detail::blocks_into(x, a, b.m, b.gap, ws);
            std::sort(ws.blocks.begin(), ws.blocks.end());
            return {detail::interp_sorted(ws.blocks, 0.5)};
        }
        Estimate operator()(const Trimmed& t) const {
            ws.scratch.assign(x.begin(), x.end());
            return {detail::trimmed_inplace(ws.scratch, a, t.c, t.exponent)};
        }
    };
    return std::visit(V{sample, a, ws}, cfg);
}

inline double estimate(const EstimatorConfig& cfg, std::span<const double> sample, RiskLevel level) {
    Workspace ws;
    return estimate(cfg, sample, level, ws).value;
}

} // namespace esr::estim
