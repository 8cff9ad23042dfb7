#pragma once

// Monte Carlo engine: independent trials of (draw -> corrupt -> estimate),
// deviation probabilities, histograms, and a batch-means oracle for the
// long-run variance of the plug-in estimator.
//
// Trial t at sample size N draws its data from stream
//   data_seed = rng::split(master_seed, N, t)
// and its corruption noise from
//   rng::split(data_seed, kCorruptionTag, 0).
// Results therefore do not depend on how trials are scheduled over workers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "esr/corrupt.hpp"
#include "esr/dist.hpp"
#include "esr/error.hpp"
#include "esr/estim.hpp"
#include "esr/functionals.hpp"
#include "esr/rng.hpp"

namespace esr::mc {

inline constexpr std::uint64_t kCorruptionTag = 0x636f7272757074ULL;

struct ExperimentSpec {
    dist::ProcessSpec process = dist::IID{dist::Pareto{1.0, 2.2}};
    estim::EstimatorConfig estimator = estim::PlugIn{};
    double alpha = 0.1;
    std::vector<std::size_t> sample_sizes;
    double delta = 1.0;
    std::size_t trials = 1000;
    std::uint64_t master_seed = 0;
    corrupt::CorruptionModel corruption = corrupt::None{};
    double truth = 0.0;
};

inline void validate(const ExperimentSpec& spec) {
    dist::validate(spec.process);
    estim::validate(spec.estimator);
    corrupt::validate(spec.corruption);
    (void)RiskLevel(spec.alpha);
    if (spec.trials < 1) throw InvalidParameter("trials", "must be >= 1");
    if (spec.sample_sizes.empty()) throw InvalidParameter("sample_sizes", "must not be empty");
    for (std::size_t i = 0; i < spec.sample_sizes.size(); ++i) {
        if (spec.sample_sizes[i] < 1) throw InvalidParameter("sample_sizes", "entries must be >= 1");
        if (i > 0 && spec.sample_sizes[i] <= spec.sample_sizes[i - 1])
            throw InvalidParameter("sample_sizes", "must be strictly increasing");
    }
    if (!(spec.delta > 0.0) || !std::isfinite(spec.delta)) throw InvalidParameter("delta", "must be a finite positive number");
    if (!std::isfinite(spec.truth)) throw InvalidParameter("truth", "must be finite");
}

/// 0 means: $ESR_WORKERS if set, else the hardware concurrency.
inline unsigned resolve_workers(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ESR_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

inline std::uint64_t trial_seed(std::uint64_t master, std::size_t n, std::size_t trial) {
    return rng::split(master, n, trial);
}

/// Runs `body(trial_index, worker_index)` for every trial on a shared work
/// queue. The first failure (lowest trial index) is rethrown after all
/// workers stop.
template <class Body>
void parallel_trials(std::size_t trials, unsigned workers, Body&& body) {
    workers = static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(trials, 1)));
    constexpr std::size_t kChunk = 64;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex err_mu;
    std::size_t err_trial = std::numeric_limits<std::size_t>::max();
    std::string err_msg;

    auto run = [&](unsigned w) {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t start = next.fetch_add(kChunk);
            if (start >= trials) break;
            const std::size_t stop = std::min(trials, start + kChunk);
            for (std::size_t t = start; t < stop; ++t) {
                try {
                    body(t, w);
                } catch (const std::exception& e) {
                    std::lock_guard lock(err_mu);
                    if (t < err_trial) err_trial = t, err_msg = e.what();
                    failed.store(true);
                    return;
                }
            }
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& th : pool) th.join();
    }
    if (failed) throw PreconditionError("trial " + std::to_string(err_trial) + ": " + err_msg);
}

/// Per-trial estimates for several estimators evaluated on the same data.
/// result[e][t] is estimator e on trial t.
inline std::vector<std::vector<estim::Estimate>> run_trials_detail(const ExperimentSpec& spec,
                                                                   std::span<const estim::EstimatorConfig> estimators,
                                                                   std::size_t n, unsigned workers = 0) {
    validate(spec);
    const RiskLevel level(spec.alpha);
    for (const auto& e : estimators) {
        estim::validate(e);
        if (n < estim::min_sample_size(e))
            throw PreconditionError("N=" + std::to_string(n) + " is too small for the " + estim::kind_name(e) +
                                    " estimator (needs N >= " + std::to_string(estim::min_sample_size(e)) + ")");
    }
    if (corrupt::budget_of(spec.corruption) > n) throw InvalidParameter("k", "exceeds the sample size");

    std::vector<std::vector<estim::Estimate>> out(estimators.size(), std::vector<estim::Estimate>(spec.trials));
    const unsigned w = static_cast<unsigned>(std::min<std::size_t>(resolve_workers(workers), spec.trials));
    std::vector<std::vector<double>> data(w, std::vector<double>(n));
    std::vector<estim::Workspace> ws(w);
    parallel_trials(spec.trials, w, [&](std::size_t t, unsigned wi) {
        const std::uint64_t seed = trial_seed(spec.master_seed, n, t);
        auto& x = data[wi];
        dist::draw_into(spec.process, x, seed);
        corrupt::apply_inplace(x, spec.corruption, rng::split(seed, kCorruptionTag, 0));
        for (std::size_t e = 0; e < estimators.size(); ++e) out[e][t] = estim::estimate(estimators[e], x, level, ws[wi]);
    });
    return out;
}

inline std::vector<double> run_trials(const ExperimentSpec& spec, std::size_t n, unsigned workers = 0) {
    const auto detail = run_trials_detail(spec, std::span(&spec.estimator, 1), n, workers);
    std::vector<double> out(spec.trials);
    for (std::size_t t = 0; t < spec.trials; ++t) out[t] = detail[0][t].value;
    return out;
}

struct Deviation {
    double p_hat = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

/// Fraction of estimates with |estimate - truth| >= delta (inclusive).
inline Deviation deviation_probability(std::span<const double> estimates, double truth, double delta) {
    if (estimates.empty()) throw PreconditionError("no estimates");
    std::size_t count = 0;
    for (double e : estimates)
        if (e >= truth + delta || e <= truth - delta) ++count;
    const double n = static_cast<double>(estimates.size());
    const double p = static_cast<double>(count) / n;
    return {p, std::sqrt(p * (1.0 - p) / n), count};
}

struct CurvePoint {
    std::size_t n = 0;
    double p_hat = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;
};

using DeviationCurve = std::vector<CurvePoint>;

inline DeviationCurve deviation_curve(const ExperimentSpec& spec, unsigned workers = 0) {
    validate(spec);
    DeviationCurve curve;
    for (std::size_t n : spec.sample_sizes) {
        const auto est = run_trials(spec, n, workers);
        const auto d = deviation_probability(est, spec.truth, spec.delta);
        curve.push_back({n, d.p_hat, d.std_error, d.count});
    }
    return curve;
}

/// Curves for several estimators and thresholds sharing the same trials.
/// result[e][k] is estimator e at threshold deltas[k].
inline std::vector<std::vector<DeviationCurve>> deviation_curves(const ExperimentSpec& spec,
                                                                 std::span<const estim::EstimatorConfig> estimators,
                                                                 std::span<const double> deltas,
                                                                 unsigned workers = 0) {
    validate(spec);
    std::vector<std::vector<DeviationCurve>> out(estimators.size(), std::vector<DeviationCurve>(deltas.size()));
    std::vector<double> values(spec.trials);
    for (std::size_t n : spec.sample_sizes) {
        const auto det = run_trials_detail(spec, estimators, n, workers);
        for (std::size_t e = 0; e < estimators.size(); ++e) {
            for (std::size_t t = 0; t < spec.trials; ++t) values[t] = det[e][t].value;
            for (std::size_t k = 0; k < deltas.size(); ++k) {
                const auto d = deviation_probability(values, spec.truth, deltas[k]);
                out[e][k].push_back({n, d.p_hat, d.std_error, d.count});
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Histograms

struct HistogramResult {
    std::vector<double> bin_edges;
    std::vector<std::size_t> counts;
    double min = 0.0;
    double max = 0.0;
    std::size_t trials = 0;
};

/// Equal-width bins over [lo, hi]. A value on an interior edge belongs to
/// the lower bin; values outside the range are counted in the end bins.
inline HistogramResult histogram_range(std::span<const double> estimates, std::size_t bins, double lo, double hi) {
    if (bins < 1) throw InvalidParameter("bins", "must be >= 1");
    if (!(lo < hi)) throw InvalidParameter("range", "lower edge must be below upper edge");
    HistogramResult h;
    h.trials = estimates.size();
    h.counts.assign(bins, 0);
    h.bin_edges.resize(bins + 1);
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i) h.bin_edges[i] = lo + width * static_cast<double>(i);
    h.bin_edges[bins] = hi;
    h.min = std::numeric_limits<double>::infinity();
    h.max = -std::numeric_limits<double>::infinity();
    for (double v : estimates) {
        h.min = std::min(h.min, v);
        h.max = std::max(h.max, v);
        const double pos = std::ceil((v - lo) / width) - 1.0;
        const auto idx = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
        ++h.counts[idx];
    }
    return h;
}

/// Equal-width bins over [min, max] of the data (a unit-wide range around a
/// constant sample).
inline HistogramResult histogram(std::span<const double> estimates, std::size_t bins) {
    if (bins < 1) throw InvalidParameter("bins", "must be >= 1");
    if (estimates.empty()) throw PreconditionError("no estimates");
    const auto [mn, mx] = std::minmax_element(estimates.begin(), estimates.end());
    double lo = *mn, hi = *mx;
    if (!(lo < hi)) lo -= 0.5, hi += 0.5;
    return histogram_range(estimates, bins, lo, hi);
}

/// Half the L1 distance between the normalized bin masses of two histograms
/// built on the same edges.
inline double total_variation(const HistogramResult& a, const HistogramResult& b) {
    if (a.counts.size() != b.counts.size()) throw InvalidParameter("bins", "histograms differ in bin count");
    double tv = 0.0;
    for (std::size_t i = 0; i < a.counts.size(); ++i)
        tv += std::fabs(static_cast<double>(a.counts[i]) / static_cast<double>(a.trials) -
                        static_cast<double>(b.counts[i]) / static_cast<double>(b.trials));
    return 0.5 * tv;
}

// ---------------------------------------------------------------------------
// Long-run variance

struct LongRunResult {
    double value = 0.0;
    double std_error = 0.0;
    std::vector<double> block_estimates;
};

/// Batch means: plug-in ES on `blocks` consecutive disjoint stretches of one
/// path, returning block_size times the sample variance of those estimates.
/// For i.i.d. data this converges to sigma^2_ES; for dependent data it picks
/// up the autocovariance terms as well.
inline LongRunResult longrun_sigma_oracle(const dist::ProcessSpec& process, RiskLevel level, std::size_t block_size,
                                          std::size_t blocks, std::uint64_t seed) {
    dist::validate(process);
    if (blocks < 100) throw InvalidParameter("blocks", "need at least 100 batches");
    if (block_size < 100 || static_cast<double>(block_size) * level.value() < 1.0)
        throw InvalidParameter("block_size", "need at least 100 observations and one tail point per batch");

    LongRunResult res;
    res.block_estimates.resize(blocks);
    std::vector<double> buf(block_size);
    double ar_state = 0.0;
    for (std::size_t j = 0; j < blocks; ++j) {
        const std::uint64_t offset = static_cast<std::uint64_t>(j) * block_size;
        if (const auto* iid = std::get_if<dist::IID>(&process)) {
            std::visit(
                [&](const auto& d) {
                    for (std::size_t i = 0; i < block_size; ++i) buf[i] = d.upper_quantile(1.0 - rng::uniform(seed, offset + i));
                },
                iid->dist);
        } else {
            const double rho = std::get<dist::AR1>(process).rho;
            const double scale = std::sqrt(1.0 - rho * rho);
            for (std::size_t i = 0; i < block_size; ++i) {
                const double z = special::normal_quantile(rng::uniform(seed, offset + i));
                ar_state = (j == 0 && i == 0) ? z : rho * ar_state + scale * z;
                buf[i] = ar_state;
            }
        }
        res.block_estimates[j] = estim::detail::plugin_inplace(buf, level.value());
    }
    const double b = static_cast<double>(blocks);
    double mean = 0.0;
    for (double v : res.block_estimates) mean += v;
    mean /= b;
    double m2 = 0.0, m4 = 0.0;
    for (double v : res.block_estimates) {
        const double d2 = (v - mean) * (v - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    const double var = m2 / (b - 1.0);
    m4 /= b;
    const double var_of_var = std::max(0.0, (m4 - var * var * (b - 3.0) / (b - 1.0)) / b);
    const double scale = static_cast<double>(block_size);
    res.value = scale * var;
    res.std_error = scale * std::sqrt(var_of_var);
    return res;
}

/// Lower bound on P(plug-in - ES >= delta) for Pareto(x0, lambda) data:
///   (1/2) (x0 / (alpha (ES + delta)))^lambda N^{-(lambda - 1)}.
inline double pareto_plugin_deviation_lower_bound(double x0, double lambda, double alpha, double delta, std::size_t n) {
    const double es = functionals::es_exact(dist::Pareto{x0, lambda}, RiskLevel(alpha));
    return 0.5 * std::pow(x0 / (alpha * (es + delta)), lambda) * std::pow(static_cast<double>(n), -(lambda - 1.0));
}

} // namespace esr::mc
