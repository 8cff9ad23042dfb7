#pragma once

// Contamination models applied to a sample before estimation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <variant>
#include <vector>

#include "esr/error.hpp"
#include "esr/rng.hpp"
#include "esr/special.hpp"

namespace esr::corrupt {

struct None {};

/// X_i <- max{X_i, U_i}, U_i ~ N(mu, sigma^2) independent, for i = 1..k.
struct MaxShiftGaussian {
    std::size_t k = 3;
    double mu = 5.0;
    double sigma = 250.0;
};

/// Overwrites the k largest observations (ties broken by position).
struct ReplaceLargest {
    std::size_t k = 1;
    double value = 0.0;
};

/// Overwrites the listed 1-based positions.
struct ReplaceIndices {
    std::vector<std::size_t> indices;
    double value = 0.0;
};

using CorruptionModel = std::variant<None, MaxShiftGaussian, ReplaceLargest, ReplaceIndices>;

inline std::size_t budget_of(const CorruptionModel& model) {
    struct V {
        std::size_t operator()(const None&) const { return 0; }
        std::size_t operator()(const MaxShiftGaussian& m) const { return m.k; }
        std::size_t operator()(const ReplaceLargest& m) const { return m.k; }
        std::size_t operator()(const ReplaceIndices& m) const { return m.indices.size(); }
    };
    return std::visit(V{}, model);
}

inline void validate(const CorruptionModel& model) {
    if (const auto* g = std::get_if<MaxShiftGaussian>(&model)) {
        if (!std::isfinite(g->mu)) throw InvalidParameter("mu", "must be finite");
        if (!(g->sigma > 0.0) || !std::isfinite(g->sigma)) throw InvalidParameter("sigma", "must be a finite positive number");
    } else if (const auto* r = std::get_if<ReplaceLargest>(&model)) {
        if (!std::isfinite(r->value)) throw InvalidParameter("value", "must be finite");
    } else if (const auto* ri = std::get_if<ReplaceIndices>(&model)) {
        if (!std::isfinite(ri->value)) throw InvalidParameter("value", "must be finite");
    }
}

/// Applies the model in place. The Gaussian draws for MaxShiftGaussian come
/// from the stream `seed`, element i using counter i.
inline void apply_inplace(std::span<double> x, const CorruptionModel& model, std::uint64_t seed) {
    const std::size_t n = x.size();
    struct V {
        std::span<double> x;
        std::size_t n;
        std::uint64_t seed;
        void operator()(const None&) const {}
        void operator()(const MaxShiftGaussian& g) const {
            if (g.k > n) throw InvalidParameter("k", "exceeds the sample size");
            for (std::size_t i = 0; i < g.k; ++i) {
                const double u = g.mu + g.sigma * special::normal_quantile(rng::uniform(seed, i));
                x[i] = std::max(x[i], u);
            }
        }
        void operator()(const ReplaceLargest& r) const {
            if (r.k > n) throw InvalidParameter("k", "exceeds the sample size");
            if (r.k == 0) return;
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), std::size_t{0});
            auto larger = [&](std::size_t a, std::size_t b) { return x[a] > x[b] || (x[a] == x[b] && a < b); };
            std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(r.k - 1), order.end(), larger);
            for (std::size_t i = 0; i < r.k; ++i) x[order[i]] = r.value;
        }
        void operator()(const ReplaceIndices& r) const {
            if (r.indices.size() > n) throw InvalidParameter("indices", "more indices than observations");
            for (std::size_t idx : r.indices)
                if (idx < 1 || idx > n) throw InvalidParameter("indices", "positions must lie in 1..N");
            for (std::size_t idx : r.indices) x[idx - 1] = r.value;
        }
    };
    std::visit(V{x, n, seed}, model);
}

inline std::vector<double> apply_corruption(std::span<const double> sample, const CorruptionModel& model,
                                            std::uint64_t seed) {
    validate(model);
    std::vector<double> out(sample.begin(), sample.end());
    apply_inplace(out, model, seed);
    return out;
}

/// floor(N eps^2 / 140): the number of maliciously modified points the
/// robustness guarantee tolerates.
inline std::size_t corruption_budget(std::size_t n, double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw InvalidParameter("eps", "must lie in (0, 1]");
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * eps * eps / 140.0 * (1.0 + 1e-12)));
}

} // namespace esr::corrupt
