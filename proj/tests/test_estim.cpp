#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "esr/dist.hpp"
#include "esr/estim.hpp"

using namespace esr;
using namespace esr::estim;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> iota_values(int n) {
    std::vector<double> v(n);
    std::iota(v.begin(), v.end(), 1.0);
    return v;
}

// (1/alpha) * integral over (1-alpha, 1) of X_(ceil(uN)), midpoint rule.
double riemann_plugin(std::vector<double> x, double alpha, std::size_t nodes_per_step = 100000) {
    std::sort(x.begin(), x.end());
    // Cells of width 1/(N K) put every breakpoint j/N on the grid; only the
    // cell reaching down to 1-a is partial, and it lies inside one step.
    const std::size_t n = x.size();
    const double h = 1.0 / (static_cast<double>(n) * static_cast<double>(nodes_per_step));
    const auto full = static_cast<std::size_t>(std::floor(alpha / h));
    auto var = [&](double u) { return x[std::min(static_cast<std::size_t>(std::ceil(u * double(n))) - 1, n - 1)]; };
    double s = 0;
    for (std::size_t i = 0; i < full; ++i) s += var(1 - (double(i) + 0.5) * h) * h;
    const double rest = alpha - double(full) * h;
    if (rest > 0) s += var(1 - double(full) * h - rest / 2) * rest;
    return s / alpha;
}

std::vector<double> pareto_sample(std::size_t n, std::uint64_t seed) { return dist::sample(dist::Pareto{1, 2.2}, n, seed); }

} // namespace

TEST_CASE("plug-in examples") {
    CHECK(plugin_es(std::vector<double>(10, 4.5), RiskLevel(0.1)) == 4.5);
    CHECK_THAT(plugin_es(iota_values(10), RiskLevel(0.1)), WithinAbs(10.0, 1e-14));
    CHECK_THAT(plugin_es(iota_values(10), RiskLevel(0.15)), WithinAbs(29.0 / 3, 1e-12));
    CHECK_THAT(riemann_plugin(iota_values(10), 0.15), WithinAbs(29.0 / 3, 1e-6));
    CHECK_THROWS_AS(plugin_es(std::vector<double>{}, RiskLevel(0.1)), PreconditionError);
    CHECK_THROWS_AS(plugin_es(std::vector<double>{1, NAN}, RiskLevel(0.1)), InvalidParameter);
}

TEST_CASE("plug-in matches the Riemann oracle on small samples") {
    std::mt19937_64 gen(2024);
    std::uniform_int_distribution<int> size(1, 30);
    std::uniform_real_distribution<double> level(0.01, 0.49);
    std::normal_distribution<double> value(0, 3);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> x(size(gen));
        for (auto& v : x) v = value(gen);
        if (rep % 5 == 0) x[0] = x.back(); // ties
        const double a = level(gen);
        INFO("rep=" << rep << " N=" << x.size() << " alpha=" << a);
        CHECK_THAT(plugin_es(x, RiskLevel(a)), WithinAbs(riemann_plugin(x, a), 1e-6));
    }
}

TEST_CASE("plug-in with integer alpha N is the mean of the top order statistics") {
    auto x = pareto_sample(1000, 4);
    const double a = 0.05;
    auto sorted = x;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double top = std::accumulate(sorted.begin(), sorted.begin() + 50, 0.0) / 50;
    CHECK_THAT(plugin_es(x, RiskLevel(a)), WithinRel(top, 1e-13));
}

TEST_CASE("interpolated quantile examples") {
    CHECK(interp_quantile(std::vector<double>{1, 2, 3}, 0.25) == 1.5);
    CHECK(interp_quantile(std::vector<double>{10, 20, 30, 40, 50}, 0.5) == 30);
    CHECK(interp_quantile(std::vector<double>{3, 1, 2}, 1.0) == 3);
    CHECK(interp_quantile(std::vector<double>{3, 1, 2}, 0.0) == 1);
    CHECK(interp_quantile(std::vector<double>{7}, 0.3) == 7);
    CHECK_THROWS_AS(interp_quantile(std::vector<double>{}, 0.5), PreconditionError);
    CHECK_THROWS_AS(interp_quantile(std::vector<double>{1, 2}, 1.5), InvalidParameter);
}

TEST_CASE("block bookkeeping") {
    const RiskLevel a(0.2);
    const auto x = pareto_sample(20, 9);
    const auto b0 = block_estimates(std::span(x).first(10), a, 5, 0);
    REQUIRE(b0.size() == 2);
    CHECK(b0[0] == plugin_es(std::span(x).subspan(0, 5), a));
    CHECK(b0[1] == plugin_es(std::span(x).subspan(5, 5), a));

    const auto b1 = block_estimates(x, a, 5, 5);
    REQUIRE(b1.size() == 2);
    CHECK(b1[0] == plugin_es(std::span(x).subspan(5, 5), a));
    CHECK(b1[1] == plugin_es(std::span(x).subspan(15, 5), a));

    const std::vector<double> c(37, 2.5);
    for (auto [m, g] : {std::pair{5, 0}, {4, 3}, {10, 10}})
        for (double v : block_estimates(c, a, m, g)) CHECK(v == 2.5);

    CHECK(block_estimates(std::span(x).first(19), a, 5, 0).size() == 3); // trailing data dropped
    CHECK_THROWS_AS(block_estimates(std::span(x).first(4), a, 5, 0), PreconditionError);
    CHECK_THROWS_AS(block_estimates(x, a, 0, 0), InvalidParameter);
}

TEST_CASE("truncated estimator basics") {
    const RiskLevel a(0.1);
    CHECK(truncated_es(std::vector<double>(100, 3.0), a, 10, 0.5, 0.6) == 3.0);

    const auto x = pareto_sample(3250, 1);
    const auto r = truncated_es_detail(x, a, Truncated{250, 0.5, 0.6, 0});
    CHECK(r.blocks == 13);
    CHECK(r.estimate >= r.lower);
    CHECK(r.estimate <= r.upper);
    if (r.plugin >= r.lower && r.plugin <= r.upper) CHECK(r.estimate == r.plugin);

    // Wide interval leaves the plug-in untouched.
    const auto wide = truncated_es_detail(x, a, Truncated{250, 0.0, 1.0, 0});
    if (wide.plugin >= wide.lower && wide.plugin <= wide.upper) CHECK(wide.estimate == wide.plugin);

    const std::vector<double> eleven(11, 1.0);
    CHECK_THROWS_WITH(truncated_es(eleven, a, 10, 0.5, 0.6), ContainsSubstring("need >= 2 complete blocks; reduce m") &&
                                                                 ContainsSubstring("m <= 5"));
    CHECK_THROWS_AS(truncated_es(x, a, 250, 0.7, 0.6), InvalidParameter);
}

TEST_CASE("clamp containment over many samples") {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const auto x = pareto_sample(1000 + 7 * seed, seed);
        for (std::size_t gap : {0u, 50u}) {
            const auto r = truncated_es_detail(x, RiskLevel(0.1), Truncated{100, 0.4, 0.6, gap});
            auto blocks = block_estimates(x, RiskLevel(0.1), 100, gap);
            REQUIRE(r.lower == interp_quantile(blocks, 0.4));
            REQUIRE(r.upper == interp_quantile(blocks, 0.6));
            REQUIRE(r.estimate >= r.lower);
            REQUIRE(r.estimate <= r.upper);
        }
    }
}

TEST_CASE("median of blocks") {
    const RiskLevel a(0.5 - 1e-9);
    CHECK(median_of_blocks(std::vector<double>(40, 6.0), RiskLevel(0.1), 10) == 6.0);
    // Blocks of size one have plug-in equal to the value itself.
    CHECK(median_of_blocks(std::vector<double>{3, 1, 2}, a, 1) == 2);
    CHECK(median_of_blocks(std::vector<double>{4, 1, 3, 2}, a, 1) == 2.5);
    const auto x = pareto_sample(100, 3);
    CHECK(median_of_blocks(x, RiskLevel(0.1), 60) == plugin_es(std::span(x).first(60), RiskLevel(0.1)));
}

TEST_CASE("trimmed estimator") {
    CHECK(trim_count(3250, 0.25, 1.0 / 3) == 3);
    CHECK(trim_count(10, 0.25, 1.0 / 3) == 0);
    const auto x = pareto_sample(10, 2);
    CHECK(trimmed_es(x, RiskLevel(0.1)) == plugin_es(x, RiskLevel(0.1)));
    // c = 1, exponent = 0 trims exactly one point.
    const auto v = iota_values(10);
    CHECK_THAT(trimmed_es(v, RiskLevel(0.2), 1.0, 0.0), WithinAbs(plugin_es(iota_values(9), RiskLevel(0.2)), 1e-14));
    CHECK_THAT(trimmed_es(v, RiskLevel(0.2), 1.0, 0.0), WithinAbs(riemann_plugin(iota_values(9), 0.2), 1e-6));
    CHECK_THROWS_AS(trimmed_es(v, RiskLevel(0.2), 10.0, 1.0), PreconditionError);
}

TEST_CASE("suggested block size") {
    CHECK(suggested_block_size(1.0) == 11);
    CHECK(suggested_block_size(0.2) == 275);
    CHECK(suggested_block_size(0.1) == 1100);
    CHECK_THROWS_AS(suggested_block_size(0.0), InvalidParameter);
    CHECK_THROWS_AS(suggested_block_size(-1.0), InvalidParameter);
}

TEST_CASE("affine equivariance") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> scale(0.1, 10), shift(-50, 50);
    const std::vector<EstimatorConfig> cfgs{PlugIn{}, Truncated{50, 0.5, 0.6, 0}, Truncated{40, 0.35, 0.65, 40},
                                            MedianOfBlocks{50, 0}, Trimmed{}};
    for (int rep = 0; rep < 100; ++rep) {
        auto x = pareto_sample(500, 100 + rep);
        const double s = scale(gen), b = shift(gen);
        std::vector<double> y(x.size());
        std::transform(x.begin(), x.end(), y.begin(), [&](double v) { return s * v + b; });
        for (const auto& c : cfgs) {
            const double ex = estimate(c, x, RiskLevel(0.1)), ey = estimate(c, y, RiskLevel(0.1));
            INFO(kind_name(c) << " rep=" << rep);
            CHECK_THAT(ey, WithinAbs(s * ex + b, 1e-9 * (1 + std::fabs(s * ex + b))));
        }
    }
}

TEST_CASE("permutation invariance") {
    auto x = pareto_sample(600, 8);
    const RiskLevel a(0.1);
    const double p = plugin_es(x, a), t = trimmed_es(x, a);
    const auto tr = truncated_es_detail(x, a, Truncated{100, 0.5, 0.6, 0});
    std::mt19937_64 gen(1);
    auto y = x;
    std::shuffle(y.begin(), y.end(), gen);
    CHECK_THAT(plugin_es(y, a), WithinRel(p, 1e-13));
    CHECK_THAT(trimmed_es(y, a), WithinRel(t, 1e-13));
    // Shuffling within blocks keeps everything; swapping whole blocks keeps the interval.
    auto z = x;
    for (int j = 0; j < 6; ++j) std::shuffle(z.begin() + 100 * j, z.begin() + 100 * (j + 1), gen);
    const auto tz = truncated_es_detail(z, a, Truncated{100, 0.5, 0.6, 0});
    CHECK_THAT(tz.estimate, WithinRel(tr.estimate, 1e-13));
    auto w = x;
    std::swap_ranges(w.begin(), w.begin() + 100, w.begin() + 300);
    const auto tw = truncated_es_detail(w, a, Truncated{100, 0.5, 0.6, 0});
    CHECK(tw.lower == tr.lower);
    CHECK(tw.upper == tr.upper);
}

TEST_CASE("monotonicity under a single-point increase") {
    std::mt19937_64 gen(12);
    for (int rep = 0; rep < 200; ++rep) {
        auto x = pareto_sample(50 + rep, 500 + rep);
        const double before = plugin_es(x, RiskLevel(0.1));
        const std::size_t i = gen() % x.size();
        x[i] += std::uniform_real_distribution<double>(0, 20)(gen);
        REQUIRE(plugin_es(x, RiskLevel(0.1)) >= before - 1e-12 * before);
    }
}

TEST_CASE("single-point corruption moves the block quantile by at most one node") {
    std::mt19937_64 gen(77);
    const RiskLevel a(0.1);
    const std::size_t m = 50;
    for (int rep = 0; rep < 200; ++rep) {
        auto x = pareto_sample(m * (3 + rep % 10), 900 + rep);
        const auto clean = block_estimates(x, a, m, 0);
        const double n = static_cast<double>(clean.size());
        x[gen() % x.size()] = (rep % 2 ? 1e6 : -1e6);
        const auto dirty = block_estimates(x, a, m, 0);
        int changed = 0;
        for (std::size_t j = 0; j < clean.size(); ++j) changed += clean[j] != dirty[j];
        REQUIRE(changed <= 1);
        for (double beta : {0.0, 0.35, 0.5, 0.6, 0.65, 1.0}) {
            const double lo = interp_quantile(clean, std::max(0.0, beta - 1 / (n - 1)));
            const double hi = interp_quantile(clean, std::min(1.0, beta + 1 / (n - 1)));
            const double q = interp_quantile(dirty, beta);
            // Positions beta*(n-1) and (beta +- 1/(n-1))*(n-1) round independently.
            const double ulp_slack = 1e-12 * std::max(std::fabs(lo), std::fabs(hi));
            if (beta > 0.0 && beta < 1.0) {
                INFO("rep=" << rep << " beta=" << beta);
                REQUIRE(q >= lo - ulp_slack);
                REQUIRE(q <= hi + ulp_slack);
            }
        }
    }
}

TEST_CASE("configuration checks") {
    CHECK_NOTHROW(validate(EstimatorConfig{Truncated{}}));
    CHECK_THROWS_AS(validate(EstimatorConfig{Truncated{0, 0.5, 0.6, 0}}), InvalidParameter);
    CHECK_THROWS_AS(validate(EstimatorConfig{Trimmed{-1, 0.3}}), InvalidParameter);
    CHECK(config_warnings(Truncated{250, 0.5, 0.6, 0}).empty());
    CHECK(config_warnings(Truncated{250, 0.2, 0.6, 0}).size() == 1);
    CHECK(min_sample_size(Truncated{250, 0.5, 0.6, 250}) == 1000);
    CHECK(kind_name(MedianOfBlocks{}) == "median_of_blocks");
}
