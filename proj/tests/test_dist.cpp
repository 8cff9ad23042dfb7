#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "esr/dist.hpp"
#include "esr/quadrature.hpp"

using namespace esr;
using namespace esr::dist;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<DistributionSpec> continuous_families() {
    return {Normal{0, 1},       Normal{2, 3},         StudentT{5},    StudentT{2.5},  Logistic{0, 1},
            Logistic{-1, 0.5},  Lognormal{0, 1},      Pareto{1, 2},   Pareto{2, 4.5}, Exponential{1},
            Exponential{0.3}};
}

double ks_statistic(const DistributionSpec& spec, std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(spec, x[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

} // namespace

TEST_CASE("sampling examples") {
    CHECK(sample(ScaledBernoulli{1, 3}, 4, 0) == std::vector<double>{3, 3, 3, 3});

    SECTION("Pareto(1, 2) mean against an independent quantile integral") {
        // Mean = integral of the quantile over (0, 1); with u = 1 - s^2 the
        // integrand 2 s x0 s^(-2/lambda) is bounded.
        const Pareto p{1, 2};
        const auto r = quad::integrate([&](double s) { return 2 * s * p.upper_quantile(s * s); }, 0, 1, {1e-12, 0, 4000});
        REQUIRE(r.converged);
        CHECK_THAT(r.value, WithinAbs(2.0, 1e-9));

        const auto x = sample(p, 1000000, 7);
        double s = 0, s2 = 0;
        for (double v : x) s += v, s2 += v * v;
        const double n = static_cast<double>(x.size());
        const double mean = s / n;
        const double mc_sd = std::sqrt((s2 / n - mean * mean) / n);
        CHECK(std::fabs(mean - r.value) < 3 * mc_sd);
    }

    SECTION("Normal fraction below its 0.9 quantile") {
        const auto x = sample(Normal{0, 1}, 1000000, 7);
        const double frac = std::count_if(x.begin(), x.end(), [](double v) { return v <= 1.28155; }) / 1e6;
        const double target = special::normal_cdf(1.28155);
        CHECK(std::fabs(frac - target) < 3 * std::sqrt(0.09 / 1e6));
    }
}

TEST_CASE("sampling is reproducible and seed sensitive") {
    const auto a = sample(Lognormal{0, 1}, 1000, 11);
    CHECK(a == sample(Lognormal{0, 1}, 1000, 11));
    CHECK(a != sample(Lognormal{0, 1}, 1000, 12));
    CHECK_THROWS_AS(sample(Normal{0, 1}, 0, 1), InvalidParameter);
}

TEST_CASE("invalid parameters name the field") {
    auto field_of = [](const DistributionSpec& s) {
        try {
            validate(s);
        } catch (const InvalidParameter& e) {
            return e.field();
        }
        return std::string("<none>");
    };
    CHECK(field_of(Normal{0, -1}) == "sigma");
    CHECK(field_of(StudentT{0}) == "nu");
    CHECK(field_of(Logistic{0, 0}) == "scale");
    CHECK(field_of(Pareto{-1, 2}) == "x0");
    CHECK(field_of(Pareto{1, 0}) == "lambda");
    CHECK(field_of(Exponential{-2}) == "rate");
    CHECK(field_of(ScaledBernoulli{1.5, 1}) == "p");
    CHECK(field_of(ScaledBernoulli{0.5, 0}) == "x");
    CHECK(field_of(AtomMix{0.1, 0.1, 0.02}) == "x0");
    CHECK(field_of(AtomMix{-0.1, 0.6, 0.5}) == "delta");
    CHECK(field_of(Normal{0, 1}) == "<none>");
    CHECK_THROWS_AS(sample(Pareto{1, -2}, 5, 1), InvalidParameter);
}

TEST_CASE("cdf, quantile and density examples") {
    CHECK_THAT(cdf(Pareto{1, 2}, 2), WithinAbs(0.75, 1e-15));
    CHECK(cdf(Pareto{1, 2}, 0.5) == 0.0);
    CHECK_THAT(cdf(ScaledBernoulli{0.05, 1}, 0.3), WithinAbs(0.95, 1e-15));

    CHECK_THAT(quantile(Pareto{1, 2}, 0.99), WithinAbs(10.0, 1e-12));
    CHECK(quantile(ScaledBernoulli{0.05, 1}, 0.96) == 1.0);
    CHECK(quantile(ScaledBernoulli{0.05, 1}, 0.95) == 0.0);
    CHECK(quantile(Normal{0, 1}, 0.5) == 0.0);

    CHECK(density(Exponential{1}, -1) == 0.0);
    CHECK_THAT(density(Pareto{1, 2}, 2), WithinAbs(0.25, 1e-15));
    CHECK_THROWS_AS(density(ScaledBernoulli{0.05, 1}, 1), NoDensity);
}

TEST_CASE("quantile at u = 0 and out of range") {
    CHECK_THROWS_AS(quantile(Normal{0, 1}, 0), UndefinedQuantile);
    CHECK_THROWS_AS(quantile(StudentT{5}, 0), UndefinedQuantile);
    CHECK_THROWS_AS(quantile(Logistic{0, 1}, 0), UndefinedQuantile);
    CHECK_THROWS_AS(quantile(ScaledBernoulli{0.5, 1}, 0), UndefinedQuantile);
    CHECK_THROWS_AS(quantile(AtomMix{-0.1, 0.1, 0.02}, 0), UndefinedQuantile);
    CHECK(quantile(Pareto{2, 3}, 0) == 2.0);
    CHECK(quantile(Exponential{1}, 0) == 0.0);
    CHECK(quantile(Lognormal{0, 1}, 0) == 0.0);
    CHECK(std::isinf(quantile(Pareto{1, 2}, 1)));
    CHECK_THROWS_AS(quantile(Normal{0, 1}, 1.5), InvalidParameter);
    CHECK_THROWS_AS(quantile(Normal{0, 1}, -0.1), InvalidParameter);
}

TEST_CASE("cdf inverts the quantile") {
    std::vector<double> grid;
    for (int i = 1; i < 100; ++i) grid.push_back(i / 100.0);
    for (double u : {1e-9, 1e-4, 0.999, 1 - 1e-6}) grid.push_back(u);
    for (const auto& spec : continuous_families())
        for (double u : grid) {
            INFO(family_name(spec) << " u=" << u);
            CHECK_THAT(cdf(spec, quantile(spec, u)), WithinAbs(u, 1e-12));
        }
    const std::vector<DistributionSpec> atomic{ScaledBernoulli{0.05, 1}, ScaledBernoulli{0.3, 2}, AtomMix{-0.1, 0.1, 0.02},
                                               AtomMix{-2, 0.2, 0.3}};
    for (const auto& spec : atomic)
        for (double u : grid) {
            INFO(family_name(spec) << " u=" << u);
            const double q = quantile(spec, u);
            CHECK(cdf(spec, q) >= u - 1e-15);
            // Generalized inverse: nothing smaller reaches u.
            CHECK(cdf(spec, std::nextafter(q, -INFINITY) - 1e-12 * std::max(1.0, std::fabs(q))) < u);
        }
}

TEST_CASE("density matches the derivative of the cdf") {
    for (const auto& spec : continuous_families()) {
        for (int i = 1; i <= 20; ++i) {
            const double t = quantile(spec, i / 21.0);
            const double h = 1e-5 * std::max(1.0, std::fabs(t));
            const double fd = (cdf(spec, t + h) - cdf(spec, t - h)) / (2 * h);
            INFO(family_name(spec) << " t=" << t);
            CHECK_THAT(fd, WithinAbs(density(spec, t), 1e-6));
        }
    }
    const AtomMix m{-0.1, 0.1, 0.02};
    CHECK_THAT(density(m, -0.05), WithinAbs(0.2, 1e-15));
    CHECK_THROWS_AS(density(m, -0.1), NoDensity);
    CHECK_THROWS_AS(density(m, 0.0), NoDensity);
}

TEST_CASE("Kolmogorov-Smirnov fit of samples") {
    const double bound = 2.0 / std::sqrt(1e5) * 1.95;
    for (const auto& spec : continuous_families())
        for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
            INFO(family_name(spec) << " seed=" << seed);
            CHECK(ks_statistic(spec, sample(spec, 100000, seed)) < bound);
        }
}

TEST_CASE("AtomMix atom frequencies") {
    const AtomMix m{-0.1, 0.1, 0.02};
    const auto x = sample(m, 200000, 5);
    const double n = static_cast<double>(x.size());
    const double at_x0 = std::count(x.begin(), x.end(), -0.1) / n;
    const double at_0 = std::count(x.begin(), x.end(), 0.0) / n;
    CHECK(std::fabs(at_x0 - 0.88) < 3 * std::sqrt(0.88 * 0.12 / n));
    CHECK(std::fabs(at_0 - 0.1) < 3 * std::sqrt(0.1 * 0.9 / n));
    CHECK(std::all_of(x.begin(), x.end(), [](double v) { return v >= -0.1 && v <= 0.0; }));
}

TEST_CASE("AR(1) paths") {
    auto lag1 = [](const std::vector<double>& x) {
        double m = 0;
        for (double v : x) m += v;
        m /= x.size();
        double c0 = 0, c1 = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            c0 += (x[i] - m) * (x[i] - m);
            if (i + 1 < x.size()) c1 += (x[i] - m) * (x[i + 1] - m);
        }
        return std::pair{c1 / c0, c0 / x.size()};
    };

    SECTION("rho = 0 is white noise") {
        const auto [r, v] = lag1(ar1_path(0.0, 100000, 3));
        CHECK(std::fabs(r) < 3 / std::sqrt(1e5));
    }
    SECTION("rho = 0.5") {
        const auto x = ar1_path(0.5, 1000000, 3);
        const auto [r, v] = lag1(x);
        // sd of the lag-1 estimate ~ sqrt((1 - rho^2) / n); the variance of
        // the sample variance of an AR(1) is 2 (1 + rho^2) / ((1 - rho^2) n).
        CHECK(std::fabs(r - 0.5) < 3 * std::sqrt(0.75 / 1e6));
        CHECK(std::fabs(v - 1.0) < 3 * std::sqrt(2 * 1.25 / 0.75 / 1e6));
    }
    CHECK(ar1_path(0.5, 100, 9) == ar1_path(0.5, 100, 9));
    CHECK_THROWS_AS(ar1_path(1.0, 10, 1), InvalidParameter);
    CHECK_THROWS_AS(ar1_path(-1.2, 10, 1), InvalidParameter);
}
