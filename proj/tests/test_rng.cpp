#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "esr/rng.hpp"

using namespace esr;

TEST_CASE("uniforms are reproducible and strictly inside (0, 1)") {
    for (std::uint64_t i = 0; i < 10000; ++i) {
        const double u = rng::uniform(42, i);
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        REQUIRE(u == rng::uniform(42, i));
        // Both u and its complement are exact on the 2^-52 grid.
        REQUIRE((1.0 - u) + u == 1.0);
        REQUIRE(1.0 - (1.0 - u) == u);
    }
}

TEST_CASE("extreme words map to the grid ends") {
    CHECK(rng::to_unit(0) == 0.5 * 0x1p-52);
    CHECK(rng::to_unit(~std::uint64_t{0}) == 1.0 - 0.5 * 0x1p-52);
}

TEST_CASE("stream reproduces the counter-based words") {
    rng::Stream s(9);
    for (std::uint64_t i = 0; i < 100; ++i) REQUIRE(s.next_word() == rng::word(9, i));
    CHECK(s.position() == 100);
}

TEST_CASE("split seeds are distinct across trial and size coordinates") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t n : {750u, 1250u, 3250u})
        for (std::uint64_t t = 0; t < 1000; ++t) seen.insert(rng::split(1, n, t));
    CHECK(seen.size() == 3000);
    CHECK(rng::split(1, 2, 3) != rng::split(1, 3, 2));
    CHECK(rng::split(1, 2, 3) != rng::split(2, 2, 3));
}

TEST_CASE("uniform moments") {
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = rng::uniform(7, static_cast<std::uint64_t>(i));
        s += u;
        s2 += u * u;
    }
    const double mean = s / n, var = s2 / n - mean * mean;
    CHECK(std::fabs(mean - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
    CHECK(std::fabs(var - 1.0 / 12) < 1e-3);
}

TEST_CASE("lag-one serial correlation is negligible") {
    const int n = 200000;
    double s = 0;
    for (int i = 0; i + 1 < n; ++i) s += (rng::uniform(3, i) - 0.5) * (rng::uniform(3, i + 1) - 0.5);
    const double corr = s / (n - 1) * 12.0;
    CHECK(std::fabs(corr) < 4.0 / std::sqrt(double(n)));
}
