#include "doctest.h"

#include <cmath>
#include <vector>

#include "bbmlab/math_util.hpp"
#include "bbmlab/rng.hpp"

using bbmlab::RandomSource;

TEST_CASE("substreams are reproducible and distinct") {
    RandomSource root(42);
    auto a1 = root.substream(7);
    auto a2 = root.substream(7);
    auto b = root.substream(8);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 64; ++i) {
        const auto x = a1.next_u64();
        if (x != a2.next_u64()) all_equal = false;
        if (x != b.next_u64()) any_diff = true;
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("normal draws have the right first moments") {
    RandomSource rng(1234);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        s += z;
        s2 += z * z;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    CHECK(std::fabs(mean) < 5.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("poisson matches mean and variance, including the chunked regime") {
    RandomSource rng(99);
    for (double mean : {0.5, 7.0, 130.0}) {
        const int n = 50000;
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(rng.poisson(mean));
            s += k;
            s2 += k * k;
        }
        const double m = s / n;
        const double v = s2 / n - m * m;
        const double se = std::sqrt(mean / n);
        CHECK(std::fabs(m - mean) < 5.0 * se);
        CHECK(std::fabs(v - mean) < 0.05 * mean + 5.0 * se);
    }
}

TEST_CASE("gamma_q reproduces frozen chi-square critical values") {
    // 99th percentiles: chi2(9) = 21.666, chi2(63) = 92.010
    CHECK(bbmlab::chi2_sf(21.666, 9.0) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK(bbmlab::chi2_sf(92.010, 63.0) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK(bbmlab::chi2_sf(0.0, 5.0) == doctest::Approx(1.0));
}

TEST_CASE("bridge extremes bracket the endpoints and hit probability is exact") {
    RandomSource rng(5);
    const double a = 1.0, b = 1.4, dt = 0.3;
    int n = 200000, hits = 0;
    for (int i = 0; i < n; ++i) {
        const double lo = bbmlab::bridge_min_sample(a, b, dt, rng);
        CHECK(lo <= std::min(a, b) + 1e-12);
        if (lo <= 0.0) ++hits;
    }
    const double p = static_cast<double>(hits) / n;
    const double target = bbmlab::bridge_hit_zero_prob(a, b, dt);
    CHECK(std::fabs(p - target) < 5.0 * std::sqrt(target / n));
    const double hi = bbmlab::bridge_max_sample(a, b, dt, rng);
    CHECK(hi >= std::max(a, b) - 1e-12);
}
