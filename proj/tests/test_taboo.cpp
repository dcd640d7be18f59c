#include "doctest.h"

#include <cmath>
#include <vector>

#include "bbmlab/math_util.hpp"
#include "bbmlab/rng.hpp"
#include "bbmlab/stats.hpp"
#include "bbmlab/taboo.hpp"

namespace taboo = bbmlab::taboo;
namespace stats = bbmlab::stats;
using bbmlab::RandomSource;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("taboo drift values and domain") {
    CHECK(taboo::taboo_drift(0.5) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(taboo::taboo_drift(0.25) == doctest::Approx(kPi).epsilon(1e-12));
    // antisymmetry about 1/2
    CHECK(taboo::taboo_drift(0.3) == doctest::Approx(-taboo::taboo_drift(0.7)).epsilon(1e-12));
    // 1/x divergence near the boundary: x * drift(x) -> 1
    CHECK(1e-6 * taboo::taboo_drift(1e-6) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS((void)taboo::taboo_drift(0.0), std::domain_error);
    CHECK_THROWS_AS((void)taboo::taboo_drift(1.2), std::domain_error);
}

TEST_CASE("transition density normalizes to one") {
    // open-interval quadrature; the density vanishes like sin(pi y) at the ends
    const double mass = bbmlab::integrate_simpson(
        [](double y) { return taboo::taboo_transition_density(0.3, y, 0.5, 64); }, 1e-9,
        1.0 - 1e-9, 4096);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("transition density relaxes to the stationary law") {
    for (double x : {0.2, 0.5, 0.9}) {
        for (double y : {0.1, 0.4, 0.75}) {
            const double q = taboo::taboo_transition_density(x, y, 50.0, 32);
            CHECK(q == doctest::Approx(taboo::stationary_density(y)).epsilon(1e-10));
        }
    }
}

TEST_CASE("transition density is reversible w.r.t. the speed measure") {
    const double x = 0.2, y = 0.7, u = 0.3;
    const double lhs = taboo::taboo_transition_density(x, y, u, 128) * taboo::stationary_density(x);
    const double rhs = taboo::taboo_transition_density(y, x, u, 128) * taboo::stationary_density(y);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("series and image representations agree") {
    for (double u : {0.02, 0.1, 0.25}) {
        for (double x : {0.15, 0.5}) {
            for (double y : {0.3, 0.55, 0.8}) {
                const double a = taboo::taboo_transition_density(x, y, u, 400);
                const double b = taboo::taboo_transition_density_image(x, y, u);
                CHECK(a == doctest::Approx(b).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("truncation error stays below the documented tail bound") {
    const double x = 0.3, y = 0.6, u = 0.05;
    const double full = taboo::taboo_transition_density(x, y, u, 400);
    for (int terms : {5, 10, 20}) {
        const double trunc = taboo::taboo_transition_density(x, y, u, terms);
        CHECK(std::fabs(full - trunc) <= taboo::taboo_transition_tail_bound(x, u, terms) + 1e-15);
    }
    // default truncation depth: tail below 1e-12 for u >= 0.05
    CHECK(taboo::taboo_transition_tail_bound(0.3, 0.05, 200) < 1e-12);
    CHECK_THROWS_AS((void)taboo::taboo_transition_density(0.3, 0.6, 0.0, 10), std::domain_error);
}

TEST_CASE("exact sampler matches the stationary law at large u") {
    RandomSource rng(17);
    taboo::TabooTransitionSampler sampler(0.5, 100.0);
    std::vector<double> draws(100000);
    for (auto& d : draws) d = sampler.sample(rng);
    const double d = stats::ks_statistic(draws, taboo::stationary_cdf);
    CHECK(d < 0.01);
}

TEST_CASE("exact sampler short-time moments match Brownian scaling") {
    RandomSource rng(23);
    const double u = 1e-4;
    std::vector<double> draws(20000);
    for (auto& d : draws) d = taboo::sample_taboo_exact(0.5, u, rng);
    CHECK(stats::sample_mean(draws) == doctest::Approx(0.5).epsilon(2e-4));
    CHECK(stats::sample_variance(draws) == doctest::Approx(u).epsilon(0.05));
}

TEST_CASE("exact sampler is self-consistent with the density (binned chi-square)") {
    RandomSource rng(29);
    const double x = 0.5, u = 0.5;
    taboo::TabooTransitionSampler sampler(x, u);
    const int bins = 64, n = 100000;
    // independent route to equal-probability bin edges: Simpson-integrated
    // series density on a fine grid, then quantile lookup
    const int m = 8192;
    std::vector<double> cum(m + 1, 0.0);
    double prev = 0.0;
    for (int i = 1; i <= m; ++i) {
        const double y = static_cast<double>(i) / m;
        const double d = y < 1.0 ? taboo::taboo_transition_density(x, y, u, 64) : 0.0;
        cum[i] = cum[i - 1] + 0.5 * (prev + d) / m;
        prev = d;
    }
    for (auto& c : cum) c /= cum[m];
    std::vector<double> edges(bins + 1);
    edges[0] = 0.0;
    edges[bins] = 1.0;
    for (int k = 1; k < bins; ++k) {
        const double target = static_cast<double>(k) / bins;
        const auto it = std::lower_bound(cum.begin(), cum.end(), target);
        edges[k] = static_cast<double>(it - cum.begin()) / m;
    }
    std::vector<int> counts(bins, 0);
    for (int i = 0; i < n; ++i) {
        const double y = sampler.sample(rng);
        int b = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), y) - edges.begin()) - 1;
        b = std::clamp(b, 0, bins - 1);
        ++counts[b];
    }
    const double expected = static_cast<double>(n) / bins;
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(bbmlab::chi2_sf(chi2, bins - 1) > 0.01);
}

TEST_CASE("one Euler step from 1/2 matches the exact marginal") {
    RandomSource rng(41);
    taboo::TabooConfig cfg;
    cfg.start = 0.5;
    cfg.step = 1e-4;
    std::vector<double> draws(100000);
    for (auto& d : draws) {
        taboo::TabooStream stream(cfg, rng.substream(static_cast<std::uint64_t>(&d - draws.data())));
        stream.step();
        d = stream.k();
    }
    taboo::TabooTransitionSampler oracle(0.5, cfg.step);
    const double d = stats::ks_statistic(draws, [&](double y) { return oracle.cdf(y); });
    CHECK(d < 0.01);
}

TEST_CASE("boundaries behave as entrance-not-exit: no clamps in a long run") {
    taboo::TabooConfig cfg;
    cfg.start = 0.5;
    cfg.step = 1e-4;
    taboo::TabooStream stream(cfg, RandomSource(4242));
    for (int i = 0; i < 1000000; ++i) stream.step();
    CHECK(stream.clamp_events() == 0);
}

TEST_CASE("local time accumulates at the ergodic rate (short run)") {
    taboo::TabooConfig cfg;
    cfg.start = 0.5;
    cfg.step = 1e-4;
    taboo::TabooStream stream(cfg, RandomSource(7777));
    const double s = 500.0;
    const auto steps = static_cast<long>(s / cfg.step);
    for (long i = 0; i < steps; ++i) stream.step();
    CHECK(stream.local_time() / s == doctest::Approx(2.0).epsilon(0.10));
}

TEST_CASE("decompose_excursions: path constantly above 1/2 gives no records") {
    taboo::TabooPath path;
    for (int i = 0; i < 10; ++i) {
        path.times.push_back(0.1 * i);
        path.values.push_back(0.6);
        path.local_time.push_back(0.0);
    }
    CHECK(taboo::decompose_excursions(path).empty());
}

TEST_CASE("decompose_excursions: synthetic sawtooth yields the constructed minima") {
    const std::vector<double> values = {0.6, 0.55, 0.52, 0.45, 0.3, 0.45, 0.55,
                                        0.6, 0.48, 0.35, 0.2, 0.35, 0.52, 0.6};
    taboo::TabooPath path;
    for (std::size_t i = 0; i < values.size(); ++i) {
        path.times.push_back(static_cast<double>(i));
        path.values.push_back(values[i]);
        path.local_time.push_back(0.5 * static_cast<double>(i));
    }
    const auto records = taboo::decompose_excursions(path);
    REQUIRE(records.size() == 2);
    CHECK(records[0].a == doctest::Approx(0.3));
    CHECK(records[1].a == doctest::Approx(0.2));
    CHECK(records[0].s_start < records[0].s_end);
    CHECK(records[0].u <= records[1].u);
}

TEST_CASE("incremental excursion records equal the recomputed decomposition") {
    taboo::TabooConfig cfg;
    cfg.start = 0.5;
    cfg.step = 1e-3;
    RandomSource rng(314);
    auto path = taboo::TabooPath::start_at(cfg.start);
    for (int i = 0; i < 50000; ++i) taboo::step_taboo(path, cfg, rng);
    const auto recomputed = taboo::decompose_excursions(path);
    REQUIRE(path.excursions.size() == recomputed.size());
    CHECK(path.excursions.size() > 10);
    for (std::size_t i = 0; i < recomputed.size(); ++i) {
        CHECK(path.excursions[i].u == doctest::Approx(recomputed[i].u).epsilon(1e-12));
        CHECK(path.excursions[i].a == doctest::Approx(recomputed[i].a).epsilon(1e-12));
        CHECK(path.excursions[i].a > 0.0);
        CHECK(path.excursions[i].a < 0.5);
    }
}

TEST_CASE("config validation rejects bad parameters") {
    taboo::TabooConfig cfg;
    cfg.step = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.step = 1e-4;
    cfg.local_time_band = 0.3;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
