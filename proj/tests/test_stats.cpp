#include "doctest.h"

#include <cmath>
#include <utility>
#include <vector>

#include "bbmlab/rng.hpp"
#include "bbmlab/stats.hpp"

namespace stats = bbmlab::stats;
using bbmlab::RandomSource;

namespace {
constexpr double kPi = 3.14159265358979323846;

double rayleigh_r_quantile(double p) { return std::sqrt(-std::log(1.0 - p)); }
} // namespace

TEST_CASE("reference law identities") {
    auto r = stats::rayleigh_r();
    auto rt = stats::rayleigh_rtilde();
    // medians obtained by inverting the closed-form CDFs
    CHECK(r.cdf(0.8326) == doctest::Approx(0.5).epsilon(2e-4));
    CHECK(rt.cdf(0.3748) == doctest::Approx(0.5).epsilon(2e-4));
    // scaling identity: CDF_Rtilde(r) = CDF_R(r * pi / sqrt(2)), exactly
    for (double v : {0.1, 0.3, 0.7, 1.3}) {
        CHECK(rt.cdf(v) == doctest::Approx(r.cdf(v * kPi / std::sqrt(2.0))).epsilon(1e-14));
    }
    // Scaled law: factor * X
    auto sc = stats::scaled(r, 2.0);
    CHECK(sc.cdf(1.0) == doctest::Approx(r.cdf(0.5)).epsilon(1e-14));
}

TEST_CASE("ks statistic on stratified quantiles equals 1/(2n)") {
    const std::size_t n = 1000;
    std::vector<double> sample;
    for (std::size_t i = 1; i <= n; ++i)
        sample.push_back(rayleigh_r_quantile((static_cast<double>(i) - 0.5) / static_cast<double>(n)));
    const double d = stats::ks_statistic(sample, stats::rayleigh_r().cdf);
    CHECK(d == doctest::Approx(0.5 / static_cast<double>(n)).epsilon(1e-9));
}

TEST_CASE("ks statistic of a constant sample against a continuous law is >= 1/2") {
    std::vector<double> sample(100, 0.8326);
    const double d = stats::ks_statistic(sample, stats::rayleigh_r().cdf);
    CHECK(d >= 0.5 - 1e-9);
}

TEST_CASE("ks on a true sample stays under the 99% critical value") {
    RandomSource rng(2024);
    const std::size_t n = 100000;
    std::vector<double> sample(n);
    for (auto& x : sample) x = rayleigh_r_quantile(rng.uniform());
    auto report = stats::ks_test(sample, stats::rayleigh_r(), stats::ks_critical_99(n));
    CHECK(report.pass);
}

TEST_CASE("ks is invariant under a strictly increasing transform of sample and law") {
    RandomSource rng(7);
    std::vector<double> sample(5000);
    for (auto& x : sample) x = rayleigh_r_quantile(rng.uniform());
    const double d1 = stats::ks_statistic(sample, stats::rayleigh_r().cdf);
    std::vector<double> cubed(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) cubed[i] = sample[i] * sample[i] * sample[i];
    auto base = stats::rayleigh_r().cdf;
    const double d2 = stats::ks_statistic(cubed, [&](double y) { return base(std::cbrt(y)); });
    CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
}

TEST_CASE("ks_test rejects empty samples") {
    CHECK_THROWS_AS((void)stats::ks_test({}, stats::rayleigh_r(), 0.1), std::invalid_argument);
}

TEST_CASE("joint decomposition test: null construction passes, shuffling breaks the ratio") {
    RandomSource rng(31);
    const std::size_t n = 100000;
    std::vector<std::pair<double, double>> good(n), shuffled(n);
    std::vector<double> rs(n), us(n);
    for (std::size_t i = 0; i < n; ++i) {
        rs[i] = rayleigh_r_quantile(rng.uniform());
        us[i] = rng.uniform();
        good[i] = {rs[i], 3.0 * us[i] * rs[i]};
    }
    for (std::size_t i = 0; i < n; ++i) shuffled[i] = {rs[i], 3.0 * us[i] * rs[(i + 1) % n]};

    stats::JointThresholds th;
    th.first_ks = stats::ks_critical_99(n);
    th.ratio_ks = stats::ks_critical_99(n);
    auto ok = stats::joint_decomposition_test(good, stats::rayleigh_r(), 3.0, th);
    CHECK(ok.pass);

    auto bad = stats::joint_decomposition_test(shuffled, stats::rayleigh_r(), 3.0, th);
    CHECK_FALSE(bad.ratio.pass);
    // the raw coordinates really are independent after shuffling
    CHECK(std::fabs(bad.corr_a_b) < 0.01);
}

TEST_CASE("survival exponent fit recovers an exact log-linear input") {
    const double c = 2.4554;
    std::vector<stats::SurvivalPoint> pts;
    for (double t : {50.0, 100.0, 200.0, 400.0})
        pts.push_back({t, std::exp(-c * std::cbrt(t) + 1.7), 0.0});
    auto fit = stats::survival_exponent_fit(pts);
    CHECK(fit.slope == doctest::Approx(c).epsilon(1e-10));
    CHECK(fit.intercept == doctest::Approx(-1.7).epsilon(1e-9));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("survival exponent fit input validation") {
    std::vector<stats::SurvivalPoint> two = {{50.0, 0.1, 0.0}, {100.0, 0.01, 0.0}};
    CHECK_THROWS_AS((void)stats::survival_exponent_fit(two), std::invalid_argument);
    std::vector<stats::SurvivalPoint> bad = {{50.0, 0.1, 0.0}, {100.0, 0.0, 0.0}, {200.0, 0.01, 0.0}};
    CHECK_THROWS_AS((void)stats::survival_exponent_fit(bad), std::domain_error);
}

TEST_CASE("two-sample ks on identical generators is small") {
    RandomSource rng(11);
    std::vector<double> a(20000), b(20000);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal();
    CHECK(stats::ks_two_sample(a, b) < 0.02);
}

TEST_CASE("histogram accumulator sup distance") {
    stats::HistogramAccumulator hist(0.0, 1.0, 2048);
    RandomSource rng(3);
    for (int i = 0; i < 400000; ++i) hist.add(rng.uniform());
    CHECK(hist.sup_distance([](double x) { return x; }) < 0.01);
}
