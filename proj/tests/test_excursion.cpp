#include "doctest.h"

#include <cmath>
#include <utility>
#include <vector>

#include "bbmlab/excursion.hpp"
#include "bbmlab/rng.hpp"
#include "bbmlab/stats.hpp"
#include "bbmlab/taboo.hpp"

namespace exc = bbmlab::excursion;
namespace stats = bbmlab::stats;
using bbmlab::RandomSource;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("excursion rate closed form") {
    CHECK(exc::excursion_rate_below(0.25) == doctest::Approx(kPi / 2.0).epsilon(1e-12));
    CHECK(exc::excursion_rate_below(1.0 / 6.0) == doctest::Approx(0.9068996821).epsilon(1e-9));
    // equals (pi/2) tan(pi d)
    for (double d : {0.05, 0.2, 0.4})
        CHECK(exc::excursion_rate_below(d) ==
              doctest::Approx(0.5 * kPi * std::tan(kPi * d)).epsilon(1e-13));
    // rate/d -> pi^2/2 as d -> 0
    CHECK(exc::excursion_rate_below(1e-6) / 1e-6 == doctest::Approx(0.5 * kPi * kPi).epsilon(1e-6));
    CHECK_THROWS_AS((void)exc::excursion_rate_below(0.5), std::domain_error);
    CHECK_THROWS_AS((void)exc::excursion_rate_below(0.0), std::domain_error);
}

TEST_CASE("excursion density matches finite differences of the rate") {
    CHECK(exc::excursion_density(1e-5) == doctest::Approx(0.5 * kPi * kPi).epsilon(1e-6));
    CHECK(exc::excursion_density(0.25) == doctest::Approx(kPi * kPi).epsilon(1e-12));
    const double step = 1e-6;
    for (double d = 0.01; d <= 0.401; d += 0.01) {
        const double fd =
            (exc::excursion_rate_below(d + step) - exc::excursion_rate_below(d - step)) /
            (2.0 * step);
        CHECK(std::fabs(exc::excursion_density(d) - fd) < 1e-9 * std::max(1.0, fd));
    }
}

TEST_CASE("triangle model: exact tail, uniform argmin ratio, strict runner-up") {
    RandomSource rng(123);
    const double rate = 0.5 * kPi * kPi;
    const int n = 200000;
    std::vector<double> m0(n), ratio(n);
    int tail_hits[3] = {0, 0, 0};
    const double ts[3] = {0.2, 0.4, 0.6};
    bool second_always_greater = true;
    for (int i = 0; i < n; ++i) {
        auto sub = rng.substream(i);
        const auto r = exc::sample_triangle_model(rate, sub);
        m0[i] = r.min_value;
        ratio[i] = r.argmin / (2.0 * r.min_value);
        if (!(r.second_min > r.min_value)) second_always_greater = false;
        for (int j = 0; j < 3; ++j)
            if (r.min_value > ts[j]) ++tail_hits[j];
    }
    CHECK(second_always_greater);
    CHECK(stats::ks_statistic(m0, stats::rayleigh_rtilde().cdf) < stats::ks_critical_99(n));
    CHECK(stats::ks_statistic(ratio, stats::uniform01().cdf) < stats::ks_critical_99(n));
    CHECK(std::fabs(stats::pearson_correlation(m0, ratio)) < 0.01);
    for (int j = 0; j < 3; ++j) {
        const double target = std::exp(-rate * ts[j] * ts[j]);
        const double p = static_cast<double>(tail_hits[j]) / n;
        CHECK(std::fabs(p - target) < 3.0 * std::sqrt(target * (1.0 - target) / n));
    }
    // median of Rtilde
    int above_median = 0;
    for (double v : m0)
        if (v > 0.3747797) ++above_median;
    CHECK(std::fabs(static_cast<double>(above_median) / n - 0.5) < 0.005);
}

TEST_CASE("ppp_min two-point example and window handling") {
    std::vector<exc::PppPoint> pts = {{1.0, 0.3}, {4.0, 0.1}};
    const auto r = exc::ppp_min(0.1, pts, 0.0, 1e30);
    CHECK(r.min_value == doctest::Approx(0.3));
    CHECK(r.argmin == doctest::Approx(4.0));
    CHECK(r.second_min == doctest::Approx(0.35));
    CHECK_THROWS_AS((void)exc::ppp_min(0.1, pts, 10.0, 20.0), exc::EmptyWindowError);
}

TEST_CASE("ppp_min window robustness at small gamma") {
    // synthetic excursion PPP with the closed-form intensity, truncated at depth 0.4
    RandomSource rng(555);
    const double gamma = 1e-4;
    const double a_max = 0.4;
    const double nu_total = exc::excursion_rate_below(a_max);
    const double u_max = 8.0 / std::sqrt(gamma);
    const double tan_amax = std::tan(kPi * a_max);
    int agree = 0;
    const int reps = 1000;
    for (int i = 0; i < reps; ++i) {
        auto sub = rng.substream(i);
        const auto n = sub.poisson(nu_total * u_max);
        std::vector<exc::PppPoint> pts(n);
        for (auto& p : pts) {
            p.u = sub.uniform() * u_max;
            p.a = std::atan(sub.uniform() * tan_amax) / kPi;
        }
        if (pts.empty()) {
            ++agree;
            continue;
        }
        const auto full = exc::ppp_min(gamma, pts, 0.0, 1e300);
        bool windowed_same;
        try {
            const auto win = exc::ppp_min(gamma, pts, std::pow(gamma, -0.25), 1e300);
            windowed_same = win.min_value == full.min_value && win.argmin == full.argmin;
        } catch (const exc::EmptyWindowError&) {
            windowed_same = false;
        }
        if (windowed_same) ++agree;
    }
    CHECK(static_cast<double>(agree) / reps >= 0.99);
}

TEST_CASE("drifted_taboo_min with b=1, d=0 reduces to the path minimum") {
    RandomSource rng(77);
    bbmlab::taboo::TabooConfig cfg;
    cfg.start = 0.5;
    cfg.step = 1e-3;
    auto path = bbmlab::taboo::TabooPath::start_at(0.5);
    for (int i = 0; i < 5000; ++i) bbmlab::taboo::step_taboo(path, cfg, rng);

    exc::DriftedMinProblem problem;
    problem.gamma = 1.0;
    problem.g_horizon = path.times.back();
    problem.theta = 0.1;
    problem.b_fn = [](double) { return 1.0; };
    problem.d_fn = [](double) { return 0.0; };
    const auto r = exc::drifted_taboo_min(problem, path);

    double path_min = 1.0;
    double argmin = 0.0;
    for (std::size_t i = 0; i < path.step_mins.size(); ++i) {
        if (path.step_mins[i] < path_min) {
            path_min = path.step_mins[i];
            argmin = path.times[i];
        }
    }
    CHECK(r.min_value == doctest::Approx(path_min).epsilon(1e-12));
    CHECK(r.argmin == doctest::Approx(argmin).epsilon(1e-12));
    CHECK(r.second_min >= r.min_value);
}

TEST_CASE("drifted_taboo_min validates the horizon") {
    auto path = bbmlab::taboo::TabooPath::start_at(0.5);
    exc::DriftedMinProblem problem;
    problem.gamma = 1.0;
    problem.g_horizon = 10.0;
    problem.theta = 0.1;
    problem.b_fn = [](double) { return 1.0; };
    problem.d_fn = [](double s) { return s; };
    CHECK_THROWS_AS((void)exc::drifted_taboo_min(problem, path), std::invalid_argument);
}

TEST_CASE("ratio bound: general (b, d) stays within the advertised envelope") {
    RandomSource rng(31);
    bbmlab::taboo::TabooConfig cfg;
    cfg.start = 0.4;
    cfg.step = 1e-3;
    auto path = bbmlab::taboo::TabooPath::start_at(0.4);
    for (int i = 0; i < 2000; ++i) bbmlab::taboo::step_taboo(path, cfg, rng);

    const double gamma = 1e-2;
    auto b_fn = [](double s) { return 1.0 + 0.01 * std::sin(s); };
    auto d_fn = [gamma](double s) { return gamma * s * (1.0 + 0.01 * std::cos(s)); };
    double sup_b = 0.0, sup_d = 0.0, sup_ratio = 0.0;
    for (std::size_t i = 1; i < path.times.size(); ++i) {
        const double s = path.times[i];
        const double k = path.values[i];
        sup_b = std::max(sup_b, std::fabs(b_fn(s) - 1.0));
        sup_d = std::max(sup_d, std::fabs(d_fn(s) / (gamma * s) - 1.0));
        const double ratio = (b_fn(s) * k + d_fn(s)) / (k + gamma * s);
        sup_ratio = std::max(sup_ratio, std::fabs(ratio - 1.0));
    }
    CHECK(sup_ratio <= sup_b + sup_d + 1e-12);
}

TEST_CASE("drifted-min stream matches the limit law at moderate gamma") {
    RandomSource rng(2026);
    exc::DriftedMinStreamConfig cfg;
    cfg.gamma = 1e-3;
    const int n = 2000;
    std::vector<double> ms(n);
    std::vector<std::pair<double, double>> pairs(n);
    for (int i = 0; i < n; ++i) {
        const auto r = exc::sample_drifted_min_stream(cfg, rng.substream(i));
        const double sqg = std::sqrt(cfg.gamma);
        ms[i] = r.min_value / sqg;
        pairs[i] = {ms[i], sqg * r.argmin};
        CHECK(r.second_min >= r.min_value);
    }
    CHECK(stats::ks_statistic(ms, stats::rayleigh_rtilde().cdf) < 0.05);
    auto report = stats::joint_decomposition_test(pairs, stats::rayleigh_rtilde(), 1.0,
                                                  {0.05, 0.05, 0.05, 1e-4});
    CHECK(report.ratio.pass);
}

TEST_CASE("problem diagnostics flag short windows") {
    exc::DriftedMinProblem problem;
    problem.gamma = 1e-4;
    problem.g_horizon = 100.0;   // sqrt(gamma)*g = 1, well under 10
    problem.theta = 0.5;
    problem.b_fn = [](double) { return 1.0; };
    problem.d_fn = [](double s) { return 1e-4 * s; };
    const auto diag = problem.diagnostics();
    CHECK(diag.sqrt_gamma_g == doctest::Approx(1.0));
    CHECK(diag.sup_b_dev == doctest::Approx(0.0));
    CHECK(diag.sup_d_dev == doctest::Approx(0.0));
}
