#include "bbmlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bbmlab/math_util.hpp"

namespace bbmlab::stats {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ReferenceLaw rayleigh_r() {
    return {"RayleighR", [](double r) { return r <= 0.0 ? 0.0 : 1.0 - std::exp(-r * r); }};
}

ReferenceLaw rayleigh_rtilde() {
    return {"RayleighRtilde", [](double r) {
                return r <= 0.0 ? 0.0 : 1.0 - std::exp(-0.5 * kPi * kPi * r * r);
            }};
}

ReferenceLaw uniform01() {
    return {"UniformU", [](double u) { return std::clamp(u, 0.0, 1.0); }};
}

ReferenceLaw ur_product() {
    return {"UniformTimesRayleighR", [](double y) {
                if (y <= 0.0) return 0.0;
                return 1.0 - std::exp(-y * y) + std::sqrt(kPi) * y * std::erfc(y);
            }};
}

ReferenceLaw scaled(const ReferenceLaw& base, double factor) {
    if (!(factor > 0.0)) throw std::invalid_argument("scaled: factor must be positive");
    auto cdf = base.cdf;
    return {"Scaled(" + base.name + ")", [cdf, factor](double x) { return cdf(x / factor); }};
}

double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        const double upper = (static_cast<double>(i) + 1.0) / n - f;
        const double lower = f - static_cast<double>(i) / n;
        d = std::max({d, upper, lower});
    }
    return d;
}

KsReport ks_test(std::vector<double> sample, const ReferenceLaw& law, double threshold) {
    KsReport report;
    report.n = sample.size();
    report.statistic = ks_statistic(std::move(sample), law.cdf);
    report.threshold = threshold;
    report.pass = report.statistic < threshold;
    return report;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("pearson_correlation: mismatched or tiny samples");
    const double ma = sample_mean(a);
    const double mb = sample_mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

namespace {

// Ranks averaged over ties, 0-based fractional.
std::vector<double> fractional_ranks(std::span<const double> xs) {
    std::vector<std::size_t> idx(xs.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });
    std::vector<double> ranks(xs.size());
    std::size_t i = 0;
    while (i < idx.size()) {
        std::size_t j = i;
        while (j + 1 < idx.size() && xs[idx[j + 1]] == xs[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j);
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

} // namespace

QuadrantChi2 quadrant_chi2(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 64)
        throw std::invalid_argument("quadrant_chi2: need matched samples of size >= 64");
    const auto ra = fractional_ranks(a);
    const auto rb = fractional_ranks(b);
    const double n = static_cast<double>(a.size());
    int counts[4][4] = {};
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto bin = [&](double r) { return std::min(3, static_cast<int>(4.0 * r / n)); };
        ++counts[bin(ra[i])][bin(rb[i])];
    }
    const double expected = n / 16.0;
    double stat = 0.0;
    for (auto& row : counts)
        for (int c : row) {
            const double d = static_cast<double>(c) - expected;
            stat += d * d / expected;
        }
    return {stat, chi2_sf(stat, 9.0)};
}

JointReport joint_decomposition_test(std::span<const std::pair<double, double>> pairs,
                                     const ReferenceLaw& first_law, double ratio_factor,
                                     const JointThresholds& thresholds) {
    if (pairs.empty()) throw std::invalid_argument("joint_decomposition_test: empty input");
    std::vector<double> first(pairs.size()), second(pairs.size()), ratio(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [a, b] = pairs[i];
        if (!(a > 0.0)) throw std::domain_error("joint_decomposition_test: nonpositive first coordinate");
        first[i] = a;
        second[i] = b;
        ratio[i] = b / (ratio_factor * a);
    }
    JointReport report;
    report.first = ks_test(first, first_law, thresholds.first_ks);
    report.ratio = ks_test(ratio, uniform01(), thresholds.ratio_ks);
    report.corr_a_ratio = pearson_correlation(first, ratio);
    report.corr_a_b = pearson_correlation(first, second);
    report.quadrant = quadrant_chi2(first, ratio);
    report.independence_pass = std::fabs(report.corr_a_ratio) < thresholds.correlation &&
                               report.quadrant.p_value > thresholds.quadrant_p_floor;
    report.pass = report.first.pass && report.ratio.pass && report.independence_pass;
    return report;
}

JointReport joint_rur_test(std::span<const std::pair<double, double>> pairs, bool scale3) {
    return joint_decomposition_test(pairs, rayleigh_r(), scale3 ? 3.0 : 1.0, JointThresholds{});
}

FitResult survival_exponent_fit(std::span<const SurvivalPoint> points) {
    if (points.size() < 3) throw std::invalid_argument("survival_exponent_fit: need >= 3 points");
    std::vector<double> x, y, w;
    for (const auto& p : points) {
        if (!(p.p_hat > 0.0)) throw std::domain_error("survival_exponent_fit: p_hat must be positive");
        x.push_back(std::cbrt(p.t));
        y.push_back(-std::log(p.p_hat));
        // ci is the 3-sigma half width of p_hat, so sigma(-log p) ~ ci/(3 p).
        const double sigma_log = p.ci > 0.0 ? p.ci / (3.0 * p.p_hat) : 1.0;
        w.push_back(1.0 / (sigma_log * sigma_log));
    }
    double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
        swxx += w[i] * x[i] * x[i];
        swxy += w[i] * x[i] * y[i];
    }
    const double det = sw * swxx - swx * swx;
    if (det == 0.0) throw std::invalid_argument("survival_exponent_fit: degenerate abscissae");
    FitResult fit;
    fit.slope = (sw * swxy - swx * swy) / det;
    fit.intercept = (swxx * swy - swx * swxy) / det;
    double ss_res = 0.0, ss_tot = 0.0;
    const double ybar = swy / sw;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double fit_i = fit.slope * x[i] + fit.intercept;
        ss_res += w[i] * (y[i] - fit_i) * (y[i] - fit_i);
        ss_tot += w[i] * (y[i] - ybar) * (y[i] - ybar);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

double sample_mean(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("sample_mean: empty");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) throw std::invalid_argument("sample_variance: need n >= 2");
    const double m = sample_mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

double sample_median(std::vector<double> xs) {
    if (xs.empty()) throw std::invalid_argument("sample_median: empty");
    const std::size_t mid = xs.size() / 2;
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid), xs.end());
    double hi = xs[mid];
    if (xs.size() % 2 == 1) return hi;
    std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(mid) - 1, xs.end());
    return 0.5 * (hi + xs[mid - 1]);
}

HistogramAccumulator::HistogramAccumulator(double lo, double hi, std::size_t bins)
    : lo_(lo), hi_(hi), width_((hi - lo) / static_cast<double>(bins)), counts_(bins, 0.0) {
    if (!(hi > lo) || bins == 0) throw std::invalid_argument("HistogramAccumulator: bad range");
}

void HistogramAccumulator::add(double x) noexcept { add_weighted(x, 1.0); }

void HistogramAccumulator::add_weighted(double x, double w) noexcept {
    if (x < lo_ || x >= hi_) {
        // clamp into the boundary bins; occupation samples live in (0,1) anyway
        x = std::clamp(x, lo_, hi_ - 0.5 * width_);
    }
    const auto bin = static_cast<std::size_t>((x - lo_) / width_);
    counts_[std::min(bin, counts_.size() - 1)] += w;
    total_ += w;
}

double HistogramAccumulator::sup_distance(const std::function<double(double)>& cdf) const {
    if (total_ <= 0.0) throw std::logic_error("HistogramAccumulator: no mass accumulated");
    double cum = 0.0;
    double d = 0.0;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        const double edge = lo_ + width_ * static_cast<double>(i + 1);
        cum += counts_[i] / total_;
        d = std::max(d, std::fabs(cum - cdf(edge)));
    }
    return d;
}

} // namespace bbmlab::stats
