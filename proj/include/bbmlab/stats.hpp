// stats.hpp
//
// Empirical-distribution tooling and reference laws: ECDFs, KS statistics,
// the Rayleigh laws R and Rtilde, the joint (R, 3UR)-style decomposition
// test, and the survival-exponent regression.

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bbmlab::stats {

// ---------------------------------------------------------------------------
// Reference laws
// ---------------------------------------------------------------------------

struct ReferenceLaw {
    std::string name;
    std::function<double(double)> cdf;
};

// Rayleigh R with density 2 r exp(-r^2): CDF 1 - exp(-r^2).
ReferenceLaw rayleigh_r();

// Rayleigh Rtilde with density pi^2 r exp(-pi^2 r^2 / 2): CDF 1 - exp(-pi^2 r^2 / 2).
ReferenceLaw rayleigh_rtilde();

// Uniform on [0, 1].
ReferenceLaw uniform01();

// Law of U*R for independent U ~ Uniform[0,1] and Rayleigh R:
// CDF(y) = 1 - e^{-y^2} + sqrt(pi) y erfc(y).
ReferenceLaw ur_product();

// Law of factor * X when X ~ base: CDF(x) = base.cdf(x / factor).
ReferenceLaw scaled(const ReferenceLaw& base, double factor);

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov
// ---------------------------------------------------------------------------

struct KsReport {
    double statistic = 0.0;
    std::size_t n = 0;
    double threshold = 0.0;
    bool pass = false;
};

// One-sample KS statistic sup |ECDF - CDF| (both one-sided parts).
double ks_statistic(std::vector<double> sample, const std::function<double(double)>& cdf);

KsReport ks_test(std::vector<double> sample, const ReferenceLaw& law, double threshold);

// Two-sample KS statistic between two empirical samples.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Asymptotic critical value at ~99% confidence: 1.63 / sqrt(n).
inline double ks_critical_99(std::size_t n) {
    return 1.63 / std::sqrt(static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// Dependence measures
// ---------------------------------------------------------------------------

double pearson_correlation(std::span<const double> a, std::span<const double> b);

struct QuadrantChi2 {
    double statistic = 0.0;   // 4x4 contingency table on rank quartiles
    double p_value = 1.0;     // chi-square tail with 9 degrees of freedom
};

QuadrantChi2 quadrant_chi2(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Joint decomposition test: pairs (a, b) should satisfy a ~ first_law,
// b / (factor * a) ~ Uniform[0,1], and a independent of the ratio.
// ---------------------------------------------------------------------------

struct JointThresholds {
    double first_ks = 0.01;
    double ratio_ks = 0.01;
    double correlation = 0.01;
    double quadrant_p_floor = 0.01;
};

struct JointReport {
    KsReport first;           // marginal of a against first_law
    KsReport ratio;           // b/(factor*a) against Uniform[0,1]
    double corr_a_ratio = 0.0;
    double corr_a_b = 0.0;    // raw-coordinate correlation, reported for diagnostics
    QuadrantChi2 quadrant;    // rank-quadrant test between a and the ratio
    bool independence_pass = false;
    bool pass = false;
};

JointReport joint_decomposition_test(std::span<const std::pair<double, double>> pairs,
                                     const ReferenceLaw& first_law, double ratio_factor,
                                     const JointThresholds& thresholds);

// Convenience form: factor 3 (the Theorem-1 decomposition) or factor 1,
// first marginal Rayleigh R.
JointReport joint_rur_test(std::span<const std::pair<double, double>> pairs, bool scale3);

// ---------------------------------------------------------------------------
// Survival-exponent regression
// ---------------------------------------------------------------------------

struct SurvivalPoint {
    double t = 0.0;
    double p_hat = 0.0;
    double ci = 0.0;   // 3-sigma half width of p_hat; used for weighting
};

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Weighted least squares of -log(p_hat) against t^{1/3}. The slope targets
// the survival constant c = (3 pi^2 / 2)^{1/3}.
FitResult survival_exponent_fit(std::span<const SurvivalPoint> points);

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

double sample_mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);   // unbiased
double sample_median(std::vector<double> xs);

// Streaming histogram on [lo, hi] used for occupation statistics; exposes the
// sup distance between the accumulated ECDF (piecewise, at bin edges) and a
// reference CDF.
class HistogramAccumulator {
public:
    HistogramAccumulator(double lo, double hi, std::size_t bins);

    void add(double x) noexcept;
    void add_weighted(double x, double w) noexcept;

    [[nodiscard]] double total() const noexcept { return total_; }
    [[nodiscard]] double sup_distance(const std::function<double(double)>& cdf) const;

private:
    double lo_, hi_, width_;
    double total_ = 0.0;
    std::vector<double> counts_;
};

} // namespace bbmlab::stats
