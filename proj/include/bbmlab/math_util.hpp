// math_util.hpp
//
// Small numerical helpers shared across modules: the standard normal CDF,
// regularized incomplete gamma (for chi-square tails), composite Simpson
// quadrature and Brownian-bridge extreme sampling.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "bbmlab/rng.hpp"

namespace bbmlab {

inline double normal_cdf(double x) noexcept {
    return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

namespace detail {

// Regularized lower incomplete gamma P(a, x) by series expansion (x < a+1).
inline double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction.
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

} // namespace detail

// Regularized upper incomplete gamma Q(a, x) = Gamma(a,x)/Gamma(a).
inline double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("gamma_q: a > 0, x >= 0 required");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_cf(a, x);
}

// Survival function of the chi-square distribution with k degrees of freedom.
inline double chi2_sf(double x, double k) { return gamma_q(0.5 * k, 0.5 * x); }

// Composite Simpson rule on [a, b] with n panels (n rounded up to even).
template <class F>
double integrate_simpson(F f, double a, double b, std::size_t n) {
    if (n < 2) n = 2;
    if (n % 2) ++n;
    const double h = (b - a) / static_cast<double>(n);
    double s4 = 0.0, s2 = 0.0;
    for (std::size_t i = 1; i < n; i += 2) s4 += f(a + h * static_cast<double>(i));
    for (std::size_t i = 2; i < n; i += 2) s2 += f(a + h * static_cast<double>(i));
    return (h / 3.0) * (f(a) + f(b) + 4.0 * s4 + 2.0 * s2);
}

// Minimum of a Brownian bridge from a to b over duration dt, sampled exactly
// (inverse CDF of P(min <= m) = exp(-2(a-m)(b-m)/dt)). Valid for any constant
// drift, since conditioning on the endpoints removes it.
inline double bridge_min_sample(double a, double b, double dt, RandomSource& rng) {
    const double d = a - b;
    const double r = std::sqrt(d * d - 2.0 * dt * std::log(rng.uniform_pos()));
    return 0.5 * (a + b - r);
}

// Maximum of a Brownian bridge from a to b over duration dt (mirror image).
inline double bridge_max_sample(double a, double b, double dt, RandomSource& rng) {
    const double d = a - b;
    const double r = std::sqrt(d * d - 2.0 * dt * std::log(rng.uniform_pos()));
    return 0.5 * (a + b + r);
}

// Probability that a Brownian bridge from a > 0 to b > 0 over dt touches 0.
inline double bridge_hit_zero_prob(double a, double b, double dt) noexcept {
    return std::exp(-2.0 * a * b / dt);
}

} // namespace bbmlab
