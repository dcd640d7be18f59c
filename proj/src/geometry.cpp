#include "bbmlab/geometry.hpp"

#include <cmath>

namespace bbmlab::spine {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TimeGeometry::TimeGeometry(double t) : t_(t) {
    if (!(t > 0.0)) throw std::domain_error("TimeGeometry: t must be positive");
    c_ = std::cbrt(1.5 * kPi * kPi);
    cbrt_t_ = std::cbrt(t_);
    l0_ = c_ * cbrt_t_;
}

double TimeGeometry::L(double s) const {
    if (s < -1e-9 * t_ || s > t_ * (1.0 + 1e-12))
        throw std::domain_error("TimeGeometry::L: s outside [0, t]");
    return c_ * std::cbrt(std::max(0.0, t_ - s));
}

double TimeGeometry::tau(double s) const {
    if (s < -1e-9 * t_ || s > t_ * (1.0 + 1e-12))
        throw std::domain_error("TimeGeometry::tau: s outside [0, t]");
    s = std::min(std::max(s, 0.0), t_);
    if (s == t_) return tau_end();
    // t^{1/3} - (t-s)^{1/3} = -t^{1/3} expm1(log1p(-s/t)/3)
    const double diff = -cbrt_t_ * std::expm1(std::log1p(-s / t_) / 3.0);
    return 3.0 * diff / (c_ * c_);
}

double TimeGeometry::tau_end() const { return 3.0 * cbrt_t_ / (c_ * c_); }

double TimeGeometry::tau_inv(double u) const {
    const double end = tau_end();
    if (u < -1e-12 * end || u > end * (1.0 + 1e-12))
        throw std::domain_error("TimeGeometry::tau_inv: u outside [0, tau(t)]");
    u = std::min(std::max(u, 0.0), end);
    const double frac = c_ * c_ * u / (3.0 * cbrt_t_);
    if (frac >= 1.0) return t_;
    // t - (t^{1/3}(1 - frac))^3 = -t expm1(3 log1p(-frac))
    return -t_ * std::expm1(3.0 * std::log1p(-frac));
}

double TimeGeometry::gamma() const noexcept { return 0.5 * kPi * kPi / l0_; }

} // namespace bbmlab::spine
