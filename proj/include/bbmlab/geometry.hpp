// geometry.hpp
//
// Time geometry of the conditioned process: the barrier L_t(s) = c (t-s)^{1/3}
// with c = (3 pi^2 / 2)^{1/3}, the clock change tau(s) = int_0^s L_t(u)^{-2} du
// and its inverse. Closed forms are evaluated in expm1/log1p form so the
// near-cancellation at s << t keeps full precision.

#pragma once

#include <stdexcept>

namespace bbmlab::spine {

class TimeGeometry {
public:
    explicit TimeGeometry(double t);

    [[nodiscard]] double horizon() const noexcept { return t_; }
    [[nodiscard]] double c_const() const noexcept { return c_; }

    // L_t(s) on [0, t]; L(t) = 0.
    [[nodiscard]] double L(double s) const;
    [[nodiscard]] double L0() const noexcept { return l0_; }

    // tau(s) = (3/c^2)(t^{1/3} - (t-s)^{1/3}), increasing, tau(0) = 0.
    [[nodiscard]] double tau(double s) const;
    [[nodiscard]] double tau_end() const;   // tau(t) = 3 t^{1/3} / c^2

    // tau^{-1}(u) = t - (t^{1/3} - c^2 u / 3)^3 on [0, tau(t)].
    [[nodiscard]] double tau_inv(double u) const;

    // gamma = pi^2 / (2 L_t).
    [[nodiscard]] double gamma() const noexcept;

private:
    double t_;
    double c_;
    double cbrt_t_;
    double l0_;
};

} // namespace bbmlab::spine
