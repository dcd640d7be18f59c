#include "bbmlab/max_excess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bbmlab::bbm {

MaxExcessLaw::MaxExcessLaw(const OffspringLaw& law, MaxExcessParams p) {
    if (!(p.table_depth > 2.0) || !(p.dx > 0.0) || !(p.dt > 0.0))
        throw std::invalid_argument("MaxExcessLaw: bad parameters");
    dx_ = p.dx;
    depth_ = p.table_depth;
    const double domain = p.table_depth + p.domain_pad;
    const auto n = static_cast<std::size_t>(std::lround(domain / p.dx));

    // interior unknowns u_1..u_{n-1} on xi in (0, domain); u(xi=0) = 1 at the
    // barrier, u(domain) = 0. In depth coordinates the drift pushes away from
    // the barrier: (1/2) u_xx - u_x becomes (1/2) u_{xi xi} + u_xi.
    const double inv2 = 0.5 / (p.dx * p.dx);
    const double adv = 0.5 / p.dx;
    const double lower = -p.dt * (inv2 - adv);   // coefficient of u_{i-1} (toward barrier)
    const double upper = -p.dt * (inv2 + adv);
    const double diag = 1.0 + p.dt * 2.0 * inv2;

    const double beta = law.branch_rate();
    std::vector<double> u(n + 1, 0.0), rhs(n + 1, 0.0), scratch(n + 1, 0.0);
    u[0] = 1.0;

    const auto probe1 = static_cast<std::size_t>(std::lround(15.0 / p.dx));
    const auto probe2 = static_cast<std::size_t>(std::lround(std::min(25.0, domain - 2.0) / p.dx));

    double marched = 0.0;
    double last_p1 = 0.0, last_p2 = 0.0;
    while (marched < p.t_max) {
        // explicit source, implicit advection-diffusion
        for (std::size_t i = 1; i < n; ++i) {
            const double s = beta * (1.0 - law.pgf(1.0 - u[i]) - u[i]);
            rhs[i] = u[i] + p.dt * s;
        }
        rhs[1] -= lower * 1.0;   // barrier boundary u_0 = 1

        // Thomas solve of the constant-coefficient tridiagonal system
        scratch[1] = upper / diag;
        rhs[1] /= diag;
        for (std::size_t i = 2; i < n; ++i) {
            const double m = 1.0 / (diag - lower * scratch[i - 1]);
            scratch[i] = upper * m;
            rhs[i] = (rhs[i] - lower * rhs[i - 1]) * m;
        }
        u[n - 1] = rhs[n - 1];
        for (std::size_t i = n - 2; i >= 1; --i) u[i] = rhs[i] - scratch[i] * u[i + 1];
        for (std::size_t i = 1; i < n; ++i) u[i] = std::clamp(u[i], 0.0, 1.0);

        marched += p.dt;
        if (marched >= p.t_min) {
            const double r1 = std::fabs(u[probe1] - last_p1) / (p.dt * std::max(u[probe1], 1e-300));
            const double r2 = std::fabs(u[probe2] - last_p2) / (p.dt * std::max(u[probe2], 1e-300));
            if (std::max(r1, r2) < p.rel_rate_tol && last_p1 > 0.0) break;
        }
        last_p1 = u[probe1];
        last_p2 = u[probe2];
    }
    marched_time_ = marched;

    const auto table_n = static_cast<std::size_t>(std::lround(depth_ / p.dx));
    logw_.resize(table_n + 1);
    logw_[0] = 0.0;
    for (std::size_t i = 1; i <= table_n; ++i) logw_[i] = std::log(std::max(u[i], 1e-300));
    // enforce monotonicity against roundoff
    for (std::size_t i = 1; i <= table_n; ++i) logw_[i] = std::min(logw_[i], logw_[i - 1]);

    const auto span = static_cast<std::size_t>(std::lround(2.0 / p.dx));
    tail_slope_ = (logw_[table_n] - logw_[table_n - span]) / (static_cast<double>(span) * p.dx);
}

double MaxExcessLaw::survival(double a) const {
    if (a <= 0.0) return 1.0;
    const double pos = a / dx_;
    const auto i = static_cast<std::size_t>(pos);
    double lw;
    if (i + 1 < logw_.size()) {
        const double f = pos - static_cast<double>(i);
        lw = logw_[i] + f * (logw_[i + 1] - logw_[i]);
    } else {
        lw = logw_.back() + tail_slope_ * (a - depth_);
    }
    return std::exp(lw);
}

double MaxExcessLaw::invert(double log_w) const {
    if (log_w >= 0.0) return 0.0;
    if (log_w <= logw_.back())
        return depth_ + (log_w - logw_.back()) / tail_slope_;
    // logw_ is nonincreasing; binary search for the bracketing cell
    std::size_t lo = 0, hi = logw_.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (logw_[mid] > log_w ? lo : hi) = mid;
    }
    const double denom = logw_[hi] - logw_[lo];
    const double f = denom < 0.0 ? (log_w - logw_[lo]) / denom : 0.5;
    return (static_cast<double>(lo) + f) * dx_;
}

double MaxExcessLaw::sample(RandomSource& rng) const {
    return invert(std::log(rng.uniform_pos()));
}

double MaxExcessLaw::sample_tail(double a_min, RandomSource& rng) const {
    if (a_min <= 0.0) return sample(rng);
    const double lw = std::log(survival(a_min)) + std::log(rng.uniform_pos());
    return std::max(a_min, invert(lw));
}

} // namespace bbmlab::bbm
