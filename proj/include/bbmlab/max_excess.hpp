// max_excess.hpp
//
// Law of the all-time maximum excess E of critical branching Brownian motion
// (drift -1, beta m = 1/2) above its starting point, far from the absorbing
// origin. Conditioning on the first branching event shows that
// u(x) = P_x(sup_s M(s) >= barrier) solves the stationary FKPP-type equation
//
//   (1/2) u'' - u' + beta (1 - f(1-u) - u) = 0,   u(barrier) = 1, u(-inf) = 0,
//
// with f the offspring pgf. The physical (minimal) solution is obtained as
// the long-time limit of the parabolic problem started from zero, marched
// here with an IMEX scheme whose fixed point is the exact discrete stationary
// profile. P(E >= a) decays like kappa * a * e^{-a}.
//
// Used by the spine simulation to sample subtree maxima exactly in law at
// heights where direct simulation is impossible (the subtree population grows
// like e^{z/2} before absorption).

#pragma once

#include <vector>

#include "bbmlab/offspring.hpp"
#include "bbmlab/rng.hpp"

namespace bbmlab::bbm {

struct MaxExcessParams {
    double table_depth = 30.0;   // tabulated range of a
    double domain_pad = 6.0;     // extra depth before the Dirichlet-0 boundary
    double dx = 0.004;
    double dt = 0.25;
    double t_min = 500.0;
    double t_max = 20000.0;
    double rel_rate_tol = 1e-9;  // relative change per unit time at the probes
};

class MaxExcessLaw {
public:
    explicit MaxExcessLaw(const OffspringLaw& law, MaxExcessParams params = {});

    // P(E >= a); 1 for a <= 0. Beyond the table the log-linear tail is
    // extrapolated.
    [[nodiscard]] double survival(double a) const;

    [[nodiscard]] double sample(RandomSource& rng) const;

    // Conditional sample of E given E >= a_min.
    [[nodiscard]] double sample_tail(double a_min, RandomSource& rng) const;

    [[nodiscard]] double marched_time() const noexcept { return marched_time_; }

private:
    [[nodiscard]] double invert(double log_w) const;

    double dx_;
    double depth_;
    std::vector<double> logw_;   // logw_[i] = log P(E >= i*dx), logw_[0] = 0
    double tail_slope_;
    double marched_time_ = 0.0;
};

} // namespace bbmlab::bbm
