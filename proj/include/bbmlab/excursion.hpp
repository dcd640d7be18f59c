// excursion.hpp
//
// Closed-form excursion-measure formulas for the taboo process at 1/2, the
// limiting Poisson point process of excursion minima (triangle model), and
// drifted-minimum statistics over taboo paths.
//
// The triangle model: a homogeneous Poisson process N0 on R+^2 with
// intensity lambda has P(min_a+v/2 > t) = exp(-lambda t^2), since the
// sub-level set C_t = {a + v/2 <= t} is a triangle of area t^2. With
// lambda = pi^2/2, the minimum is distributed as Rtilde and the argmin as
// 2 U Rtilde.

#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "bbmlab/rng.hpp"
#include "bbmlab/taboo.hpp"

namespace bbmlab::excursion {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct PppPoint {
    double u = 0.0;   // local-time coordinate
    double a = 0.0;   // excursion depth
};

struct MinResult {
    double min_value = 0.0;
    double argmin = 0.0;
    double second_min = 0.0;   // excluding the minimizer (ppp_min) or a theta-ball around it
};

// Minimization target min over s in [0, g_horizon] of b(s) K_s + d(s),
// with the second minimum taken outside |s - argmin| < theta / sqrt(gamma).
struct DriftedMinProblem {
    double gamma = 0.0;
    double g_horizon = 0.0;
    std::function<double(double)> b_fn;   // near 1 on the window
    std::function<double(double)> d_fn;   // near gamma * s on the window
    double theta = 0.5;

    void validate() const;

    struct Diagnostics {
        double sqrt_gamma_g = 0.0;    // should be large (>= 10)
        double sup_b_dev = 0.0;       // sup |1 - b|
        double sup_d_dev = 0.0;       // sup |1 - d/(gamma s)|
    };
    [[nodiscard]] Diagnostics diagnostics(std::size_t probe_points = 256) const;
};

struct EmptyWindowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

// n_{1/2} measure of excursions dipping below d: (pi/2) sin(pi d)/sin(pi/2 - pi d).
double excursion_rate_below(double d);

// Density of the excursion-minimum measure: derivative of the above,
// (pi^2/2) sec^2(pi d); tends to pi^2/2 as d -> 0.
double excursion_density(double d);

// ---------------------------------------------------------------------------
// Samplers and minimizers
// ---------------------------------------------------------------------------

// Exact draw of (M0, v0*, M0*) from the homogeneous triangle model at the
// given intensity. Uses nested triangular layers, so the minimum and the
// second minimum are exact rather than truncated.
MinResult sample_triangle_model(double rate, RandomSource& rng);

// Minimum of a + gamma*u/2 over points with u in [window_lo, window_hi].
// Deterministic; ties broken toward smaller u. Throws EmptyWindowError when
// no point falls inside the window.
MinResult ppp_min(double gamma, std::span<const PppPoint> points, double window_lo,
                  double window_hi);

// Minimum of b(s) K_s + d(s) over a stored taboo path restricted to
// [0, g_horizon], plus the second minimum outside the theta-ball. Uses the
// path's sampled within-step minima when present.
MinResult drifted_taboo_min(const DriftedMinProblem& problem, const taboo::TabooPath& path);

// ---------------------------------------------------------------------------
// Streaming sampler for the canonical problem b == 1, d(s) = gamma s.
//
// Runs its own taboo path with near-boundary step refinement and stops as
// soon as gamma*s exceeds the incumbent minimum plus the tracking margin;
// later times cannot improve either minimum, so the result is exact for the
// infinite-horizon problem truncated at g_horizon.
// ---------------------------------------------------------------------------

struct DriftedMinStreamConfig {
    double gamma = 1e-4;
    double g_horizon = 0.0;        // 0 means 10/gamma
    double theta = 0.5;
    double start = 0.5;
    double coarse_step = 5e-4;     // grid Euler step (near-boundary substeps are internal)
    double refine_theta = 0.02;    // substep rule dt <= refine_theta * m^2
    double second_margin = 4.0;    // track candidates within margin*sqrt(gamma) of the minimum
};

struct DriftedMinSample {
    double min_value = 0.0;
    double argmin = 0.0;
    double second_min = 0.0;       // +inf when beyond min_value + margin*sqrt(gamma)
    double stop_time = 0.0;
    std::uint64_t steps = 0;
};

DriftedMinSample sample_drifted_min_stream(const DriftedMinStreamConfig& cfg, RandomSource rng);

} // namespace bbmlab::excursion
