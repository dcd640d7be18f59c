// taboo.hpp
//
// Brownian taboo process on (0,1): Brownian motion conditioned never to exit,
// i.e. the Doob h-transform of killed Brownian motion with h(x) = sin(pi x).
// The module provides
//   * the h-transform drift pi*cot(pi x) and an Euler-Maruyama stepper with
//     local-time and excursion bookkeeping,
//   * an exact spectral transition-density oracle (with an equivalent
//     method-of-images evaluation for short times),
//   * an inverse-CDF sampler driven by that oracle, and
//   * excursion decomposition below the level 1/2.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bbmlab/rng.hpp"

namespace bbmlab::taboo {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

struct TabooConfig {
    double start = 0.5;
    double step = 1e-4;               // Euler time discretization
    double horizon = 1.0;
    double boundary_guard = 1e-6;     // clamp distance from {0,1}; clamps are counted
    double local_time_band = 0.01;    // band half-width for the local-time estimator

    // The drift pi*cot(pi K) blows up like 1/m at distance m from a boundary,
    // so a grid step is integrated by internal substeps h <= refine_theta*m^2
    // whenever that is smaller than the remaining step; this keeps the
    // explicit scheme stable (drift*h << m) and makes guard clamps rare
    // events rather than an absorbing ping-pong. Grid-level outputs
    // (appended points, excursion records) are unaffected.
    double refine_theta = 0.02;

    void validate() const;
};

// One completed excursion below 1/2: (u, a) is a point of the excursion
// Poisson process, s_start/s_end approximate the inverse-local-time interval.
struct ExcursionRecord {
    double u = 0.0;        // local time at the last visit to 1/2 before the excursion
    double a = 0.0;        // excursion minimum, in (0, 1/2)
    double s_start = 0.0;
    double s_end = 0.0;
};

namespace detail {

// Incremental excursion tracker shared by the stored-path and streaming
// simulators. Head segments before the first visit to 1/2 and unfinished
// tail segments are not reported.
struct ExcursionTracker {
    bool seen_upper = false;
    bool open = false;
    double open_u = 0.0;
    double open_min = 0.0;
    double open_start = 0.0;

    std::optional<ExcursionRecord> observe(double t_before, double t_after, double k_before,
                                           double k_after, double step_min, double ell_at_entry);
};

struct TabooState {
    double time = 0.0;
    double k = 0.5;
    double local_time = 0.0;
    std::uint64_t clamp_events = 0;
    ExcursionTracker tracker;
};

struct StepOutcome {
    double k_after = 0.0;
    double step_min = 0.0;                      // sampled bridge minimum when below 1/2, else min of endpoints
    std::optional<ExcursionRecord> closed;
};

// Advance one Euler step of length dt; updates state in place.
StepOutcome advance(TabooState& state, const TabooConfig& cfg, double dt, RandomSource& rng);

} // namespace detail

// Discretized taboo trajectory with local-time accumulator and excursion
// records. step_mins[i] holds a sampled within-step minimum for the step
// times[i] -> times[i+1] whenever the step dips below 1/2 (exact given the
// endpoints; removes the O(sqrt(step)) bias of grid minima).
struct TabooPath {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> local_time;
    std::vector<double> step_mins;
    std::vector<ExcursionRecord> excursions;
    std::uint64_t clamp_events = 0;

    // internal stepping state kept in sync by step_taboo
    detail::TabooState state;

    static TabooPath start_at(double x);
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Drift of the taboo process: (log sin(pi x))' = pi * cot(pi x).
double taboo_drift(double x);

// Appends one Euler-Maruyama step K + drift*dt + sqrt(dt)*Z (dt = cfg.step),
// clamped to [guard, 1-guard], updating local time and excursion records.
void step_taboo(TabooPath& path, const TabooConfig& cfg, RandomSource& rng);

// Transition density q_u(x, y) of the taboo process via the killed-Brownian
// eigenexpansion under the h-transform, truncated at `terms` terms:
//   q_u(x,y) = e^{pi^2 u/2} (sin(pi y)/sin(pi x)) * 2 sum_k e^{-k^2 pi^2 u/2}
//              sin(k pi x) sin(k pi y).
double taboo_transition_density(double x, double y, double u, int terms);

// Upper bound on the truncation error of the series above: the tail is
// dominated geometrically, |tail| <= 2 e^{pi^2 u/2} / sin(pi x)
//   * e^{-(K+1)^2 pi^2 u/2} / (1 - e^{-(K+1) pi^2 u}).
double taboo_transition_tail_bound(double x, double u, int terms);

// Same density through the reflection (method-of-images) representation of
// the killed kernel; converges fast for small u. Dual route to the series.
double taboo_transition_density_image(double x, double y, double u);

// Tabulated-CDF sampler for q_u(x, .). Construction tabulates the CDF on a
// fine grid (windowed around x for small u); sampling is an inverse-CDF
// lookup. Tabulation error stays below 1e-6.
class TabooTransitionSampler {
public:
    TabooTransitionSampler(double x, double u, std::size_t grid_panels = 4096);

    double sample(RandomSource& rng) const;
    [[nodiscard]] double cdf(double y) const;

private:
    std::vector<double> grid_;
    std::vector<double> cdf_;
};

// Draws y ~ q_u(x, .). For u below 0.01 the draw composes two exact half
// steps (Chapman-Kolmogorov), which keeps each CDF tabulation
// well-conditioned.
double sample_taboo_exact(double x, double u, RandomSource& rng);

// Rebuilds the excursion records of a stored path from its arrays. Uses
// step_mins when present, grid values otherwise. Excursions shorter than one
// step are dropped (grid resolution limit).
std::vector<ExcursionRecord> decompose_excursions(const TabooPath& path);

// ---------------------------------------------------------------------------
// Streaming simulation (no path storage); used by long-horizon experiments.
// ---------------------------------------------------------------------------

class TabooStream {
public:
    TabooStream(const TabooConfig& cfg, RandomSource rng);

    // One Euler step of cfg.step; returns a record when an excursion closes.
    std::optional<ExcursionRecord> step() { return step_dt(cfg_.step); }

    // One Euler step of explicit length dt (adaptive refinements).
    std::optional<ExcursionRecord> step_dt(double dt);

    [[nodiscard]] double time() const noexcept { return state_.time; }
    [[nodiscard]] double k() const noexcept { return state_.k; }
    [[nodiscard]] double local_time() const noexcept { return state_.local_time; }
    [[nodiscard]] double last_step_min() const noexcept { return last_step_min_; }
    [[nodiscard]] std::uint64_t clamp_events() const noexcept { return state_.clamp_events; }

private:
    TabooConfig cfg_;
    RandomSource rng_;
    detail::TabooState state_;
    double last_step_min_ = 0.5;
};

// Stationary density of the taboo process, p(x) = 2 sin^2(pi x).
double stationary_density(double x);

// CDF of the stationary density, x - sin(2 pi x)/(2 pi).
double stationary_cdf(double x);

} // namespace bbmlab::taboo
