// bbm.hpp
//
// Event-driven branching Brownian motion with drift -1, branching rate
// beta = 1/(2m) and absorption at the origin.
//
// Between events a particle advances by Gaussian increments with mean -dt
// and variance dt; absorption inside a step is decided by the exact
// Brownian-bridge correction (kill with probability exp(-2ab/dt) given
// surviving endpoints a, b > 0), so single-particle propagation is unbiased
// for any step size. Branch times are drawn exactly from the exponential
// clock and processed as events between grid points; dt only limits the
// resolution of envelope records and death times.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bbmlab/offspring.hpp"
#include "bbmlab/rng.hpp"

namespace bbmlab::bbm {

struct ResourceCapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientSampleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Ulam-Harris labelled particle; labels are only materialized when
// BbmConfig::track_labels is set (they are costly at large populations).
struct Particle {
    std::vector<std::uint32_t> label;
    double position = 0.0;
    double born_at = 0.0;
};

struct BbmConfig {
    double dt = 1e-3;
    double horizon = 0.0;                       // required > 0
    std::uint64_t population_cap = 1000000;
    std::vector<double> checkpoint_times;       // strictly increasing, within [0, horizon]
    bool track_envelope = false;
    bool track_labels = false;
    bool capture_final_positions = false;
    double z_horizon = 0.0;                     // > 0 enables Z/Z' tracking against L_{z_horizon}(.)
    double time_offset = 0.0;                   // global time of this run's local time zero

    void validate() const;
};

struct BbmCheckpoint {
    double s = 0.0;
    double z = 0.0;
    double zprime = 0.0;
    double v = 0.0;
    double max_position = 0.0;
    std::uint64_t population = 0;
};

struct BbmRunResult {
    std::optional<double> extinction_time;          // nullopt: censored at horizon
    std::vector<std::pair<double, double>> max_envelope;
    double all_time_max = 0.0;
    double argmax_time = 0.0;
    std::vector<BbmCheckpoint> checkpoints;
    std::vector<double> final_positions;            // when capture_final_positions
    std::vector<Particle> final_particles;          // when track_labels as well
    std::uint64_t peak_population = 0;
    std::uint64_t branch_count = 0;
};

class BbmEngine {
public:
    BbmEngine(OffspringLaw law, BbmConfig cfg);

    BbmRunResult run(std::span<const double> initial_positions, RandomSource& rng) const;
    BbmRunResult run_single(double x, RandomSource& rng) const;

    [[nodiscard]] const OffspringLaw& law() const noexcept { return law_; }
    [[nodiscard]] const BbmConfig& config() const noexcept { return cfg_; }

private:
    OffspringLaw law_;
    BbmConfig cfg_;
};

// Spec-level convenience wrapper: full result with envelope tracking.
BbmRunResult simulate_bbm(double x, const OffspringLaw& law, double horizon, double dt,
                          RandomSource& rng);

// ---------------------------------------------------------------------------
// Functionals
// ---------------------------------------------------------------------------

// V = sum x e^x over the population (the Lemma-7 martingale evaluated at a
// configuration).
double v_functional(std::span<const double> positions);

// z_t(x, s) = L_t(s) sin(pi x / L_t(s)) e^{x - L_t(s)} on [0, L_t(s)], else 0.
double z_term(double x, double s, double t);

struct ZPair {
    double z = 0.0;
    double zprime = 0.0;
};

// Z sums z_t over positions; Z' restricts to particles whose ancestral path
// stayed inside [0, L_t(r)] for all r <= s (per-particle flags maintained by
// the engine when z tracking is enabled).
ZPair z_functionals(std::span<const double> positions, std::span<const std::uint8_t> in_band,
                    double s, double t);

// Single-particle absorbed survival for drift -1 started at x:
// P_x(tau_0 > s) = Phi((x-s)/sqrt(s)) - e^{2x} Phi((-x-s)/sqrt(s)).
// Unit-test oracle for the bridge absorption.
double absorbed_survival_probability(double x, double s);

// ---------------------------------------------------------------------------
// Monte Carlo checks
// ---------------------------------------------------------------------------

struct ManyToOneResult {
    double mc_estimate = 0.0;
    double closed_form = 0.0;
    double ci = 0.0;            // 3-sigma Monte Carlo half width
};

// E_x[sum_{u in N(s)} e^{X_u(s)}] against the many-to-one closed form
// e^x (2 Phi(x/sqrt(s)) - 1): branching factor e^{beta m s} = e^{s/2} times
// the Girsanov reweighting of the drift.
ManyToOneResult many_to_one_check(double x, double s, std::uint64_t replicas, RandomSource& rng,
                                  const OffspringLaw& law = OffspringLaw::binary(),
                                  double dt = 1e-3);

struct ConditionalSurvivalResult {
    double estimate = 0.0;
    double ci = 0.0;
    std::uint64_t successes = 0;
    std::uint64_t attempts = 0;
};

// Rejection estimate of P_x(zeta > t + v t^{2/3} | zeta > t): runs are
// simulated to t, survivors are continued for v t^{2/3}. Throws
// InsufficientSampleError when fewer than min_successes runs survive to t.
ConditionalSurvivalResult conditional_survival(double x, double t, double v,
                                               std::uint64_t replicas,
                                               std::uint64_t min_successes, RandomSource& rng,
                                               const OffspringLaw& law = OffspringLaw::binary(),
                                               double dt = 2e-2);

} // namespace bbmlab::bbm
