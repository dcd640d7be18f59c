// spine.hpp
//
// Branching Brownian motion with spine: the spine follows L_t(s) K_{tau(s)}
// for a taboo process K started at x/L_t(0), branches at the accelerated rate
// (m+1) beta with size-biased offspring counts, and the non-spine offspring
// spawn independent absorbed BBMs from the branch position.
//
// Subtree handling has two modes:
//   * full   - every subtree is simulated by the bbm engine (verbatim
//              construction; feasible for small horizons only, since a
//              subtree rooted at height z costs ~ e^{z/2} particle-time),
//   * excess - only subtree maxima are materialized, sampled exactly in law
//              from the max-excess profile (MaxExcessLaw) above
//              z_free_threshold and by direct simulation below it. Lazy
//              Bernoulli draws skip subtrees that cannot affect the running
//              maximum, without changing its distribution.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bbmlab/bbm.hpp"
#include "bbmlab/excursion.hpp"
#include "bbmlab/geometry.hpp"
#include "bbmlab/max_excess.hpp"
#include "bbmlab/rng.hpp"

namespace bbmlab::spine {

struct BranchEvent {
    double s = 0.0;        // real time
    double z = 0.0;        // spine position at the event
    int offspring = 0;     // size-biased count k; k-1 subtrees spawn
};

struct SpineConfig {
    double x = 0.0;                    // start position in (0, L_t(0))
    double t = 0.0;                    // geometry horizon
    bbm::OffspringLaw law = bbm::OffspringLaw::binary();
    double b_exponent = 0.9;           // spine horizon t^b, 5/6 < b < 1
    double horizon_override = 0.0;     // when > 0, simulate to this real time instead
    double tau_step = 1e-4;            // Euler step on the tau clock
    double refine_theta = 0.02;        // internal substep rule near the boundaries

    enum class SubtreeMode { full, excess } mode = SubtreeMode::full;
    double subtree_dt = 1e-3;
    std::uint64_t population_cap = 1000000;
    double z_free_threshold = 8.0;     // excess mode: wave law above, direct sim below
    double skip_budget = 1e-3;         // total probability of missing a subtree record
    const bbm::MaxExcessLaw* excess_law = nullptr;   // required in excess mode

    bool capture_final = false;        // collect all positions at the spine horizon (full mode)
    bool keep_spine_samples = false;   // store a thinned (s, position) grid
    std::size_t spine_sample_stride = 64;

    void validate() const;
};

struct SpineRun {
    std::vector<std::pair<double, double>> spine_samples;   // (s, spine position)
    std::vector<BranchEvent> branch_events;
    std::vector<bbm::BbmRunResult> subtree_results;         // full mode only
    double all_time_max = 0.0;     // population maximum over [0, horizon]
    double argmax_time = 0.0;
    double spine_max = 0.0;        // maximum of the spine trajectory alone
    double spine_argmax = 0.0;
    std::uint64_t subtree_count = 0;
    std::uint64_t subtree_skipped = 0;   // excess mode: lazily skipped subtrees
    double spine_final = 0.0;
    std::vector<double> final_positions;   // capture_final: spine + subtree survivors
};

SpineRun simulate_spine_run(const SpineConfig& cfg, RandomSource& rng);

// Spine-only maxima through the drifted-minimum reduction: materializes the
// flipped taboo path on the tau grid and delegates to
// excursion::drifted_taboo_min with b(r) = L(tau^{-1}(r))/L_t, d = 1 - b.
struct SpineOnlyStats {
    double spine_max = 0.0;       // Mtilde
    double spine_argmax = 0.0;    // mtilde (real time)
    excursion::MinResult reduced; // the drifted-minimum view of the same path
};

SpineOnlyStats spine_only_statistics(const TimeGeometry& geom, double x, double b_exponent,
                                     double tau_step, RandomSource& rng, double theta = 0.5);

struct SpineGap {
    double max_gap = 0.0;      // population max minus spine max, >= 0
    double argmax_gap = 0.0;   // |argmax difference|
};

SpineGap spine_vs_population_gap(const SpineRun& run);

} // namespace bbmlab::spine
