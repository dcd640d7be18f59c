#include "bbmlab/spine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bbmlab/taboo.hpp"

namespace bbmlab::spine {

void SpineConfig::validate() const {
    if (!(t > 0.0)) throw std::invalid_argument("SpineConfig: t must be positive");
    if (!(b_exponent > 5.0 / 6.0 && b_exponent < 1.0))
        throw std::invalid_argument("SpineConfig: b_exponent outside (5/6, 1)");
    if (!(tau_step > 0.0)) throw std::invalid_argument("SpineConfig: tau_step must be positive");
    if (horizon_override < 0.0 || horizon_override >= t)
        if (horizon_override != 0.0)
            throw std::invalid_argument("SpineConfig: horizon_override outside (0, t)");
    if (mode == SubtreeMode::excess && excess_law == nullptr)
        throw std::invalid_argument("SpineConfig: excess mode requires excess_law");
    if (mode == SubtreeMode::excess && capture_final)
        throw std::invalid_argument("SpineConfig: capture_final requires full subtree mode");
}

namespace {

// Direct subtree simulation; returns (max, argmax local time) and optionally
// appends the survivors' positions.
bbm::BbmRunResult run_subtree(const SpineConfig& cfg, double z, double horizon,
                              RandomSource& rng) {
    bbm::BbmConfig bcfg;
    bcfg.dt = cfg.subtree_dt;
    bcfg.horizon = std::max(horizon, cfg.subtree_dt);
    bcfg.population_cap = cfg.population_cap;
    bcfg.capture_final_positions = cfg.capture_final;
    bbm::BbmEngine engine(cfg.law, bcfg);
    return engine.run_single(z, rng);
}

} // namespace

SpineRun simulate_spine_run(const SpineConfig& cfg, RandomSource& rng) {
    cfg.validate();
    const TimeGeometry geom(cfg.t);
    const double l0 = geom.L0();
    if (!(cfg.x > 0.0 && cfg.x < l0))
        throw std::domain_error("simulate_spine_run: x outside (0, L_t(0))");

    const double spine_horizon =
        cfg.horizon_override > 0.0 ? cfg.horizon_override : std::pow(cfg.t, cfg.b_exponent);
    const double tau_end = geom.tau(spine_horizon);

    auto spine_rng = rng.substream(1);
    auto branch_rng = rng.substream(2);
    auto subtree_rng = rng.substream(3);

    // branch schedule: Poisson process at the accelerated rate (m+1) beta
    const double accel_rate = (cfg.law.mean_minus_one() + 1.0) * cfg.law.branch_rate();
    std::vector<double> event_s, event_tau;
    {
        double s = branch_rng.exponential(accel_rate);
        while (s < spine_horizon) {
            event_s.push_back(s);
            event_tau.push_back(geom.tau(s));
            s += branch_rng.exponential(accel_rate);
        }
    }

    // simulate the flipped taboo path Kp = 1 - K so the spine maximum is the
    // drifted minimum of Kp; bridge step minima refine it below the grid
    taboo::TabooConfig tcfg;
    tcfg.start = 1.0 - cfg.x / l0;
    tcfg.step = cfg.tau_step;
    tcfg.horizon = tau_end;
    tcfg.refine_theta = cfg.refine_theta;
    taboo::TabooStream stream(tcfg, spine_rng);

    SpineRun run;
    run.branch_events.reserve(event_s.size());

    double best_v = 1.0 - cfg.x / l0;   // value of b*Kp + d at time 0 (b=1, d=0)
    double best_tau = 0.0;
    std::size_t next_event = 0;
    std::size_t steps_done = 0;

    while (true) {
        const double now = stream.time();
        if (next_event < event_tau.size() && now >= event_tau[next_event] - 1e-13) {
            const double s = event_s[next_event];
            const double z = geom.L(s) * (1.0 - stream.k());
            const int k = cfg.law.sample_size_biased(branch_rng);
            run.branch_events.push_back({s, z, k});
            ++next_event;
            continue;
        }
        if (now >= tau_end - 1e-13) break;

        double dtau = cfg.tau_step;
        if (next_event < event_tau.size()) dtau = std::min(dtau, event_tau[next_event] - now);
        dtau = std::min(dtau, tau_end - now);

        const double b = geom.L(geom.tau_inv(now)) / l0;
        stream.step_dt(dtau);
        const double v = b * stream.last_step_min() + (1.0 - b);
        if (v < best_v) {
            best_v = v;
            best_tau = now + 0.5 * dtau;
        }
        if (cfg.keep_spine_samples && (steps_done % cfg.spine_sample_stride) == 0) {
            const double s_here = geom.tau_inv(stream.time());
            run.spine_samples.emplace_back(s_here, geom.L(s_here) * (1.0 - stream.k()));
        }
        ++steps_done;
    }

    run.spine_max = l0 * (1.0 - best_v);
    run.spine_argmax = geom.tau_inv(std::min(best_tau, tau_end));
    run.spine_final = geom.L(spine_horizon) * (1.0 - stream.k());
    run.all_time_max = run.spine_max;
    run.argmax_time = run.spine_argmax;
    if (cfg.capture_final) run.final_positions.push_back(run.spine_final);

    // subtrees
    std::uint64_t total_children = 0;
    for (const auto& ev : run.branch_events)
        total_children += static_cast<std::uint64_t>(std::max(0, ev.offspring - 1));
    const double skip_eps = cfg.skip_budget / static_cast<double>(std::max<std::uint64_t>(1, total_children));

    std::uint64_t subtree_idx = 0;
    for (const auto& ev : run.branch_events) {
        for (int child = 1; child < ev.offspring; ++child) {
            auto child_rng = subtree_rng.substream(subtree_idx++);
            if (cfg.mode == SpineConfig::SubtreeMode::full) {
                auto res = run_subtree(cfg, ev.z, spine_horizon - ev.s, child_rng);
                ++run.subtree_count;
                if (res.all_time_max > run.all_time_max) {
                    run.all_time_max = res.all_time_max;
                    run.argmax_time = ev.s + res.argmax_time;
                }
                if (cfg.capture_final)
                    run.final_positions.insert(run.final_positions.end(),
                                               res.final_positions.begin(),
                                               res.final_positions.end());
                run.subtree_results.push_back(std::move(res));
                continue;
            }
            // excess mode: lazily sample only subtrees that can move the max;
            // the free-law survival bounds the absorbed one, so skipping when
            // it is below skip_eps misses a record with probability at most
            // skip_budget per run
            const double needed = run.all_time_max - ev.z;
            const double bound = cfg.excess_law->survival(std::max(needed, 0.0));
            if (bound < skip_eps) {
                ++run.subtree_skipped;
                continue;
            }
            ++run.subtree_count;
            if (ev.z >= cfg.z_free_threshold) {
                if (needed <= 0.0) {
                    const double e = cfg.excess_law->sample(child_rng);
                    if (ev.z + e > run.all_time_max) {
                        run.all_time_max = ev.z + e;
                        run.argmax_time = ev.s;
                    }
                } else if (child_rng.uniform_pos() <= bound) {
                    const double e = cfg.excess_law->sample_tail(needed, child_rng);
                    run.all_time_max = ev.z + e;
                    run.argmax_time = ev.s;
                }
            } else {
                // near the origin absorption matters; simulate directly
                const auto res = run_subtree(cfg, ev.z, spine_horizon - ev.s, child_rng);
                if (res.all_time_max > run.all_time_max) {
                    run.all_time_max = res.all_time_max;
                    run.argmax_time = ev.s + res.argmax_time;
                }
            }
        }
    }
    return run;
}

SpineOnlyStats spine_only_statistics(const TimeGeometry& geom, double x, double b_exponent,
                                     double tau_step, RandomSource& rng, double theta) {
    const double l0 = geom.L0();
    if (!(x > 0.0 && x < l0)) throw std::domain_error("spine_only_statistics: x outside (0, L_t)");
    if (!(b_exponent > 5.0 / 6.0 && b_exponent < 1.0))
        throw std::invalid_argument("spine_only_statistics: b_exponent outside (5/6, 1)");

    const double spine_horizon = std::pow(geom.horizon(), b_exponent);
    const double tau_end = geom.tau(spine_horizon);

    taboo::TabooConfig tcfg;
    tcfg.start = 1.0 - x / l0;
    tcfg.step = tau_step;
    tcfg.horizon = tau_end;

    auto path = taboo::TabooPath::start_at(tcfg.start);
    auto spine_rng = rng.substream(1);
    while (path.times.back() < tau_end) {
        taboo::step_taboo(path, tcfg, spine_rng);
    }

    excursion::DriftedMinProblem problem;
    problem.gamma = geom.gamma();
    problem.g_horizon = tau_end;
    problem.theta = theta;
    problem.b_fn = [&geom, l0](double r) { return geom.L(geom.tau_inv(r)) / l0; };
    problem.d_fn = [&geom, l0](double r) { return 1.0 - geom.L(geom.tau_inv(r)) / l0; };

    SpineOnlyStats out;
    out.reduced = excursion::drifted_taboo_min(problem, path);
    out.spine_max = l0 * (1.0 - out.reduced.min_value);
    out.spine_argmax = geom.tau_inv(std::min(out.reduced.argmin, tau_end));
    return out;
}

SpineGap spine_vs_population_gap(const SpineRun& run) {
    return {run.all_time_max - run.spine_max, std::fabs(run.argmax_time - run.spine_argmax)};
}

} // namespace bbmlab::spine
