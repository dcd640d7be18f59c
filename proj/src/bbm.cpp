#include "bbmlab/bbm.hpp"

#include <algorithm>
#include <cmath>

#include "bbmlab/math_util.hpp"

namespace bbmlab::bbm {

namespace {
constexpr double kPi = 3.14159265358979323846;

double barrier_level(double t, double s) {
    return std::cbrt(1.5 * kPi * kPi) * std::cbrt(t - s);
}
} // namespace

void BbmConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("BbmConfig: dt must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("BbmConfig: horizon must be positive");
    if (population_cap == 0) throw std::invalid_argument("BbmConfig: population_cap must be positive");
    for (std::size_t i = 0; i < checkpoint_times.size(); ++i) {
        if (checkpoint_times[i] < 0.0 || checkpoint_times[i] > horizon)
            throw std::invalid_argument("BbmConfig: checkpoint outside [0, horizon]");
        if (i > 0 && checkpoint_times[i] <= checkpoint_times[i - 1])
            throw std::invalid_argument("BbmConfig: checkpoints must be strictly increasing");
    }
    if (z_horizon > 0.0 && time_offset + horizon >= z_horizon)
        throw std::invalid_argument("BbmConfig: z tracking requires horizon before z_horizon");
}

BbmEngine::BbmEngine(OffspringLaw law, BbmConfig cfg) : law_(std::move(law)), cfg_(std::move(cfg)) {
    cfg_.validate();
}

namespace {

struct Node {
    double pos;
    double t;
    double branch_at;
    bool inband;
    std::int32_t label = -1;
};

} // namespace

BbmRunResult BbmEngine::run(std::span<const double> initial_positions, RandomSource& rng) const {
    if (initial_positions.empty()) throw std::domain_error("BbmEngine::run: empty initial population");
    for (double x : initial_positions)
        if (!(x > 0.0)) throw std::domain_error("BbmEngine::run: initial position must be positive");
    if (initial_positions.size() > cfg_.population_cap)
        throw ResourceCapError("BbmEngine::run: initial population exceeds cap");

    const double beta = law_.branch_rate();
    const bool track_z = cfg_.z_horizon > 0.0;

    BbmRunResult result;
    std::vector<std::vector<std::uint32_t>> labels;

    std::vector<Node> survivors;
    survivors.reserve(initial_positions.size());
    for (std::size_t i = 0; i < initial_positions.size(); ++i) {
        Node n;
        n.pos = initial_positions[i];
        n.t = 0.0;
        n.branch_at = rng.exponential(beta);
        n.inband = !track_z || n.pos <= barrier_level(cfg_.z_horizon, cfg_.time_offset);
        if (cfg_.track_labels) {
            labels.push_back({static_cast<std::uint32_t>(i + 1)});
            n.label = static_cast<std::int32_t>(labels.size() - 1);
        }
        survivors.push_back(n);
        if (initial_positions[i] > result.all_time_max) {
            result.all_time_max = initial_positions[i];
            result.argmax_time = 0.0;
        }
    }

    std::uint64_t alive = survivors.size();
    result.peak_population = alive;
    double last_death = 0.0;

    std::vector<Node> stack;
    std::vector<Node> next;
    std::size_t checkpoint_idx = 0;
    while (checkpoint_idx < cfg_.checkpoint_times.size() && cfg_.checkpoint_times[checkpoint_idx] <= 0.0)
        ++checkpoint_idx;   // a checkpoint at 0 would describe the initial condition; skip

    double cur = 0.0;
    while (cur < cfg_.horizon && alive > 0) {
        double seg_end = std::min(cur + cfg_.dt, cfg_.horizon);
        const bool at_checkpoint = checkpoint_idx < cfg_.checkpoint_times.size() &&
                                   cfg_.checkpoint_times[checkpoint_idx] <= seg_end;
        if (at_checkpoint) seg_end = cfg_.checkpoint_times[checkpoint_idx];

        stack.clear();
        stack.assign(survivors.rbegin(), survivors.rend());
        next.clear();

        while (!stack.empty()) {
            Node n = stack.back();
            stack.pop_back();
            bool dead = false;
            while (!dead && n.t < seg_end) {
                const bool branches_now = n.branch_at <= seg_end;
                const double t_next = branches_now ? n.branch_at : seg_end;
                const double delta = t_next - n.t;
                if (delta > 0.0) {
                    const double a = n.pos;
                    const double b = a - delta + std::sqrt(delta) * rng.normal();
                    if (b <= 0.0) {
                        dead = true;
                    } else {
                        const double e2 = 2.0 * a * b;
                        if (e2 <= 40.0 * delta && rng.uniform() < std::exp(-e2 / delta)) {
                            dead = true;
                        } else {
                            n.pos = b;
                            if (b > result.all_time_max) {
                                result.all_time_max = b;
                                result.argmax_time = t_next;
                            }
                            if (track_z && n.inband &&
                                b > barrier_level(cfg_.z_horizon, cfg_.time_offset + t_next))
                                n.inband = false;
                        }
                    }
                }
                n.t = t_next;
                if (dead) {
                    last_death = std::max(last_death, t_next);
                    --alive;
                    break;
                }
                if (branches_now) {
                    const int k = law_.sample(rng);
                    ++result.branch_count;
                    if (k == 0) {
                        dead = true;
                        last_death = std::max(last_death, n.t);
                        --alive;
                        break;
                    }
                    if (alive + static_cast<std::uint64_t>(k - 1) > cfg_.population_cap)
                        throw ResourceCapError("BbmEngine::run: population cap exceeded");
                    alive += static_cast<std::uint64_t>(k - 1);
                    result.peak_population = std::max(result.peak_population, alive);
                    for (int c = 1; c < k; ++c) {
                        Node child = n;
                        child.branch_at = n.t + rng.exponential(beta);
                        if (cfg_.track_labels) {
                            auto lab = labels[static_cast<std::size_t>(n.label)];
                            lab.push_back(static_cast<std::uint32_t>(c));
                            labels.push_back(std::move(lab));
                            child.label = static_cast<std::int32_t>(labels.size() - 1);
                        }
                        stack.push_back(child);
                    }
                    if (cfg_.track_labels)
                        labels[static_cast<std::size_t>(n.label)].push_back(
                            static_cast<std::uint32_t>(k));
                    n.branch_at = n.t + rng.exponential(beta);
                }
            }
            if (!dead) next.push_back(n);
        }

        survivors.swap(next);
        cur = seg_end;

        if (cfg_.track_envelope && !survivors.empty()) {
            double m = 0.0;
            for (const auto& n : survivors) m = std::max(m, n.pos);
            result.max_envelope.emplace_back(cur, m);
        }
        if (at_checkpoint) {
            BbmCheckpoint cp;
            cp.s = cur;
            cp.population = survivors.size();
            for (const auto& n : survivors) {
                cp.max_position = std::max(cp.max_position, n.pos);
                cp.v += n.pos * std::exp(n.pos);
                if (track_z) {
                    const double zt = z_term(n.pos, cfg_.time_offset + cur, cfg_.z_horizon);
                    cp.z += zt;
                    if (n.inband) cp.zprime += zt;
                }
            }
            result.checkpoints.push_back(cp);
            ++checkpoint_idx;
        }
    }

    if (alive == 0) result.extinction_time = last_death;
    if (cfg_.capture_final_positions && alive > 0) {
        result.final_positions.reserve(survivors.size());
        for (const auto& n : survivors) result.final_positions.push_back(n.pos);
        if (cfg_.track_labels) {
            for (const auto& n : survivors) {
                Particle p;
                p.label = labels[static_cast<std::size_t>(n.label)];
                p.position = n.pos;
                result.final_particles.push_back(std::move(p));
            }
        }
    }
    return result;
}

BbmRunResult BbmEngine::run_single(double x, RandomSource& rng) const {
    const double init[1] = {x};
    return run(init, rng);
}

BbmRunResult simulate_bbm(double x, const OffspringLaw& law, double horizon, double dt,
                          RandomSource& rng) {
    if (!(x > 0.0)) throw std::domain_error("simulate_bbm: x must be positive");
    BbmConfig cfg;
    cfg.dt = dt;
    cfg.horizon = horizon;
    cfg.track_envelope = true;
    BbmEngine engine(law, cfg);
    return engine.run_single(x, rng);
}

double v_functional(std::span<const double> positions) {
    double v = 0.0;
    for (double x : positions) {
        if (x < 0.0) throw std::domain_error("v_functional: negative position");
        v += x * std::exp(x);
    }
    return v;
}

double z_term(double x, double s, double t) {
    if (s >= t) throw std::domain_error("z_term: s must be below the horizon t");
    const double level = barrier_level(t, s);
    if (x < 0.0 || x > level) return 0.0;
    return level * std::sin(kPi * x / level) * std::exp(x - level);
}

ZPair z_functionals(std::span<const double> positions, std::span<const std::uint8_t> in_band,
                    double s, double t) {
    if (!in_band.empty() && in_band.size() != positions.size())
        throw std::invalid_argument("z_functionals: flag/position size mismatch");
    ZPair out;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const double zt = z_term(positions[i], s, t);
        out.z += zt;
        if (in_band.empty() || in_band[i]) out.zprime += zt;
    }
    return out;
}

double absorbed_survival_probability(double x, double s) {
    if (!(x > 0.0) || !(s > 0.0))
        throw std::domain_error("absorbed_survival_probability: x, s must be positive");
    const double rs = std::sqrt(s);
    return normal_cdf((x - s) / rs) - std::exp(2.0 * x) * normal_cdf((-x - s) / rs);
}

ManyToOneResult many_to_one_check(double x, double s, std::uint64_t replicas, RandomSource& rng,
                                  const OffspringLaw& law, double dt) {
    if (!(x > 0.0) || !(s > 0.0))
        throw std::domain_error("many_to_one_check: x, s must be positive");
    BbmConfig cfg;
    cfg.dt = dt;
    cfg.horizon = s;
    cfg.capture_final_positions = true;
    BbmEngine engine(law, cfg);

    double sum = 0.0, sum2 = 0.0;
    for (std::uint64_t i = 0; i < replicas; ++i) {
        auto sub = rng.substream(i);
        const auto res = engine.run_single(x, sub);
        double w = 0.0;
        for (double p : res.final_positions) w += std::exp(p);
        sum += w;
        sum2 += w * w;
    }
    const double n = static_cast<double>(replicas);
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    ManyToOneResult out;
    out.mc_estimate = mean;
    out.closed_form = std::exp(x) * (2.0 * normal_cdf(x / std::sqrt(s)) - 1.0);
    out.ci = 3.0 * std::sqrt(var / n);
    return out;
}

ConditionalSurvivalResult conditional_survival(double x, double t, double v,
                                               std::uint64_t replicas,
                                               std::uint64_t min_successes, RandomSource& rng,
                                               const OffspringLaw& law, double dt) {
    if (!(x > 0.0) || !(t > 0.0) || !(v > 0.0))
        throw std::domain_error("conditional_survival: x, t, v must be positive");

    BbmConfig stage1;
    stage1.dt = dt;
    stage1.horizon = t;
    stage1.capture_final_positions = true;
    BbmEngine engine1(law, stage1);

    std::vector<std::vector<double>> conditioned;
    for (std::uint64_t i = 0; i < replicas; ++i) {
        auto sub = rng.substream(i);
        auto res = engine1.run_single(x, sub);
        if (!res.extinction_time) conditioned.push_back(std::move(res.final_positions));
    }
    if (conditioned.size() < min_successes)
        throw InsufficientSampleError("conditional_survival: too few runs with zeta > t");

    BbmConfig stage2;
    stage2.dt = dt;
    stage2.horizon = v * std::cbrt(t * t);
    BbmEngine engine2(law, stage2);

    std::uint64_t still_alive = 0;
    for (std::size_t i = 0; i < conditioned.size(); ++i) {
        auto sub = rng.substream(replicas + i);
        const auto res = engine2.run(conditioned[i], sub);
        if (!res.extinction_time) ++still_alive;
    }
    ConditionalSurvivalResult out;
    out.successes = conditioned.size();
    out.attempts = replicas;
    out.estimate = static_cast<double>(still_alive) / static_cast<double>(conditioned.size());
    out.ci = 3.0 * std::sqrt(out.estimate * (1.0 - out.estimate) /
                             static_cast<double>(conditioned.size()));
    return out;
}

} // namespace bbmlab::bbm
