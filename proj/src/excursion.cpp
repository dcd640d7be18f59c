#include "bbmlab/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bbmlab::excursion {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

void DriftedMinProblem::validate() const {
    if (!(gamma > 0.0)) throw std::domain_error("DriftedMinProblem: gamma must be positive");
    if (!(g_horizon > 0.0)) throw std::domain_error("DriftedMinProblem: g_horizon must be positive");
    if (!b_fn || !d_fn) throw std::invalid_argument("DriftedMinProblem: b_fn and d_fn required");
    if (!(theta > 0.0)) throw std::domain_error("DriftedMinProblem: theta must be positive");
}

DriftedMinProblem::Diagnostics DriftedMinProblem::diagnostics(std::size_t probe_points) const {
    validate();
    Diagnostics diag;
    diag.sqrt_gamma_g = std::sqrt(gamma) * g_horizon;
    for (std::size_t i = 1; i <= probe_points; ++i) {
        const double s = g_horizon * static_cast<double>(i) / static_cast<double>(probe_points);
        diag.sup_b_dev = std::max(diag.sup_b_dev, std::fabs(1.0 - b_fn(s)));
        diag.sup_d_dev = std::max(diag.sup_d_dev, std::fabs(1.0 - d_fn(s) / (gamma * s)));
    }
    return diag;
}

double excursion_rate_below(double d) {
    if (!(d > 0.0 && d < 0.5)) throw std::domain_error("excursion_rate_below: d outside (0, 1/2)");
    return 0.5 * kPi * std::sin(kPi * d) / std::sin(0.5 * kPi - kPi * d);
}

double excursion_density(double d) {
    if (!(d > 0.0 && d < 0.5)) throw std::domain_error("excursion_density: d outside (0, 1/2)");
    const double c = std::cos(kPi * d);
    return 0.5 * kPi * kPi / (c * c);
}

// ---------------------------------------------------------------------------
// Triangle model
// ---------------------------------------------------------------------------

namespace {

// Uniform point in the annulus C_hi \ C_lo of the level sets
// C_t = {(v, a): a + v/2 <= t}: level^2 is uniform on [lo^2, hi^2] and the
// position along the level segment is uniform.
PppPoint sample_annulus_point(double lo, double hi, RandomSource& rng) {
    const double level = std::sqrt(lo * lo + (hi * hi - lo * lo) * rng.uniform());
    const double frac = rng.uniform();
    return {2.0 * level * frac, level * (1.0 - frac)};   // (v, a)
}

} // namespace

MinResult sample_triangle_model(double rate, RandomSource& rng) {
    if (!(rate > 0.0)) throw std::domain_error("sample_triangle_model: rate must be positive");

    std::vector<PppPoint> pts;
    double lo = 0.0, hi = 1.0;
    for (;;) {
        const auto n = rng.poisson(rate * (hi * hi - lo * lo));
        for (std::uint64_t i = 0; i < n; ++i) pts.push_back(sample_annulus_point(lo, hi, rng));
        if (!pts.empty()) break;
        lo = hi;
        hi *= 2.0;
    }
    // every point with level below hi is in hand, so the two smallest levels
    // among pts (plus possibly deeper layers for the runner-up) are exact
    std::size_t best = 0;
    double best_v = kInf;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double v = pts[i].a + 0.5 * pts[i].u;
        if (v < best_v || (v == best_v && pts[i].u < pts[best].u)) {
            best_v = v;
            best = i;
        }
    }
    double second = kInf;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i == best) continue;
        second = std::min(second, pts[i].a + 0.5 * pts[i].u);
    }
    while (!std::isfinite(second)) {
        lo = hi;
        hi *= 2.0;
        const auto n = rng.poisson(rate * (hi * hi - lo * lo));
        for (std::uint64_t i = 0; i < n; ++i) {
            const auto p = sample_annulus_point(lo, hi, rng);
            second = std::min(second, p.a + 0.5 * p.u);
        }
    }
    return {best_v, pts[best].u, second};
}

MinResult ppp_min(double gamma, std::span<const PppPoint> points, double window_lo,
                  double window_hi) {
    if (!(gamma > 0.0)) throw std::domain_error("ppp_min: gamma must be positive");
    if (!(window_lo <= window_hi)) throw std::domain_error("ppp_min: window_lo > window_hi");
    bool found = false;
    double best_v = kInf, best_u = kInf, second = kInf;
    for (const auto& p : points) {
        if (p.u < window_lo || p.u > window_hi) continue;
        const double v = p.a + 0.5 * gamma * p.u;
        if (!found || v < best_v || (v == best_v && p.u < best_u)) {
            if (found) second = std::min(second, best_v);
            best_v = v;
            best_u = p.u;
            found = true;
        } else {
            second = std::min(second, v);
        }
    }
    if (!found) throw EmptyWindowError("ppp_min: no point in window");
    return {best_v, best_u, second};
}

// ---------------------------------------------------------------------------
// Drifted minima over taboo paths
// ---------------------------------------------------------------------------

MinResult drifted_taboo_min(const DriftedMinProblem& problem, const taboo::TabooPath& path) {
    problem.validate();
    if (path.times.empty() || path.times.back() + 1e-12 < problem.g_horizon)
        throw std::invalid_argument("drifted_taboo_min: path shorter than g_horizon");

    const bool have_mins = path.step_mins.size() + 1 == path.times.size() && !path.step_mins.empty();
    std::vector<double> ss, vv;
    if (have_mins) {
        ss.reserve(path.step_mins.size());
        vv.reserve(path.step_mins.size());
        for (std::size_t i = 0; i < path.step_mins.size(); ++i) {
            const double s = path.times[i];
            if (s > problem.g_horizon) break;
            ss.push_back(s);
            vv.push_back(problem.b_fn(s) * path.step_mins[i] + problem.d_fn(s));
        }
    } else {
        for (std::size_t i = 0; i < path.times.size(); ++i) {
            const double s = path.times[i];
            if (s > problem.g_horizon) break;
            ss.push_back(s);
            vv.push_back(problem.b_fn(s) * path.values[i] + problem.d_fn(s));
        }
    }
    if (ss.empty()) throw std::invalid_argument("drifted_taboo_min: no grid point inside [0, g_horizon]");

    std::size_t best = 0;
    for (std::size_t i = 1; i < ss.size(); ++i)
        if (vv[i] < vv[best]) best = i;

    const double radius = problem.theta / std::sqrt(problem.gamma);
    double second = kInf;
    for (std::size_t i = 0; i < ss.size(); ++i) {
        if (std::fabs(ss[i] - ss[best]) < radius) continue;
        second = std::min(second, vv[i]);
    }
    return {vv[best], ss[best], second};
}

DriftedMinSample sample_drifted_min_stream(const DriftedMinStreamConfig& cfg, RandomSource rng) {
    if (!(cfg.gamma > 0.0)) throw std::domain_error("sample_drifted_min_stream: gamma must be positive");
    const double horizon = cfg.g_horizon > 0.0 ? cfg.g_horizon : 10.0 / cfg.gamma;
    const double sqrt_gamma = std::sqrt(cfg.gamma);
    const double margin = cfg.second_margin * sqrt_gamma;

    taboo::TabooConfig tcfg;
    tcfg.start = cfg.start;
    tcfg.step = cfg.coarse_step;
    tcfg.horizon = horizon;
    tcfg.refine_theta = cfg.refine_theta;
    taboo::TabooStream stream(tcfg, rng);

    struct Cand {
        double s, v;
    };
    std::vector<Cand> cands;
    double best_v = kInf, best_s = 0.0;
    std::uint64_t steps = 0;

    auto prune = [&]() {
        std::erase_if(cands, [&](const Cand& c) { return c.v > best_v + margin; });
    };

    while (stream.time() < horizon) {
        const double dt = std::min(cfg.coarse_step, horizon - stream.time());
        const double s_mid = stream.time() + 0.5 * dt;
        stream.step_dt(dt);
        ++steps;

        const double v = stream.last_step_min() + cfg.gamma * s_mid;
        if (v < best_v) {
            best_v = v;
            best_s = s_mid;
        }
        if (v <= best_v + margin) {
            cands.push_back({s_mid, v});
            if (cands.size() > 8192) prune();
        }
        // no later time can produce a value below best_v + margin once the
        // drift alone exceeds it
        if (cfg.gamma * stream.time() > best_v + margin) break;
    }

    double second = kInf;
    const double radius = cfg.theta / sqrt_gamma;
    for (const auto& c : cands) {
        if (std::fabs(c.s - best_s) < radius) continue;
        second = std::min(second, c.v);
    }
    return {best_v, best_s, second, stream.time(), steps};
}

} // namespace bbmlab::excursion
