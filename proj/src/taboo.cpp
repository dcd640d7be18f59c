#include "bbmlab/taboo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bbmlab/math_util.hpp"

namespace bbmlab::taboo {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kHalf = 0.5;
// below this duration the exact sampler composes two half steps
constexpr double kComposeBelow = 0.01;
// below this duration the CDF is tabulated on a window around x
constexpr double kWindowBelow = 0.045;
// image representation preferred up to here, spectral beyond
constexpr double kImageBelow = 0.25;
} // namespace

void TabooConfig::validate() const {
    if (!(start >= 0.0 && start <= 1.0)) throw std::invalid_argument("TabooConfig: start outside [0,1]");
    if (!(step > 0.0)) throw std::invalid_argument("TabooConfig: step must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("TabooConfig: horizon must be positive");
    if (!(boundary_guard > 0.0 && boundary_guard < 0.25))
        throw std::invalid_argument("TabooConfig: boundary_guard outside (0, 0.25)");
    if (!(local_time_band > 0.0 && local_time_band < 0.25))
        throw std::invalid_argument("TabooConfig: local_time_band outside (0, 0.25)");
}

double taboo_drift(double x) {
    if (!(x > 0.0 && x < 1.0)) throw std::domain_error("taboo_drift: x outside (0,1)");
    return kPi * std::cos(kPi * x) / std::sin(kPi * x);
}

double stationary_density(double x) {
    const double s = std::sin(kPi * x);
    return 2.0 * s * s;
}

double stationary_cdf(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return x - std::sin(2.0 * kPi * x) / (2.0 * kPi);
}

// ---------------------------------------------------------------------------
// Stepping
// ---------------------------------------------------------------------------

namespace detail {

std::optional<ExcursionRecord> ExcursionTracker::observe(double t_before, double t_after,
                                                         double k_before, double k_after,
                                                         double step_min, double ell_at_entry) {
    if (k_before >= kHalf) seen_upper = true;
    std::optional<ExcursionRecord> closed;
    if (open) {
        open_min = std::min(open_min, step_min);
        if (k_after >= kHalf) {
            closed = ExcursionRecord{open_u, open_min, open_start, t_after};
            open = false;
        }
    } else if (seen_upper && k_before >= kHalf && k_after < kHalf) {
        open = true;
        open_u = ell_at_entry;
        open_min = step_min;
        open_start = t_before;
    }
    if (k_after >= kHalf) seen_upper = true;
    return closed;
}

namespace {

// pi*cot(pi x) - 1/x, the smooth part of the taboo drift near 0; series form
// avoids the cancellation for small x.
double taboo_drift_gap(double x) {
    if (x < 0.2) {
        const double p2 = kPi * kPi;
        return -p2 * x / 3.0 * (1.0 + p2 * x * x / 15.0);
    }
    return kPi * std::cos(kPi * x) / std::sin(kPi * x) - 1.0 / x;
}

// Exact Bessel(3) transition from a over h: norm of a 3D Brownian increment.
// Matches the taboo dynamics near the boundary up to the smooth drift gap,
// which is compensated to first order.
double bessel3_step(double a, double h, RandomSource& rng) {
    const double rh = std::sqrt(h);
    const double w1 = a + rh * rng.normal();
    const double w2 = rh * rng.normal();
    const double w3 = rh * rng.normal();
    double b = std::sqrt(w1 * w1 + w2 * w2 + w3 * w3);
    b += h * taboo_drift_gap(0.5 * (a + b));
    return std::max(b, 1e-300);
}

// Exact minimum of the Bessel(3) bridge from a to b over h:
// P(min > z) = (1 - e^{-2(a-z)(b-z)/h}) / (1 - e^{-2ab/h}); always positive.
double bessel3_bridge_min(double a, double b, double h, RandomSource& rng) {
    const double p_reach = -std::expm1(-2.0 * a * b / h);
    const double c = -0.5 * h * std::log1p(-rng.uniform() * p_reach);
    const double d = a - b;
    return 0.5 * (a + b - std::sqrt(d * d + 4.0 * c));
}

} // namespace

StepOutcome advance(TabooState& state, const TabooConfig& cfg, double dt, RandomSource& rng) {
    constexpr double kSubstepFloor = 1e-10;
    constexpr double kBandCap = 0.12;
    const double band = std::min(kBandCap, 4.5 * std::sqrt(cfg.step));
    const double k0 = state.k;
    const double t0 = state.time;
    const double ell_entry = state.local_time;

    double k = k0;
    double remaining = dt;
    double step_min = k0;
    while (remaining > 0.0) {
        if (k < band) {
            // exact near-boundary move (lower side)
            const double h = std::min(remaining, 0.25 * band * band);
            const double next = bessel3_step(k, h, rng);
            step_min = std::min(step_min, bessel3_bridge_min(k, next, h, rng));
            k = next;
            remaining -= h;
            continue;
        }
        if (1.0 - k < band) {
            // mirrored near-boundary move; cannot produce the running minimum
            const double h = std::min(remaining, 0.25 * band * band);
            const double next = 1.0 - bessel3_step(1.0 - k, h, rng);
            step_min = std::min(step_min, std::min(k, next));
            k = next;
            remaining -= h;
            continue;
        }

        const double m = std::min(k, 1.0 - k);
        double h = remaining;
        const double stable = std::max(cfg.refine_theta * m * m, kSubstepFloor);
        if (stable < h) h = stable;

        if (std::fabs(k - kHalf) < cfg.local_time_band)
            state.local_time += h / (2.0 * cfg.local_time_band);

        double next = k + taboo_drift(k) * h + std::sqrt(h) * rng.normal();
        if (next < cfg.boundary_guard) {
            next = cfg.boundary_guard;
            ++state.clamp_events;
        } else if (next > 1.0 - cfg.boundary_guard) {
            next = 1.0 - cfg.boundary_guard;
            ++state.clamp_events;
        }
        if (k < kHalf || next < kHalf) {
            // exact bridge minimum given the endpoints; floors at the guard
            // since the taboo process itself never reaches the boundary
            const double bm = std::max(bridge_min_sample(k, next, h, rng), cfg.boundary_guard);
            step_min = std::min(step_min, bm);
        } else {
            step_min = std::min(step_min, std::min(k, next));
        }
        k = next;
        remaining -= h;
    }

    state.time = t0 + dt;
    state.k = k;
    StepOutcome out;
    out.k_after = k;
    out.step_min = step_min;
    out.closed = state.tracker.observe(t0, state.time, k0, k, step_min, ell_entry);
    return out;
}

} // namespace detail

TabooPath TabooPath::start_at(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("TabooPath::start_at: x outside [0,1]");
    TabooPath p;
    p.times.push_back(0.0);
    p.values.push_back(x);
    p.local_time.push_back(0.0);
    p.state.k = x;
    return p;
}

void step_taboo(TabooPath& path, const TabooConfig& cfg, RandomSource& rng) {
    cfg.validate();
    if (path.times.empty()) {
        path = TabooPath::start_at(cfg.start);
    }
    if (!(path.values.back() > 0.0 && path.values.back() < 1.0))
        throw std::domain_error("step_taboo: last value outside (0,1)");
    auto out = detail::advance(path.state, cfg, cfg.step, rng);
    path.times.push_back(path.state.time);
    path.values.push_back(out.k_after);
    path.local_time.push_back(path.state.local_time);
    path.step_mins.push_back(out.step_min);
    if (out.closed) path.excursions.push_back(*out.closed);
    path.clamp_events = path.state.clamp_events;
}

std::vector<ExcursionRecord> decompose_excursions(const TabooPath& path) {
    if (path.times.empty()) throw std::invalid_argument("decompose_excursions: empty path");
    const bool have_mins = path.step_mins.size() + 1 == path.times.size() && !path.step_mins.empty();
    detail::ExcursionTracker tracker;
    std::vector<ExcursionRecord> records;
    for (std::size_t i = 0; i + 1 < path.times.size(); ++i) {
        const double m = have_mins ? path.step_mins[i] : std::min(path.values[i], path.values[i + 1]);
        auto closed = tracker.observe(path.times[i], path.times[i + 1], path.values[i],
                                      path.values[i + 1], m, path.local_time[i]);
        if (closed) records.push_back(*closed);
    }
    return records;
}

// ---------------------------------------------------------------------------
// Transition density
// ---------------------------------------------------------------------------

double taboo_transition_density(double x, double y, double u, int terms) {
    if (!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0))
        throw std::domain_error("taboo_transition_density: x, y outside (0,1)");
    if (!(u > 0.0)) throw std::domain_error("taboo_transition_density: u must be positive");
    if (terms < 1) throw std::domain_error("taboo_transition_density: terms must be >= 1");
    // fold e^{pi^2 u / 2} into each term: exponent -(k^2 - 1) pi^2 u / 2 <= 0
    double sum = 0.0;
    for (int k = 1; k <= terms; ++k) {
        const double expo = -0.5 * (static_cast<double>(k) * k - 1.0) * kPi * kPi * u;
        if (expo < -745.0) break;
        sum += std::exp(expo) * std::sin(k * kPi * x) * std::sin(k * kPi * y);
    }
    const double q = 2.0 * sum * std::sin(kPi * y) / std::sin(kPi * x);
    return std::max(q, 0.0);
}

double taboo_transition_tail_bound(double x, double u, int terms) {
    if (!(x > 0.0 && x < 1.0)) throw std::domain_error("taboo_transition_tail_bound: x outside (0,1)");
    if (!(u > 0.0)) throw std::domain_error("taboo_transition_tail_bound: u must be positive");
    const double kp1 = static_cast<double>(terms) + 1.0;
    const double head = -0.5 * (kp1 * kp1 - 1.0) * kPi * kPi * u;
    const double ratio = 1.0 - std::exp(-kp1 * kPi * kPi * u);
    return 2.0 * std::exp(head) / (std::sin(kPi * x) * ratio);
}

double taboo_transition_density_image(double x, double y, double u) {
    if (!(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0))
        throw std::domain_error("taboo_transition_density_image: x, y outside (0,1)");
    if (!(u > 0.0)) throw std::domain_error("taboo_transition_density_image: u must be positive");
    // killed kernel by reflection: sum_n phi_u(y-x+2n) - phi_u(y+x+2n)
    const int nmax = static_cast<int>(std::ceil(0.5 * (std::sqrt(100.0 * u) + 2.0))) + 1;
    const double inv2u = 1.0 / (2.0 * u);
    const double norm = 1.0 / std::sqrt(2.0 * kPi * u);
    double p0 = 0.0;
    for (int n = -nmax; n <= nmax; ++n) {
        const double d1 = y - x + 2.0 * n;
        const double d2 = y + x + 2.0 * n;
        p0 += std::exp(-d1 * d1 * inv2u) - std::exp(-d2 * d2 * inv2u);
    }
    p0 *= norm;
    const double q = std::exp(0.5 * kPi * kPi * u) * (std::sin(kPi * y) / std::sin(kPi * x)) * p0;
    return std::max(q, 0.0);
}

// ---------------------------------------------------------------------------
// Exact sampler
// ---------------------------------------------------------------------------

TabooTransitionSampler::TabooTransitionSampler(double x, double u, std::size_t grid_panels) {
    if (!(x > 0.0 && x < 1.0)) throw std::domain_error("TabooTransitionSampler: x outside (0,1)");
    if (!(u > 0.0)) throw std::domain_error("TabooTransitionSampler: u must be positive");
    if (grid_panels < 16) grid_panels = 16;

    double lo = 0.0, hi = 1.0;
    if (u < kWindowBelow) {
        const double w = 10.0 * std::sqrt(u);
        lo = std::max(1e-12, x - w);
        hi = std::min(1.0 - 1e-12, x + w);
    }

    const bool use_image = u <= kImageBelow;
    int terms = 0;
    if (!use_image) {
        terms = static_cast<int>(std::ceil(std::sqrt(1.0 + 92.0 / (kPi * kPi * u)))) + 2;
    }
    auto density = [&](double y) {
        if (y <= 0.0 || y >= 1.0) return 0.0;
        return use_image ? taboo_transition_density_image(x, y, u)
                         : taboo_transition_density(x, y, u, terms);
    };

    const std::size_t n = grid_panels;
    grid_.resize(n + 1);
    cdf_.resize(n + 1);
    const double h = (hi - lo) / static_cast<double>(n);
    double prev_d = density(lo);
    grid_[0] = lo;
    cdf_[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double y = lo + h * static_cast<double>(i);
        const double d = density(y);
        grid_[i] = y;
        cdf_[i] = cdf_[i - 1] + 0.5 * h * (prev_d + d);
        prev_d = d;
    }
    const double total = cdf_[n];
    if (!(total > 0.0)) throw std::runtime_error("TabooTransitionSampler: zero mass on grid");
    for (auto& c : cdf_) c /= total;
    for (std::size_t i = 1; i <= n; ++i) cdf_[i] = std::max(cdf_[i], cdf_[i - 1]);
}

double TabooTransitionSampler::sample(RandomSource& rng) const {
    const double p = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), p);
    if (it == cdf_.begin()) return grid_.front();
    if (it == cdf_.end()) return grid_.back();
    const std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
    const double c0 = cdf_[i - 1], c1 = cdf_[i];
    const double f = c1 > c0 ? (p - c0) / (c1 - c0) : 0.5;
    return grid_[i - 1] + f * (grid_[i] - grid_[i - 1]);
}

double TabooTransitionSampler::cdf(double y) const {
    if (y <= grid_.front()) return 0.0;
    if (y >= grid_.back()) return 1.0;
    auto it = std::upper_bound(grid_.begin(), grid_.end(), y);
    const std::size_t i = static_cast<std::size_t>(it - grid_.begin());
    const double g0 = grid_[i - 1], g1 = grid_[i];
    const double f = (y - g0) / (g1 - g0);
    return cdf_[i - 1] + f * (cdf_[i] - cdf_[i - 1]);
}

double sample_taboo_exact(double x, double u, RandomSource& rng) {
    if (!(u > 0.0)) throw std::domain_error("sample_taboo_exact: u must be positive");
    if (u < kComposeBelow) {
        const double z = TabooTransitionSampler(x, 0.5 * u).sample(rng);
        return TabooTransitionSampler(z, 0.5 * u).sample(rng);
    }
    return TabooTransitionSampler(x, u).sample(rng);
}

// ---------------------------------------------------------------------------
// Streaming
// ---------------------------------------------------------------------------

TabooStream::TabooStream(const TabooConfig& cfg, RandomSource rng) : cfg_(cfg), rng_(rng) {
    cfg_.validate();
    state_.k = cfg_.start;
    last_step_min_ = cfg_.start;
}

std::optional<ExcursionRecord> TabooStream::step_dt(double dt) {
    auto out = detail::advance(state_, cfg_, dt, rng_);
    last_step_min_ = out.step_min;
    return out.closed;
}

} // namespace bbmlab::taboo
