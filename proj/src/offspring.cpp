#include "bbmlab/offspring.hpp"

#include <cmath>
#include <stdexcept>

namespace bbmlab::bbm {

OffspringLaw OffspringLaw::from_probs(std::vector<double> probs) {
    if (probs.empty()) throw std::invalid_argument("OffspringLaw: empty support");
    double total = 0.0, mean = 0.0, second = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        if (probs[k] < 0.0) throw std::invalid_argument("OffspringLaw: negative probability");
        total += probs[k];
        mean += static_cast<double>(k) * probs[k];
        second += static_cast<double>(k) * static_cast<double>(k) * probs[k];
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw std::invalid_argument("OffspringLaw: probabilities must sum to 1");
    const double m = mean - 1.0;
    if (!(m > 0.0)) throw std::invalid_argument("OffspringLaw: mean must exceed 1 (m > 0)");

    OffspringLaw law;
    law.probs_ = std::move(probs);
    law.m_ = m;
    law.beta_ = 1.0 / (2.0 * m);
    law.size_biased_mean_ = second / mean;

    law.cdf_.resize(law.probs_.size());
    law.size_biased_cdf_.resize(law.probs_.size());
    double c = 0.0, cs = 0.0;
    for (std::size_t k = 0; k < law.probs_.size(); ++k) {
        c += law.probs_[k];
        cs += static_cast<double>(k) * law.probs_[k] / mean;
        law.cdf_[k] = c;
        law.size_biased_cdf_[k] = cs;
    }
    law.cdf_.back() = 1.0;
    law.size_biased_cdf_.back() = 1.0;
    return law;
}

OffspringLaw OffspringLaw::binary() { return from_probs({0.0, 0.0, 1.0}); }

double OffspringLaw::pgf(double s) const noexcept {
    double value = 0.0;
    double power = 1.0;
    for (double p : probs_) {
        value += p * power;
        power *= s;
    }
    return value;
}

double OffspringLaw::extinction_probability() const {
    double q = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double next = pgf(q);
        if (std::fabs(next - q) < 1e-15) return next;
        q = next;
    }
    return q;
}

int OffspringLaw::sample(RandomSource& rng) const noexcept {
    const double u = rng.uniform();
    for (std::size_t k = 0; k < cdf_.size(); ++k)
        if (u < cdf_[k]) return static_cast<int>(k);
    return static_cast<int>(cdf_.size() - 1);
}

int OffspringLaw::sample_size_biased(RandomSource& rng) const noexcept {
    const double u = rng.uniform();
    for (std::size_t k = 0; k < size_biased_cdf_.size(); ++k)
        if (u < size_biased_cdf_[k]) return static_cast<int>(k);
    return static_cast<int>(size_biased_cdf_.size() - 1);
}

} // namespace bbmlab::bbm
