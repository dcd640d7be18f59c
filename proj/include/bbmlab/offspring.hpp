// offspring.hpp
//
// Finite-support offspring law with the critical normalization beta = 1/(2m),
// plus the size-biased variant that drives branching along the spine.

#pragma once

#include <vector>

#include "bbmlab/rng.hpp"

namespace bbmlab::bbm {

class OffspringLaw {
public:
    // probs[k] = p_k for k = 0..K. Requires sum p_k = 1 (within 1e-12) and
    // mean m + 1 with m > 0; beta is set to 1/(2m).
    static OffspringLaw from_probs(std::vector<double> probs);

    // p_2 = 1: m = 1, beta = 1/2.
    static OffspringLaw binary();

    [[nodiscard]] const std::vector<double>& probs() const noexcept { return probs_; }
    [[nodiscard]] double mean_minus_one() const noexcept { return m_; }
    [[nodiscard]] double branch_rate() const noexcept { return beta_; }

    // Mean of the size-biased law, sum k^2 p_k / (m+1). Finite by construction.
    [[nodiscard]] double size_biased_mean() const noexcept { return size_biased_mean_; }

    // Probability generating function sum p_k s^k.
    [[nodiscard]] double pgf(double s) const noexcept;

    // Minimal fixed point of the pgf; extinction probability of the embedded
    // Galton-Watson process. Diagnostic only.
    [[nodiscard]] double extinction_probability() const;

    [[nodiscard]] int sample(RandomSource& rng) const noexcept;

    // k with probability k p_k / (m+1); always >= 1.
    [[nodiscard]] int sample_size_biased(RandomSource& rng) const noexcept;

private:
    OffspringLaw() = default;

    std::vector<double> probs_;
    std::vector<double> cdf_;
    std::vector<double> size_biased_cdf_;
    double m_ = 0.0;
    double beta_ = 0.0;
    double size_biased_mean_ = 0.0;
};

} // namespace bbmlab::bbm
