#ifndef GCR_DISTRIBUTION_HPP
#define GCR_DISTRIBUTION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gcr/common.hpp"

namespace gcr {

/// Probability mass function over outcome indices 0..n-1. Outcomes with zero
/// probability stay in `probs` but are omitted from `support`.
struct FiniteDistribution {
    std::vector<double> probs;
    std::vector<int> support; // indices with probs[i] > 0

    int num_outcomes() const { return static_cast<int>(probs.size()); }

    double prob(int outcome) const { return probs[static_cast<size_t>(outcome)]; }
};

inline FiniteDistribution make_distribution(std::span<const double> weights) {
    if (weights.empty()) throw validation_error("make_distribution: no weights given");
    double total = 0.0;
    for (size_t i = 0; i < weights.size(); ++i) {
        const double w = weights[i];
        if (!std::isfinite(w))
            throw validation_error("make_distribution: non-finite weight at index " + std::to_string(i));
        if (w < 0.0)
            throw validation_error("make_distribution: negative weight at index " + std::to_string(i));
        total += w;
    }
    if (total <= 0.0) throw validation_error("make_distribution: degenerate distribution (all weights zero)");

    FiniteDistribution d;
    d.probs.resize(weights.size());
    for (size_t i = 0; i < weights.size(); ++i) {
        d.probs[i] = weights[i] / total;
        if (d.probs[i] > 0.0) d.support.push_back(static_cast<int>(i));
    }
    return d;
}

inline FiniteDistribution make_distribution(std::initializer_list<double> weights) {
    return make_distribution(std::span<const double>(weights.begin(), weights.size()));
}

/// Sum of probs[i] * values[i] over the support. Skipping zero-probability
/// outcomes keeps 0 * infeasible() out of the sum (measure-zero events don't
/// contribute, even to an infinite premium).
inline double expectation(const FiniteDistribution& dist, std::span<const double> values) {
    if (static_cast<int>(values.size()) != dist.num_outcomes())
        throw validation_error("expectation: values length " + std::to_string(values.size()) +
                               " != outcome count " + std::to_string(dist.probs.size()));
    double acc = 0.0;
    for (int i : dist.support) acc += dist.probs[static_cast<size_t>(i)] * values[static_cast<size_t>(i)];
    return acc;
}

/// Demand-style pmf: normal density evaluated at the integers 0..max_support,
/// renormalized. `CdfBins` instead assigns each integer the probability mass
/// of the surrounding unit interval.
enum class PmfMode { Density, CdfBins };

inline FiniteDistribution truncated_gaussian_pmf(double mean, double variance, int max_support,
                                                 PmfMode mode = PmfMode::Density) {
    if (!(variance > 0.0)) throw validation_error("truncated_gaussian_pmf: variance must be > 0");
    if (max_support < 0) throw validation_error("truncated_gaussian_pmf: max_support must be >= 0");
    std::vector<double> w(static_cast<size_t>(max_support) + 1);
    const double sigma = std::sqrt(variance);
    for (int k = 0; k <= max_support; ++k) {
        if (mode == PmfMode::Density) {
            const double u = (k - mean) / sigma;
            w[static_cast<size_t>(k)] = std::exp(-0.5 * u * u);
        } else {
            auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - mean) / (sigma * std::numbers::sqrt2)); };
            const double lo = (k == 0) ? -std::numeric_limits<double>::infinity() : k - 0.5;
            const double hi = (k == max_support) ? std::numeric_limits<double>::infinity() : k + 0.5;
            const double plo = std::isinf(lo) ? 0.0 : cdf(lo);
            const double phi = std::isinf(hi) ? 1.0 : cdf(hi);
            w[static_cast<size_t>(k)] = phi - plo;
        }
    }
    return make_distribution(w);
}

/// Deterministic uniform double in [0,1) from a 64-bit generator state.
/// Avoids std::uniform_real_distribution, whose output is
/// implementation-defined; artifacts must be byte-stable across runs.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    int next_index(int n) { return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n)); }

private:
    std::uint64_t state_;
};

inline int sample_outcome(const FiniteDistribution& dist, SplitMix64& rng) {
    const double u = rng.next_unit();
    double acc = 0.0;
    int last = dist.support.empty() ? 0 : dist.support.back();
    for (int i : dist.support) {
        acc += dist.probs[static_cast<size_t>(i)];
        if (u < acc) return i;
    }
    return last;
}

} // namespace gcr

#endif // GCR_DISTRIBUTION_HPP
