#ifndef GCR_CVAR_HPP
#define GCR_CVAR_HPP

#include <span>
#include <vector>

#include "gcr/distribution.hpp"

namespace gcr {

enum class CvarForm { Cost, Payoff };

/// Exact CVaR via the variational formula scanned over a finite eta grid.
/// Cost form:   min_eta  eta + (1-alpha)^{-1} E[max(X - eta, 0)]
/// Payoff form: max_eta  eta - alpha^{-1}     E[max(eta - X, 0)]
/// The optimum always sits at a support value, so the default grid is the
/// support itself; an explicit grid overrides it.
inline double cvar_variational(const FiniteDistribution& dist, std::span<const double> values, double alpha,
                               CvarForm form, std::span<const double> eta_grid = {}) {
    detail::require(alpha > 0.0 && alpha < 1.0, "cvar_variational: alpha must lie in (0,1)");
    detail::require(!dist.support.empty(), "cvar_variational: empty support");
    detail::require(static_cast<int>(values.size()) == dist.num_outcomes(), "cvar_variational: length mismatch");

    std::vector<double> default_grid;
    if (eta_grid.empty()) {
        default_grid.reserve(dist.support.size());
        for (int i : dist.support) default_grid.push_back(values[static_cast<size_t>(i)]);
        eta_grid = default_grid;
    }

    if (form == CvarForm::Cost) {
        const double inv = 1.0 / (1.0 - alpha);
        double best = infeasible();
        for (double eta : eta_grid) {
            double excess = 0.0;
            for (int i : dist.support)
                excess += dist.probs[static_cast<size_t>(i)] * std::max(values[static_cast<size_t>(i)] - eta, 0.0);
            best = std::min(best, eta + inv * excess);
        }
        return best;
    }
    const double inv = 1.0 / alpha;
    double best = -infeasible();
    for (double eta : eta_grid) {
        double deficit = 0.0;
        for (int i : dist.support)
            deficit += dist.probs[static_cast<size_t>(i)] * std::max(eta - values[static_cast<size_t>(i)], 0.0);
        best = std::max(best, eta - inv * deficit);
    }
    return best;
}

/// CVaR of a cost with `mass` as the worst-tail probability weight
/// (mass -> 1 recovers the expectation, mass -> 0 the essential supremum).
/// The adversarial shortfall recursions parameterize risk by tail mass.
inline double cvar_cost_tail_mass(const FiniteDistribution& dist, std::span<const double> values, double mass) {
    detail::require(mass > 0.0 && mass <= 1.0, "cvar_cost_tail_mass: mass must lie in (0,1]");
    if (mass == 1.0) return expectation(dist, values);
    return cvar_variational(dist, values, 1.0 - mass, CvarForm::Cost);
}

/// CVaR of a payoff averaged over its worst `mass` tail.
inline double cvar_payoff_tail_mass(const FiniteDistribution& dist, std::span<const double> values, double mass) {
    detail::require(mass > 0.0 && mass <= 1.0, "cvar_payoff_tail_mass: mass must lie in (0,1]");
    if (mass == 1.0) return expectation(dist, values);
    return cvar_variational(dist, values, mass, CvarForm::Payoff);
}

} // namespace gcr

#endif // GCR_CVAR_HPP
