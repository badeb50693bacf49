#ifndef GCR_FRONTIER_HPP
#define GCR_FRONTIER_HPP

#include <memory>
#include <span>
#include <vector>

#include "gcr/info_state.hpp"

namespace gcr {

/// Allowed (disbursement, auxiliary) decision pairs at one (t, y). The solver
/// scans the full product; `disbursements` is sorted ascending so tie-breaks
/// are deterministic.
struct DecisionGrid {
    std::vector<double> disbursements{0.0};
    std::vector<AuxDecision> auxiliaries{AuxDecision{}};
};

/// Read access to the period-(t+1) premium table as a frontier step consumes
/// it. `at(xi)` evaluates at the model's transition image for outcome xi,
/// already composed with g_t. `at_aux(xi, ...)` evaluates at outcome xi's
/// successor state with the augmenting coordinates overridden; adversarial
/// steps use it to probe the table at perturbed risk levels or budgets.
class NextPremiums {
public:
    /// Flat per-outcome premiums; aux probing unavailable.
    explicit NextPremiums(std::span<const double> values) : flat_(values) {}

    /// Table-backed: full probing. `next_states` caches f_t(s, a, .).
    NextPremiums(const InfoStateSpace& space, std::span<const double> next_row, std::span<const int> next_states,
                 int t, const InfoState& y, int action, double z, const AuxDecision& aux)
        : flat_(), space_(&space), next_row_(next_row), next_states_(next_states), t_(t), y_(&y), action_(action),
          z_(z), aux_(&aux) {}

    double at(int xi) const {
        if (!flat_.empty() || space_ == nullptr) return flat_[static_cast<size_t>(xi)];
        const InfoState raw = space_->apply_transition(t_, *y_, action_, z_, *aux_, xi);
        return space_->value_at(t_ + 1, raw, next_row_);
    }

    double at_aux(int xi, double aux0) const {
        const InfoState raw{next_states_[static_cast<size_t>(xi)], {aux0, 0.0}};
        return space_->value_at(t_ + 1, raw, next_row_);
    }

    double at_aux2(int xi, double aux0, double aux1) const {
        const InfoState raw{next_states_[static_cast<size_t>(xi)], {aux0, aux1}};
        return space_->value_at(t_ + 1, raw, next_row_);
    }

    bool supports_aux_probe() const { return space_ != nullptr; }

    /// Opaque index identifying the successor mapping f_t(s, a, .), stable
    /// within a period; period-context caches key on it. -1 in flat mode.
    int context_key(int num_actions) const { return space_ == nullptr ? -1 : y_->state * num_actions + action_; }

    /// Caches composed values so at() skips the transition; installed by the
    /// solver when g_t ignores the decision pair.
    void set_composed_cache(std::span<const double> values) { flat_ = values; }

private:
    std::span<const double> flat_;
    const InfoStateSpace* space_ = nullptr;
    std::span<const double> next_row_{};
    std::span<const int> next_states_{};
    int t_ = 0;
    const InfoState* y_ = nullptr;
    int action_ = 0;
    double z_ = 0.0;
    const AuxDecision* aux_ = nullptr;
};

/// One model's compressed one-step risk frontier. Implementations are pure
/// and immutable; they see payoff and premium distributions but never the
/// state dynamics. `min_premium` must be nonincreasing in the payoffs and
/// nondecreasing in the next premiums, pointwise.
class RiskFrontierStep {
public:
    virtual ~RiskFrontierStep() = default;

    /// Immutable per-period scratch built from the read-only next-value row;
    /// lets wealth-indexed steps turn the inner decision scan into table
    /// lookups. Optional: min_premium must accept a null context.
    struct PeriodContext {
        virtual ~PeriodContext() = default;
    };

    virtual std::unique_ptr<const PeriodContext> prepare_period(int t, const InfoStateSpace& space,
                                                                const MdpModel& model,
                                                                std::span<const double> next_row) const {
        (void)t;
        (void)space;
        (void)model;
        (void)next_row;
        return nullptr;
    }

    /// Least phi with ([X|y], z, phi) acceptable given the next premiums;
    /// infeasible() when the constraint system admits none.
    virtual double min_premium(int t, const InfoState& y, std::span<const double> payoff_by_outcome, double z,
                               const AuxDecision& aux, const NextPremiums& next, const PeriodContext* ctx) const = 0;

    virtual DecisionGrid decision_grid(int t, const InfoState& y) const {
        (void)t;
        (void)y;
        return DecisionGrid{};
    }

    /// Phi_{T+1}; infeasible() encodes the indicator terminal premium.
    virtual double terminal_premium(const InfoState& y) const {
        (void)y;
        return 0.0;
    }

    /// Wealth-constrained action sets (orders capped by cash on hand).
    virtual bool action_feasible(int t, const InfoState& y, int a) const {
        (void)t;
        (void)y;
        (void)a;
        return true;
    }

    /// False when g_t ignores (z, aux); the solver then reuses one successor
    /// evaluation across the whole decision grid.
    virtual bool decisions_affect_transition() const { return true; }
};

using FrontierStepPtr = std::shared_ptr<const RiskFrontierStep>;

/// Per-period premium tables phi_t(y) for t = 0..T, plus the terminal row.
struct PremiumSchedule {
    std::vector<std::vector<double>> premiums; // [t][grid index], t = 0..T+1 (last row terminal)

    double at(int t, size_t y_index) const { return premiums[static_cast<size_t>(t)][y_index]; }
};

/// Stage premium from explicit per-outcome next premiums; the caller has
/// already composed them with g_t. Adversarial steps that probe varied
/// coordinates need table access and reject the flat form.
inline double min_stage_premium(const RiskFrontierStep& step, int t, const InfoState& y,
                                std::span<const double> payoff_by_outcome, double z, const AuxDecision& aux,
                                std::span<const double> next_premiums) {
    for (double x : payoff_by_outcome)
        detail::require(!std::isnan(x), "min_stage_premium: NaN payoff");
    for (double v : next_premiums)
        detail::require(!std::isnan(v), "min_stage_premium: NaN next premium");
    return step.min_premium(t, y, payoff_by_outcome, z, aux, NextPremiums(next_premiums), nullptr);
}

} // namespace gcr

#endif // GCR_FRONTIER_HPP
