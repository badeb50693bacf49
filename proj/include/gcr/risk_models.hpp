#ifndef GCR_RISK_MODELS_HPP
#define GCR_RISK_MODELS_HPP

#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "gcr/cvar.hpp"
#include "gcr/frontier.hpp"

namespace gcr {

// ---------------------------------------------------------------------------
// Acceptance sets

/// Per-period acceptance test on the conditional total income [X_t | s_t] + z.
/// All kinds are translation-invariant in z, so feasibility reduces to a
/// per-(t,s,a) disbursement threshold.
struct AcceptanceSpec {
    enum class Kind { None, ExpectationFloor, PointwiseFloor, CvarFloor };
    Kind kind = Kind::None;
    double level = 0.0;
    double alpha = 0.5; // worst-tail mass for the CVaR floor

    static AcceptanceSpec none() { return {}; }
    static AcceptanceSpec expectation_floor(double b) { return {Kind::ExpectationFloor, b, 0.5}; }
    static AcceptanceSpec pointwise_floor(double b) { return {Kind::PointwiseFloor, b, 0.5}; }
    static AcceptanceSpec cvar_floor(double alpha, double b) { return {Kind::CvarFloor, b, alpha}; }

    /// Least shift making the income acceptable; -infinity when unconstrained.
    double threshold(const FiniteDistribution& dist, std::span<const double> values) const {
        switch (kind) {
        case Kind::None:
            return -infeasible();
        case Kind::ExpectationFloor:
            return level - expectation(dist, values);
        case Kind::PointwiseFloor: {
            double lo = infeasible();
            for (int i : dist.support) lo = std::min(lo, values[static_cast<size_t>(i)]);
            return level - lo;
        }
        case Kind::CvarFloor:
            return level - cvar_payoff_tail_mass(dist, values, alpha);
        }
        return -infeasible();
    }

    bool accepts(const FiniteDistribution& dist, std::span<const double> values, double shift) const {
        return shift >= threshold(dist, values) - 1e-9;
    }
};

/// One spec per period, or a single spec applied to every period.
class AcceptanceSchedule {
public:
    AcceptanceSchedule() = default;
    AcceptanceSchedule(AcceptanceSpec uniform) : specs_{std::move(uniform)} {} // NOLINT(google-explicit-constructor)
    explicit AcceptanceSchedule(std::vector<AcceptanceSpec> per_period) : specs_(std::move(per_period)) {}

    const AcceptanceSpec& at(int t) const {
        static const AcceptanceSpec kNone{};
        if (specs_.empty()) return kNone;
        if (specs_.size() == 1) return specs_[0];
        return specs_[static_cast<size_t>(t)];
    }

    void validate(int horizon) const {
        detail::require(specs_.size() <= 1 || static_cast<int>(specs_.size()) == horizon + 1,
                        "AcceptanceSchedule: need one spec, or one per period");
    }

private:
    std::vector<AcceptanceSpec> specs_;
};

/// Candidate per-outcome density multipliers for adversarial recursions.
struct DensityGrid {
    std::vector<double> multipliers;

    void validate() const {
        detail::require(!multipliers.empty(), "DensityGrid: empty");
        bool has_one = false;
        for (double m : multipliers) {
            detail::require(m >= 0.0, "DensityGrid: multipliers must be >= 0");
            if (std::abs(m - 1.0) < 1e-12) has_one = true;
        }
        detail::require(has_one, "DensityGrid: must contain 1 (the unperturbed density)");
    }
};

/// One-step coherent risk measure for the nested composition.
struct OneStepRiskSpec {
    enum class Kind { Expectation, Cvar };
    Kind kind = Kind::Expectation;
    double alpha = 0.5; // worst-tail mass of payoffs

    static OneStepRiskSpec expectation() { return {Kind::Expectation, 0.5}; }
    static OneStepRiskSpec cvar(double alpha) { return {Kind::Cvar, alpha}; }

    void validate() const {
        detail::require(alpha > 0.0 && alpha <= 1.0, "OneStepRiskSpec: alpha must lie in (0,1]");
    }

    /// rho(D) = min{ c : D + c acceptable }; equals -CVaR of D for payoffs.
    double evaluate(const FiniteDistribution& dist, std::span<const double> values) const {
        if (kind == Kind::Expectation) return -gcr::expectation(dist, values);
        return -cvar_payoff_tail_mass(dist, values, alpha);
    }
};

/// A frontier step and its information-state recipe, instantiated for one
/// underlying model.
struct GcrProblem {
    FrontierStepPtr step;
    InfoStateSpace space;
};

namespace detail {

/// Expectation over the support with infeasible short-circuit; zero-probability
/// outcomes never touch the (possibly infinite) integrand.
template <typename F>
double support_expectation(const FiniteDistribution& dist, F&& f) {
    double acc = 0.0;
    for (int i : dist.support) {
        const double v = f(i);
        if (is_infeasible(v)) return infeasible();
        acc += dist.probs[static_cast<size_t>(i)] * v;
    }
    return acc;
}

/// Acceptance feasibility as a disbursement floor, precomputed per (t, s, a)
/// when the caller can identify the cell, evaluated directly otherwise (flat
/// unit-test mode).
class AcceptanceGate {
public:
    AcceptanceGate(const MdpModel& model, AcceptanceSchedule schedule) : schedule_(std::move(schedule)) {
        stride_ = static_cast<size_t>(model.num_states) * model.num_actions;
        thresholds_.resize(static_cast<size_t>(model.horizon + 1) * stride_);
        std::vector<double> payoffs(static_cast<size_t>(model.num_outcomes));
        for (int t = 0; t <= model.horizon; ++t)
            for (int s = 0; s < model.num_states; ++s)
                for (int a = 0; a < model.num_actions; ++a) {
                    for (int xi = 0; xi < model.num_outcomes; ++xi)
                        payoffs[static_cast<size_t>(xi)] = model.payoff(t, s, a, xi);
                    thresholds_[static_cast<size_t>(t) * stride_ +
                                static_cast<size_t>(s) * model.num_actions + a] =
                        schedule_.at(t).threshold(model.noise(t), payoffs);
                }
    }

    bool passes(int t, int key, const FiniteDistribution& dist, std::span<const double> payoffs, double shift) const {
        const double thr = key >= 0 ? thresholds_[static_cast<size_t>(t) * stride_ + static_cast<size_t>(key)]
                                    : schedule_.at(t).threshold(dist, payoffs);
        return shift >= thr - 1e-9;
    }

private:
    AcceptanceSchedule schedule_;
    std::vector<double> thresholds_;
    size_t stride_ = 1;
};

inline void require_sorted_grid(const std::vector<double>& grid, const char* what, bool nonnegative) {
    gcr::detail::require(!grid.empty(), std::string(what) + ": empty grid");
    for (size_t i = 0; i < grid.size(); ++i) {
        if (nonnegative) gcr::detail::require(grid[i] >= 0.0, std::string(what) + ": entries must be >= 0");
        if (i > 0) gcr::detail::require(grid[i] > grid[i - 1], std::string(what) + ": entries must be increasing");
    }
}

} // namespace detail

// ---------------------------------------------------------------------------
// Original-state-space models

/// Negative expected total reward: phi_t = E[Phi_{t+1} - X_t], terminal 0.
class RiskNeutralStep final : public RiskFrontierStep {
public:
    explicit RiskNeutralStep(std::vector<FiniteDistribution> noise) : noise_(std::move(noise)) {}

    double min_premium(int t, const InfoState&, std::span<const double> payoffs, double, const AuxDecision&,
                       const NextPremiums& next, const PeriodContext*) const override {
        return detail::support_expectation(noise_[static_cast<size_t>(t)],
                                           [&](int i) { return next.at(i) - payoffs[static_cast<size_t>(i)]; });
    }

    bool decisions_affect_transition() const override { return false; }

private:
    std::vector<FiniteDistribution> noise_;
};

inline GcrProblem build_risk_neutral(const MdpModel& model) {
    auto m = std::make_shared<const MdpModel>(model);
    InfoStateSpace space = InfoStateSpace::uniform_axes(
        model.num_states, model.horizon, {}, InfoState{model.initial_state, {}},
        [m](int t, const InfoState& y, int a, double, const AuxDecision&, int xi) {
            return InfoState{m->transition(t, y.state, a, xi), {}};
        });
    return {std::make_shared<RiskNeutralStep>(model.noise_dists), std::move(space)};
}

/// Exponential-moment recursion: phi_t = E[exp(-gamma X_t) Phi_{t+1}],
/// terminal 1. The solved value v converts to the entropic risk via
/// entropic_risk_from_value.
class EntropicStep final : public RiskFrontierStep {
public:
    EntropicStep(std::vector<FiniteDistribution> noise, double gamma) : noise_(std::move(noise)), gamma_(gamma) {}

    double min_premium(int t, const InfoState&, std::span<const double> payoffs, double, const AuxDecision&,
                       const NextPremiums& next, const PeriodContext*) const override {
        return detail::support_expectation(noise_[static_cast<size_t>(t)], [&](int i) {
            const double v = next.at(i);
            if (is_infeasible(v)) return v;
            return std::exp(-gamma_ * payoffs[static_cast<size_t>(i)]) * v;
        });
    }

    double terminal_premium(const InfoState&) const override { return 1.0; }
    bool decisions_affect_transition() const override { return false; }

private:
    std::vector<FiniteDistribution> noise_;
    double gamma_;
};

inline GcrProblem build_entropic(const MdpModel& model, double gamma) {
    detail::require(gamma > 0.0, "build_entropic: gamma must be > 0");
    auto m = std::make_shared<const MdpModel>(model);
    InfoStateSpace space = InfoStateSpace::uniform_axes(
        model.num_states, model.horizon, {}, InfoState{model.initial_state, {}},
        [m](int t, const InfoState& y, int a, double, const AuxDecision&, int xi) {
            return InfoState{m->transition(t, y.state, a, xi), {}};
        });
    return {std::make_shared<EntropicStep>(model.noise_dists, gamma), std::move(space)};
}

inline double entropic_risk_from_value(double value, double gamma) {
    detail::require(gamma > 0.0 && value > 0.0, "entropic_risk_from_value: need gamma > 0 and value > 0");
    return -std::log(value) / gamma;
}

/// Nested one-step coherent risk measures: phi_t = rho_t(X_t - Phi_{t+1}),
/// closed form, no disbursement decision.
class NestedStep final : public RiskFrontierStep {
public:
    NestedStep(std::vector<FiniteDistribution> noise, std::vector<OneStepRiskSpec> specs)
        : noise_(std::move(noise)), specs_(std::move(specs)) {}

    double min_premium(int t, const InfoState&, std::span<const double> payoffs, double, const AuxDecision&,
                       const NextPremiums& next, const PeriodContext*) const override {
        const FiniteDistribution& dist = noise_[static_cast<size_t>(t)];
        std::vector<double> diff(payoffs.size(), 0.0);
        for (int i : dist.support) {
            const double v = next.at(i);
            if (is_infeasible(v)) return infeasible();
            diff[static_cast<size_t>(i)] = payoffs[static_cast<size_t>(i)] - v;
        }
        const OneStepRiskSpec& spec = specs_.size() == 1 ? specs_[0] : specs_[static_cast<size_t>(t)];
        return spec.evaluate(dist, diff);
    }

    bool decisions_affect_transition() const override { return false; }

private:
    std::vector<FiniteDistribution> noise_;
    std::vector<OneStepRiskSpec> specs_;
};

inline GcrProblem build_nested(const MdpModel& model, std::vector<OneStepRiskSpec> specs) {
    detail::require(specs.size() == 1 || static_cast<int>(specs.size()) == model.horizon + 1,
                    "build_nested: need one spec, or one per period");
    for (const auto& s : specs) s.validate();
    auto m = std::make_shared<const MdpModel>(model);
    InfoStateSpace space = InfoStateSpace::uniform_axes(
        model.num_states, model.horizon, {}, InfoState{model.initial_state, {}},
        [m](int t, const InfoState& y, int a, double, const AuxDecision&, int xi) {
            return InfoState{m->transition(t, y.state, a, xi), {}};
        });
    return {std::make_shared<NestedStep>(model.noise_dists, std::move(specs)), std::move(space)};
}

// ---------------------------------------------------------------------------
// Wealth-based models

/// Standard capital requirement: endowment decision at t = 0, wealth runs down
/// by disbursements, terminal indicator on nonnegative wealth (or a soft
/// linear penalty). Interior premiums are bare expectations of the successor
/// premium; acceptance constrains the income each period.
class StandardCrStep final : public RiskFrontierStep {
public:
    StandardCrStep(const MdpModel& model, const AcceptanceSchedule& acceptance, AuxAxis wealth_axis,
                   std::vector<double> z_grid, std::optional<double> soft_beta)
        : noise_(model.noise_dists), gate_(model, acceptance), num_actions_(model.num_actions),
          wealth_axis_(std::move(wealth_axis)), z_grid_(std::move(z_grid)), soft_beta_(soft_beta) {
        if (soft_beta_.has_value())
            detail::require(*soft_beta_ > 1.0, "build_standard_cr: soft penalty beta must exceed 1");
    }

    struct WealthContext final : PeriodContext {
        std::vector<double> expected; // [s*A + a][wealth index]
        size_t wealth_points = 0;
    };

    std::unique_ptr<const PeriodContext> prepare_period(int t, const InfoStateSpace& space, const MdpModel& model,
                                                        std::span<const double> next_row) const override {
        if (wealth_axis_.interpolate) return nullptr; // table is keyed on snapped points only
        auto ctx = std::make_unique<WealthContext>();
        const size_t nw = static_cast<size_t>(wealth_axis_.size());
        ctx->wealth_points = nw;
        ctx->expected.assign(static_cast<size_t>(model.num_states) * model.num_actions * nw, 0.0);
        for (int s = 0; s < model.num_states; ++s)
            for (int a = 0; a < model.num_actions; ++a)
                for (size_t wi = 0; wi < nw; ++wi) {
                    const double w = wealth_axis_.points[wi];
                    const double ev = detail::support_expectation(model.noise(t), [&](int xi) {
                        const InfoState raw{model.transition(t, s, a, xi), {w, 0.0}};
                        return space.value_at(t + 1, raw, next_row);
                    });
                    ctx->expected[(static_cast<size_t>(s) * model.num_actions + a) * nw + wi] = ev;
                }
        return ctx;
    }

    double min_premium(int t, const InfoState& y, std::span<const double> payoffs, double z, const AuxDecision& aux,
                       const NextPremiums& next, const PeriodContext* ctx) const override {
        const FiniteDistribution& dist = noise_[static_cast<size_t>(t)];
        const int key = next.context_key(num_actions_);
        if (!gate_.passes(t, key, dist, payoffs, z)) return infeasible();

        const double endowment = t == 0 ? aux.value : 0.0;
        double ev;
        if (ctx != nullptr && key >= 0) {
            const auto& wctx = static_cast<const WealthContext&>(*ctx);
            const double w_next = t == 0 ? aux.value - z : y.aux[0] - z;
            ev = wctx.expected[static_cast<size_t>(key) * wctx.wealth_points +
                               static_cast<size_t>(wealth_axis_.nearest(w_next))];
        } else {
            ev = detail::support_expectation(dist, [&](int i) { return next.at(i); });
        }
        if (is_infeasible(ev)) return infeasible();
        return endowment + ev;
    }

    DecisionGrid decision_grid(int t, const InfoState&) const override {
        DecisionGrid grid;
        grid.disbursements = z_grid_;
        if (t == 0) {
            grid.auxiliaries.clear();
            grid.auxiliaries.reserve(static_cast<size_t>(wealth_axis_.size()));
            for (double w0 : wealth_axis_.points) grid.auxiliaries.push_back(AuxDecision{w0, 0});
        }
        return grid;
    }

    double terminal_premium(const InfoState& y) const override {
        const double w = y.aux[0];
        if (soft_beta_.has_value()) return *soft_beta_ * std::max(0.0, -w);
        return w >= -1e-9 ? 0.0 : infeasible();
    }

private:
    std::vector<FiniteDistribution> noise_;
    detail::AcceptanceGate gate_;
    int num_actions_;
    AuxAxis wealth_axis_;
    std::vector<double> z_grid_;
    std::optional<double> soft_beta_;
};

inline GcrProblem build_standard_cr(const MdpModel& model, const AcceptanceSchedule& acceptance, AuxAxis wealth_axis,
                                    std::vector<double> z_grid, std::optional<double> soft_beta = std::nullopt) {
    acceptance.validate(model.horizon);
    detail::require_sorted_grid(z_grid, "build_standard_cr z grid", /*nonnegative=*/true);
    auto m = std::make_shared<const MdpModel>(model);
    std::vector<std::vector<AuxAxis>> axes(static_cast<size_t>(model.horizon) + 2, {wealth_axis});
    axes[0] = {}; // wealth enters at t = 1, through the endowment decision
    InfoStateSpace space(model.num_states, model.horizon, std::move(axes), InfoState{model.initial_state, {}},
                         [m](int t, const InfoState& y, int a, double z, const AuxDecision& aux, int xi) {
                             const double w = t == 0 ? aux.value : y.aux[0];
                             return InfoState{m->transition(t, y.state, a, xi), {w - z, 0.0}};
                         });
    return {std::make_shared<StandardCrStep>(model, acceptance, std::move(wealth_axis), std::move(z_grid), soft_beta),
            std::move(space)};
}

/// Pre-committed consumption with shortfall cost: the stage loss is
/// c_t max(z - w - X, 0) - alpha_t z, wealth absorbs leftovers at zero floor.
class ConsumptionStep final : public RiskFrontierStep {
public:
    ConsumptionStep(std::vector<FiniteDistribution> noise, std::vector<double> alpha_utils,
                    std::vector<double> c_costs, std::vector<double> z_grid)
        : noise_(std::move(noise)), alpha_(std::move(alpha_utils)), cost_(std::move(c_costs)),
          z_grid_(std::move(z_grid)) {}

    double min_premium(int t, const InfoState& y, std::span<const double> payoffs, double z, const AuxDecision&,
                       const NextPremiums& next, const PeriodContext*) const override {
        const double w = y.aux[0];
        const double a_t = alpha_[static_cast<size_t>(t)];
        const double c_t = cost_[static_cast<size_t>(t)];
        return detail::support_expectation(noise_[static_cast<size_t>(t)], [&](int i) {
            const double v = next.at(i);
            if (is_infeasible(v)) return v;
            const double x = payoffs[static_cast<size_t>(i)];
            return c_t * std::max(z - w - x, 0.0) - a_t * z + v;
        });
    }

    DecisionGrid decision_grid(int, const InfoState&) const override {
        DecisionGrid grid;
        grid.disbursements = z_grid_;
        return grid;
    }

private:
    std::vector<FiniteDistribution> noise_;
    std::vector<double> alpha_;
    std::vector<double> cost_;
    std::vector<double> z_grid_;
};

inline GcrProblem build_consumption(const MdpModel& model, std::vector<double> alpha_utils,
                                    std::vector<double> c_costs, AuxAxis wealth_axis, std::vector<double> z_grid,
                                    double initial_wealth = 0.0) {
    detail::require(static_cast<int>(alpha_utils.size()) == model.horizon + 1 &&
                        static_cast<int>(c_costs.size()) == model.horizon + 1,
                    "build_consumption: need per-period utility and cost rates");
    for (int t = 0; t <= model.horizon; ++t) {
        detail::require(alpha_utils[static_cast<size_t>(t)] > 0.0, "build_consumption: alpha_t must be > 0");
        detail::require(c_costs[static_cast<size_t>(t)] > alpha_utils[static_cast<size_t>(t)],
                        "build_consumption: need c_t > alpha_t");
    }
    detail::require_sorted_grid(z_grid, "build_consumption z grid", /*nonnegative=*/true);
    auto m = std::make_shared<const MdpModel>(model);
    InfoStateSpace space = InfoStateSpace::uniform_axes(
        model.num_states, model.horizon, {wealth_axis}, InfoState{model.initial_state, {initial_wealth, 0.0}},
        [m](int t, const InfoState& y, int a, double z, const AuxDecision&, int xi) {
            const double x = m->payoff(t, y.state, a, xi);
            return InfoState{m->transition(t, y.state, a, xi), {std::max(y.aux[0] + x - z, 0.0), 0.0}};
        });
    return {std::make_shared<ConsumptionStep>(model.noise_dists, std::move(alpha_utils), std::move(c_costs),
                                              std::move(z_grid)),
            std::move(space)};
}

/// Consumption-excess certainty scaling: decisions are (z, alpha); the
/// perspective-scaled expected utility of the excess must stay nonnegative and
/// the premium composes worst-case over outcomes. Terminal wealth must clear
/// zero.
class ConsumptionExcessStep final : public RiskFrontierStep {
public:
    ConsumptionExcessStep(std::vector<FiniteDistribution> noise, std::function<double(double)> utility,
                          std::vector<std::vector<double>> targets, double epsilon, std::vector<double> alpha_grid,
                          std::vector<double> z_grid)
        : noise_(std::move(noise)), utility_(std::move(utility)), targets_(std::move(targets)), epsilon_(epsilon),
          alpha_grid_(std::move(alpha_grid)), z_grid_(std::move(z_grid)) {}

    double min_premium(int t, const InfoState& y, std::span<const double> payoffs, double z, const AuxDecision& aux,
                       const NextPremiums& next, const PeriodContext*) const override {
        const FiniteDistribution& dist = noise_[static_cast<size_t>(t)];
        const double alpha = aux.value;
        const double target = targets_[static_cast<size_t>(t)][static_cast<size_t>(y.state)];
        double usum = 0.0;
        for (int i : dist.support)
            usum += dist.probs[static_cast<size_t>(i)] *
                    utility_((payoffs[static_cast<size_t>(i)] + z - target) / alpha);
        if (alpha * usum < -1e-9) return infeasible();

        double worst = -infeasible();
        for (int i : dist.support) worst = std::max(worst, next.at(i));
        if (is_infeasible(worst)) return infeasible();
        return alpha + worst;
    }

    DecisionGrid decision_grid(int, const InfoState&) const override {
        DecisionGrid grid;
        grid.disbursements = z_grid_;
        grid.auxiliaries.clear();
        for (double a : alpha_grid_) grid.auxiliaries.push_back(AuxDecision{a, 0});
        return grid;
    }

    double terminal_premium(const InfoState& y) const override { return y.aux[0] >= -1e-9 ? 0.0 : infeasible(); }

private:
    std::vector<FiniteDistribution> noise_;
    std::function<double(double)> utility_;
    std::vector<std::vector<double>> targets_; // [t][s]
    double epsilon_;
    std::vector<double> alpha_grid_;
    std::vector<double> z_grid_;
};

inline GcrProblem build_consumption_excess(const MdpModel& model, std::function<double(double)> utility,
                                           std::vector<std::vector<double>> targets, double epsilon,
                                           std::vector<double> alpha_grid, double savings_rate, double loan_rate,
                                           AuxAxis wealth_axis, std::vector<double> z_grid,
                                           double initial_wealth = 0.0) {
    detail::require(epsilon > 0.0, "build_consumption_excess: epsilon must be > 0");
    detail::require(!alpha_grid.empty(), "build_consumption_excess: empty alpha grid");
    for (double a : alpha_grid)
        detail::require(a >= epsilon, "build_consumption_excess: alpha grid must lie in [epsilon, inf)");
    detail::require(0.0 <= savings_rate && savings_rate <= loan_rate,
                    "build_consumption_excess: need 0 <= savings rate <= loan rate");
    detail::require(static_cast<int>(targets.size()) == model.horizon + 1,
                    "build_consumption_excess: need per-period consumption targets");
    detail::require_sorted_grid(z_grid, "build_consumption_excess z grid", /*nonnegative=*/false);
    auto m = std::make_shared<const MdpModel>(model);
    const double gs = 1.0 + savings_rate, gb = 1.0 + loan_rate;
    InfoStateSpace space = InfoStateSpace::uniform_axes(
        model.num_states, model.horizon, {wealth_axis}, InfoState{model.initial_state, {initial_wealth, 0.0}},
        [m, gs, gb](int t, const InfoState& y, int a, double z, const AuxDecision&, int xi) {
            const double w = y.aux[0];
            return InfoState{m->transition(t, y.state, a, xi), {std::min(gs * w - z, gb * w - z), 0.0}};
        });
    return {std::make_shared<ConsumptionExcessStep>(model.noise_dists, std::move(utility), std::move(targets),
                                                    epsilon, std::move(alpha_grid), std::move(z_grid)),
            std::move(space)};
}

// ---------------------------------------------------------------------------
// Target-based models

/// Expected dis-utility of the cumulative target shortfall: the augmenting
/// coordinate accumulates z, the terminal premium applies u.
class ExpectedUtilityStep final : public RiskFrontierStep {
public:
    ExpectedUtilityStep(const MdpModel& model, std::function<double(double)> utility,
                        const AcceptanceSchedule& acceptance, std::vector<double> z_grid)
        : noise_(model.noise_dists), gate_(model, acceptance), num_actions_(model.num_actions),
          utility_(std::move(utility)), z_grid_(std::move(z_grid)) {}

    double min_premium(int t, const InfoState&, std::span<const double> payoffs, double z, const AuxDecision&,
                       const NextPremiums& next, const PeriodContext*) const override {
        const FiniteDistribution& dist = noise_[static_cast<size_t>(t)];
        if (!gate_.passes(t, next.context_key(num_actions_), dist, payoffs, z)) return infeasible();
        return detail::support_expectation(dist, [&](int i) { return next.at(i); });
    }

    DecisionGrid decision_grid(int, const InfoState&) const override {
        DecisionGrid grid;
        grid.disbursements = z_grid_;
        return grid;
    }

    double terminal_premium(const InfoState& y) const override { return utility_(y.aux[0]); }

private:
    std::vector<FiniteDistribution> noise_;
    detail::AcceptanceGate gate_;
    int num_actions_;
    std::function<double(double)> utility_;
    std::vector<double> z_grid_;
};

inline GcrProblem build_expected_utility(const MdpModel& model, std::function<double(double)> utility,
                                         const AcceptanceSchedule& acceptance, AuxAxis shortfall_axis,
                                         std::vector<double> z_grid) {
    acceptance.validate(model.horizon);
    detail::require_sorted_grid(z_grid, "build_expected_utility z grid", /*nonnegative=*/true);
    const double reachable_top = (model.horizon + 1) * z_grid.back();
    if (shortfall_axis.points.back() < reachable_top - 1e-9)
        std::fprintf(stderr,
                     "gcr: expected_utility shortfall axis tops out at %g but %g is reachable; "
                     "overflowing sums clamp to the grid\n",
                     shortfall_axis.points.back(), reachable_top);
    auto m = std::make_shared<const MdpModel>(model);
    InfoStateSpace space = InfoStateSpace::uniform_axes(
        model.num_states, model.horizon, {shortfall_axis}, InfoState{model.initial_state, {0.0, 0.0}},
        [m](int t, const InfoState& y, int a, double z, const AuxDecision&, int xi) {
            return InfoState{m->transition(t, y.state, a, xi), {y.aux[0] + z, 0.0}};
        });
    return {std::make_shared<ExpectedUtilityStep>(model, std::move(utility), acceptance, std::move(z_grid)),
            std::move(space)};
}

/// Worst-case expected shortfall against a total-variation adversary with a
/// shared running budget. The inner supremum enumerates spend amounts on the
/// budget grid; for each spend the optimal reweighting moves that much mass
/// onto the best continuation outcome, taken from the worst ones.
class WorstCaseStep final : public RiskFrontierStep {
public:
    WorstCaseStep(const MdpModel& model, const AcceptanceSchedule& acceptance, std::vector<double> budget_grid,
                  std::vector<double> z_grid)
        : noise_(model.noise_dists), gate_(model, acceptance), num_actions_(model.num_actions),
          budget_grid_(std::move(budget_grid)), z_grid_(std::move(z_grid)) {}

    double min_premium(int t, const InfoState& y, std::span<const double> payoffs, double z, const AuxDecision&,
                       const NextPremiums& next, const PeriodContext*) const override {
        const FiniteDistribution& dist = noise_[static_cast<size_t>(t)];
        if (!gate_.passes(t, next.context_key(num_actions_), dist, payoffs, z)) return infeasible();
        const double budget = y.aux[0];
        double sup = -infeasible();
        std::vector<double> w(static_cast<size_t>(dist.num_outcomes()), 0.0);
        for (double spend : budget_grid_) {
            if (spend > budget + 1e-12) break;
            for (int i : dist.support)
                w[static_cast<size_t>(i)] = next.supports_aux_probe() ? next.at_aux(i, budget - spend) : next.at(i);
            sup = std::max(sup, tv_ball_sup(dist, w, spend));
            if (is_infeasible(sup)) break;
        }
        if (is_infeasible(sup)) return infeasible();
        return z + sup;
    }

    DecisionGrid decision_grid(int, const InfoState&) const override {
        DecisionGrid grid;
        grid.disbursements = z_grid_;
        return grid;
    }

    bool decisions_affect_transition() const override { return false; }

    /// sup over densities within total-variation radius `radius` of
    /// E[m(xi) w(xi)]: move mass from the worst outcomes to the best one.
    static double tv_ball_sup(const FiniteDistribution& dist, std::span<const double> w, double radius) {
        int best = -1;
        for (int i : dist.support) {
            if (is_infeasible(w[static_cast<size_t>(i)])) return infeasible();
            if (best < 0 || w[static_cast<size_t>(i)] > w[static_cast<size_t>(best)]) best = i;
        }
        double value = expectation(dist, w);
        if (radius <= 0.0 || best < 0) return value;
        double moved = std::min(radius, 1.0 - dist.probs[static_cast<size_t>(best)]);
        value += moved * w[static_cast<size_t>(best)];
        std::vector<int> order(dist.support);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (w[static_cast<size_t>(a)] != w[static_cast<size_t>(b)]) return w[static_cast<size_t>(a)] < w[static_cast<size_t>(b)];
            return a < b;
        });
        for (int i : order) {
            if (moved <= 0.0) break;
            if (i == best) continue;
            const double take = std::min(moved, dist.probs[static_cast<size_t>(i)]);
            value -= take * w[static_cast<size_t>(i)];
            moved -= take;
        }
        return value;
    }

private:
    std::vector<FiniteDistribution> noise_;
    detail::AcceptanceGate gate_;
    int num_actions_;
    std::vector<double> budget_grid_;
    std::vector<double> z_grid_;
};

inline GcrProblem build_worst_case(const MdpModel& model, double budget, std::vector<double> budget_grid,
                                   std::vector<double> z_grid, const AcceptanceSchedule& acceptance) {
    acceptance.validate(model.horizon);
    detail::require(budget >= 0.0, "build_worst_case: budget must be >= 0");
    detail::require_sorted_grid(budget_grid, "build_worst_case budget grid", /*nonnegative=*/true);
    detail::require(std::abs(budget_grid.front()) < 1e-12, "build_worst_case: budget grid must contain 0");
    bool on_grid = false;
    for (double b : budget_grid) on_grid = on_grid || std::abs(b - budget) < 1e-12;
    detail::require(on_grid, "build_worst_case: budget must lie on the budget grid");
    detail::require_sorted_grid(z_grid, "build_worst_case z grid", /*nonnegative=*/true);

    auto m = std::make_shared<const MdpModel>(model);
    AuxAxis budget_axis("budget", budget_grid);
    InfoStateSpace space = InfoStateSpace::uniform_axes(
        model.num_states, model.horizon, {budget_axis}, InfoState{model.initial_state, {budget, 0.0}},
        [m](int t, const InfoState& y, int a, double, const AuxDecision&, int xi) {
            // The adversary's spend is a modeling construct; realized paths
            // carry the budget unchanged.
            return InfoState{m->transition(t, y.state, a, xi), {y.aux[0], 0.0}};
        });
    return {std::make_shared<WorstCaseStep>(model, acceptance, std::move(budget_grid), std::move(z_grid)),
            std::move(space)};
}

enum class RiskLevelUpdate {
    Multiply, // eta' = eta * m : exact for CVaR of the summed shortfall
    Divide,   // eta' = eta / m : conservative; kept for comparison runs
};

/// sup over densities with grid-valued entries (E_P[m] = 1, 0 <= m <= 1/eta)
/// of E[m(xi) w(xi, eta')], where eta' follows the risk-level update clamped
/// to [0,1]. Grid values fill all but the last support outcome; the last is
/// solved from E[m] = 1. Shared between the CVaR frontier step and the
/// brute-force oracle so both sides see the same adversary.
inline double density_grid_sup(const FiniteDistribution& dist, const DensityGrid& grid, double eta,
                               RiskLevelUpdate update, const std::function<double(int, double)>& w) {
    const auto& support = dist.support;
    const size_t k = support.size();
    detail::require(k > 0, "density_grid_sup: empty support");
    const double cap = eta > 1e-12 ? 1.0 / eta : infeasible();

    double combos = 1.0;
    for (size_t i = 0; i + 1 < k; ++i) {
        combos *= static_cast<double>(grid.multipliers.size());
        if (combos > 2e5) throw size_error("density_grid_sup: enumeration too large for this outcome count");
    }

    double sup = -infeasible();
    std::vector<double> m(k, 1.0);
    const std::function<void(size_t)> rec = [&](size_t pos) {
        if (pos + 1 == k) {
            double mass = 0.0;
            for (size_t j = 0; j + 1 < k; ++j) mass += dist.probs[static_cast<size_t>(support[j])] * m[j];
            const double p_last = dist.probs[static_cast<size_t>(support[k - 1])];
            const double m_last = (1.0 - mass) / p_last;
            if (m_last < -1e-9 || m_last > cap + 1e-9) return;
            m[k - 1] = std::max(m_last, 0.0);

            double value = 0.0;
            for (size_t j = 0; j < k; ++j) {
                if (m[j] <= 1e-12) continue; // zero-density branch contributes nothing
                const int xi = support[j];
                double eta_next = update == RiskLevelUpdate::Multiply ? eta * m[j] : eta / m[j];
                eta_next = std::min(std::max(eta_next, 0.0), 1.0);
                const double value_next = w(xi, eta_next);
                if (is_infeasible(value_next)) {
                    sup = infeasible();
                    return;
                }
                value += dist.probs[static_cast<size_t>(xi)] * m[j] * value_next;
            }
            sup = std::max(sup, value);
            return;
        }
        for (double cand : grid.multipliers) {
            if (cand > cap + 1e-9) continue;
            m[pos] = cand;
            rec(pos + 1);
            if (is_infeasible(sup)) return;
        }
    };
    rec(0);
    return sup;
}

/// CVaR of the cumulative shortfall via an adversarial density recursion on
/// the (state, tail-mass) grid. The inner supremum enumerates density-grid
/// assignments over all but one support outcome and solves the last from
/// E[m] = 1.
class CvarShortfallStep final : public RiskFrontierStep {
public:
    CvarShortfallStep(const MdpModel& model, const AcceptanceSchedule& acceptance, DensityGrid density,
                      std::vector<double> z_grid, RiskLevelUpdate update)
        : noise_(model.noise_dists), gate_(model, acceptance), num_actions_(model.num_actions),
          density_(std::move(density)), z_grid_(std::move(z_grid)), update_(update) {}

    double min_premium(int t, const InfoState& y, std::span<const double> payoffs, double z, const AuxDecision&,
                       const NextPremiums& next, const PeriodContext*) const override {
        const FiniteDistribution& dist = noise_[static_cast<size_t>(t)];
        if (!gate_.passes(t, next.context_key(num_actions_), dist, payoffs, z)) return infeasible();
        const double sup = density_grid_sup(dist, density_, y.aux[0], update_, [&](int xi, double eta_next) {
            return next.supports_aux_probe() ? next.at_aux(xi, eta_next) : next.at(xi);
        });
        if (is_infeasible(sup) || sup == -infeasible()) return infeasible();
        return z + sup;
    }

    DecisionGrid decision_grid(int, const InfoState&) const override {
        DecisionGrid grid;
        grid.disbursements = z_grid_;
        return grid;
    }

    bool decisions_affect_transition() const override { return false; }

private:
    std::vector<FiniteDistribution> noise_;
    detail::AcceptanceGate gate_;
    int num_actions_;
    DensityGrid density_;
    std::vector<double> z_grid_;
    RiskLevelUpdate update_;
};

inline GcrProblem build_cvar_shortfall(const MdpModel& model, double alpha, AuxAxis risk_axis,
                                       const DensityGrid& density, std::vector<double> z_grid,
                                       const AcceptanceSchedule& acceptance,
                                       RiskLevelUpdate update = RiskLevelUpdate::Multiply) {
    acceptance.validate(model.horizon);
    detail::require(alpha > 0.0 && alpha < 1.0, "build_cvar_shortfall: alpha must lie in (0,1)");
    density.validate();
    detail::require_sorted_grid(z_grid, "build_cvar_shortfall z grid", /*nonnegative=*/true);
    bool on_grid = false;
    for (double p : risk_axis.points) on_grid = on_grid || std::abs(p - alpha) < 1e-12;
    detail::require(on_grid, "build_cvar_shortfall: alpha must lie on the risk-level grid");

    auto m = std::make_shared<const MdpModel>(model);
    InfoStateSpace space = InfoStateSpace::uniform_axes(
        model.num_states, model.horizon, {risk_axis}, InfoState{model.initial_state, {alpha, 0.0}},
        [m](int t, const InfoState& y, int a, double, const AuxDecision&, int xi) {
            // Realized paths keep the risk level; adversarial reweighting only
            // shows up inside the premium recursion.
            return InfoState{m->transition(t, y.state, a, xi), {y.aux[0], 0.0}};
        });
    return {std::make_shared<CvarShortfallStep>(model, acceptance, density, std::move(z_grid), update),
            std::move(space)};
}

/// Quantile of the cumulative shortfall: the decision maker buys exclusion of
/// bad outcomes with probability budget eta, binary per outcome; kept branches
/// continue with no budget, so each path is excludable at one level only.
class QuantileStep final : public RiskFrontierStep {
public:
    QuantileStep(const MdpModel& model, const AcceptanceSchedule& acceptance, std::vector<double> z_grid)
        : noise_(model.noise_dists), gate_(model, acceptance), num_actions_(model.num_actions),
          z_grid_(std::move(z_grid)) {}

    double min_premium(int t, const InfoState&, std::span<const double> payoffs, double z, const AuxDecision& aux,
                       const NextPremiums& next, const PeriodContext*) const override {
        const FiniteDistribution& dist = noise_[static_cast<size_t>(t)];
        if (!gate_.passes(t, next.context_key(num_actions_), dist, payoffs, z)) return infeasible();
        double worst = -infeasible();
        for (int i : dist.support) {
            if (aux.mask & (1ULL << static_cast<unsigned>(i))) continue;
            const double w = next.supports_aux_probe() ? next.at_aux(i, 0.0) : next.at(i);
            worst = std::max(worst, w);
        }
        if (worst == -infeasible() || is_infeasible(worst)) return infeasible();
        return z + worst;
    }

    DecisionGrid decision_grid(int t, const InfoState& y) const override {
        const FiniteDistribution& dist = noise_[static_cast<size_t>(t)];
        const double eta = y.aux[0];
        DecisionGrid grid;
        grid.disbursements = z_grid_;
        grid.auxiliaries.clear();
        const size_t k = dist.support.size();
        detail::require(k <= 20, "build_quantile: too many outcomes for exclusion-mask enumeration");
        for (std::uint64_t choose = 0; choose < (1ULL << k); ++choose) {
            if (choose + 1 == (1ULL << k) && k > 0) continue; // excluding everything is degenerate
            std::uint64_t mask = 0;
            double excluded = 0.0;
            for (size_t j = 0; j < k; ++j)
                if (choose & (1ULL << j)) {
                    mask |= 1ULL << static_cast<unsigned>(dist.support[j]);
                    excluded += dist.probs[static_cast<size_t>(dist.support[j])];
                }
            if (choose != 0 && excluded >= eta - 1e-12) continue; // strict budget
            grid.auxiliaries.push_back(AuxDecision{0.0, mask});
        }
        return grid;
    }

private:
    std::vector<FiniteDistribution> noise_;
    detail::AcceptanceGate gate_;
    int num_actions_;
    std::vector<double> z_grid_;
};

inline GcrProblem build_quantile(const MdpModel& model, double tau, std::vector<double> z_grid,
                                 const AcceptanceSchedule& acceptance) {
    acceptance.validate(model.horizon);
    detail::require(tau > 0.0 && tau < 1.0, "build_quantile: tau must lie in (0,1)");
    detail::require_sorted_grid(z_grid, "build_quantile z grid", /*nonnegative=*/true);
    auto m = std::make_shared<const MdpModel>(model);
    AuxAxis risk_axis("risk", {0.0, tau});
    InfoStateSpace space = InfoStateSpace::uniform_axes(
        model.num_states, model.horizon, {risk_axis}, InfoState{model.initial_state, {tau, 0.0}},
        [m](int t, const InfoState& y, int a, double, const AuxDecision&, int xi) {
            // Kept branches carry no remaining exclusion budget.
            return InfoState{m->transition(t, y.state, a, xi), {0.0, 0.0}};
        });
    return {std::make_shared<QuantileStep>(model, acceptance, std::move(z_grid)), std::move(space)};
}

/// Worst-case (over outcomes and time) target shortfall with wealth-dependent
/// acceptance: tracks wealth and the running maximum shortfall; the terminal
/// premium is that maximum.
class GrowthStep final : public RiskFrontierStep {
public:
    using AcceptanceFn = std::function<AcceptanceSpec(int t, double wealth)>;

    GrowthStep(std::vector<FiniteDistribution> noise, AcceptanceFn acceptance, std::vector<double> z_grid)
        : noise_(std::move(noise)), acceptance_(std::move(acceptance)), z_grid_(std::move(z_grid)) {}

    double min_premium(int t, const InfoState& y, std::span<const double> payoffs, double z, const AuxDecision&,
                       const NextPremiums& next, const PeriodContext*) const override {
        const FiniteDistribution& dist = noise_[static_cast<size_t>(t)];
        const double w = y.aux[0];
        if (!acceptance_(t, w).accepts(dist, payoffs, w + z)) return infeasible();
        double worst = -infeasible();
        for (int i : dist.support) worst = std::max(worst, next.at(i));
        if (is_infeasible(worst)) return infeasible();
        return worst;
    }

    DecisionGrid decision_grid(int, const InfoState&) const override {
        DecisionGrid grid;
        grid.disbursements = z_grid_;
        return grid;
    }

    double terminal_premium(const InfoState& y) const override { return y.aux[1]; }

private:
    std::vector<FiniteDistribution> noise_;
    AcceptanceFn acceptance_;
    std::vector<double> z_grid_;
};

inline GcrProblem build_growth(const MdpModel& model, GrowthStep::AcceptanceFn acceptance, AuxAxis wealth_axis,
                               AuxAxis shortfall_axis, std::vector<double> z_grid, double initial_wealth = 0.0) {
    detail::require_sorted_grid(z_grid, "build_growth z grid", /*nonnegative=*/true);
    auto m = std::make_shared<const MdpModel>(model);
    InfoStateSpace space = InfoStateSpace::uniform_axes(
        model.num_states, model.horizon, {wealth_axis, shortfall_axis},
        InfoState{model.initial_state, {initial_wealth, 0.0}},
        [m](int t, const InfoState& y, int a, double z, const AuxDecision&, int xi) {
            const double x = m->payoff(t, y.state, a, xi);
            return InfoState{m->transition(t, y.state, a, xi), {y.aux[0] + x, std::max(y.aux[1], z)}};
        });
    return {std::make_shared<GrowthStep>(model.noise_dists, std::move(acceptance), std::move(z_grid)),
            std::move(space)};
}

} // namespace gcr

#endif // GCR_RISK_MODELS_HPP
