#ifndef GCR_TAIL_RISK_HPP
#define GCR_TAIL_RISK_HPP

#include "gcr/solver.hpp"

namespace gcr {

/// Tail-risk recursion for a pure payoff stream (single-action model):
/// backward pass minimizing over the decision grid only. The stream's risk is
/// the schedule entry at (0, y_0).
inline PremiumSchedule tail_risk_evaluate(const RiskFrontierStep& step, const InfoStateSpace& space,
                                          const MdpModel& stream_model) {
    detail::require(stream_model.num_actions == 1, "tail_risk_evaluate: needs a single-action (pure stream) model");
    SolveResult result = solve(stream_model, step, space);
    return PremiumSchedule{std::move(result.values.rows)};
}

/// Value of a payoff stream under the frontier: the schedule entry at the
/// initial information state (infeasible() when no acceptable triple exists).
inline double stream_risk(const RiskFrontierStep& step, const InfoStateSpace& space, const MdpModel& stream_model) {
    const PremiumSchedule schedule = tail_risk_evaluate(step, space, stream_model);
    return schedule.at(0, space.index_of(0, space.initial()));
}

/// Stage-inclusion check of a (Z, Phi) pair: every reachable (t, y) must
/// satisfy Phi_t(y) >= min_stage_premium with the stored disbursement, with
/// that stage feasible. Single-action streams only.
inline bool check_membership(const RiskFrontierStep& step, const InfoStateSpace& space, const MdpModel& model,
                             const std::vector<std::vector<double>>& disbursements, const PremiumSchedule& schedule,
                             const std::vector<std::vector<AuxDecision>>* aux_decisions = nullptr) {
    detail::require(model.num_actions == 1, "check_membership: needs a single-action model");
    const int T = model.horizon;

    Policy policy;
    policy.rows.resize(static_cast<size_t>(T) + 1);
    for (int t = 0; t <= T; ++t) {
        const size_t n = space.grid_size(t);
        if (disbursements[static_cast<size_t>(t)].size() != n)
            throw structural_error("check_membership: disbursement table hole at period " + std::to_string(t));
        policy.rows[static_cast<size_t>(t)].resize(n);
        for (size_t yi = 0; yi < n; ++yi) {
            AuxDecision aux{};
            if (aux_decisions != nullptr) aux = (*aux_decisions)[static_cast<size_t>(t)][yi];
            policy.rows[static_cast<size_t>(t)][yi] = Decision{0, disbursements[static_cast<size_t>(t)][yi], aux};
        }
    }

    const auto reachable = reachable_states(model, space, policy);
    std::vector<double> payoffs(static_cast<size_t>(model.num_outcomes));
    std::vector<int> next_states(static_cast<size_t>(model.num_outcomes));
    for (int t = 0; t <= T; ++t) {
        const size_t n = space.grid_size(t);
        for (size_t yi = 0; yi < n; ++yi) {
            if (!reachable[static_cast<size_t>(t)][yi]) continue;
            const InfoState y = space.grid_point(t, yi);
            const double z = disbursements[static_cast<size_t>(t)][yi];
            AuxDecision aux{};
            if (aux_decisions != nullptr) aux = (*aux_decisions)[static_cast<size_t>(t)][yi];
            for (int xi = 0; xi < model.num_outcomes; ++xi) {
                payoffs[static_cast<size_t>(xi)] = model.payoff(t, y.state, 0, xi);
                next_states[static_cast<size_t>(xi)] = model.transition(t, y.state, 0, xi);
            }
            NextPremiums next(space, schedule.premiums[static_cast<size_t>(t) + 1], next_states, t, y, 0, z, aux);
            const double need = step.min_premium(t, y, payoffs, z, aux, next, nullptr);
            if (is_infeasible(need)) return false;
            if (schedule.at(t, yi) < need - 1e-12) return false;
        }
    }
    return true;
}

} // namespace gcr

#endif // GCR_TAIL_RISK_HPP
