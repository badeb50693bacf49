#ifndef GCR_SOLVER_HPP
#define GCR_SOLVER_HPP

#include <chrono>
#include <cmath>
#include <optional>
#include <vector>

#include "gcr/simulate.hpp"
#include "gcr/tables.hpp"

namespace gcr {

struct StageSolution {
    double value = infeasible();
    std::optional<Decision> decision;
};

/// Epigraph-form stage problem at one (t, y): minimize the premium over
/// actions and the decision grid, with the dominance constraints bound at
/// equality (X_t = R_t(s,a,.), next premiums = V-bar_{t+1} composed with g_t;
/// optimal because min_premium is monotone in both). Ties break toward the
/// smallest action, then disbursement, then auxiliary index.
inline StageSolution solve_stage(const RiskFrontierStep& step, const InfoStateSpace& space, const MdpModel& model,
                                 int t, const InfoState& y, std::span<const double> next_values,
                                 const RiskFrontierStep::PeriodContext* ctx = nullptr) {
    if (next_values.size() != space.grid_size(t + 1))
        throw structural_error("solve_stage: next value row has " + std::to_string(next_values.size()) +
                               " entries, period " + std::to_string(t + 1) + " grid has " +
                               std::to_string(space.grid_size(t + 1)));
    const int s = y.state;
    const int n_xi = model.num_outcomes;
    StageSolution best;

    std::vector<double> payoffs(static_cast<size_t>(n_xi));
    std::vector<int> next_states(static_cast<size_t>(n_xi));
    std::vector<double> composed(static_cast<size_t>(n_xi));
    const DecisionGrid grid = step.decision_grid(t, y);
    const bool hoist = !step.decisions_affect_transition();

    for (int a = 0; a < model.num_actions; ++a) {
        if (!step.action_feasible(t, y, a)) continue;
        for (int xi = 0; xi < n_xi; ++xi) {
            payoffs[static_cast<size_t>(xi)] = model.payoff(t, s, a, xi);
            next_states[static_cast<size_t>(xi)] = model.transition(t, s, a, xi);
        }
        for (size_t zi = 0; zi < grid.disbursements.size(); ++zi) {
            const double z = grid.disbursements[zi];
            for (size_t ai = 0; ai < grid.auxiliaries.size(); ++ai) {
                const AuxDecision& aux = grid.auxiliaries[ai];
                NextPremiums next(space, next_values, next_states, t, y, a, z, aux);
                if (hoist) {
                    if (zi == 0 && ai == 0)
                        for (int xi = 0; xi < n_xi; ++xi) composed[static_cast<size_t>(xi)] = next.at(xi);
                    next.set_composed_cache(composed);
                }
                const double phi = step.min_premium(t, y, payoffs, z, aux, next, ctx);
                if (phi < best.value) {
                    best.value = phi;
                    best.decision = Decision{a, z, aux};
                }
            }
        }
    }
    return best;
}

/// Backward induction over the information-state grids, periods T..0.
/// The optimum is V-bar_0 at the initial information state; when it is
/// infeasible, `first_infeasible_period` reports the latest period whose
/// whole grid row failed (the earliest cause seen by the backward pass).
inline SolveResult solve(const MdpModel& model, const RiskFrontierStep& step, const InfoStateSpace& space) {
    const int T = model.horizon;
    SolveResult result;
    result.values.rows.resize(static_cast<size_t>(T) + 2);
    result.policy.rows.resize(static_cast<size_t>(T) + 1);
    result.diagnostics.resize(static_cast<size_t>(T) + 1);

    auto& terminal = result.values.rows[static_cast<size_t>(T) + 1];
    terminal.resize(space.grid_size(T + 1));
    for (size_t yi = 0; yi < terminal.size(); ++yi)
        terminal[yi] = step.terminal_premium(space.grid_point(T + 1, yi));

    for (int t = T; t >= 0; --t) {
        const auto start = std::chrono::steady_clock::now();
        const size_t n = space.grid_size(t);
        auto& row = result.values.rows[static_cast<size_t>(t)];
        auto& decisions = result.policy.rows[static_cast<size_t>(t)];
        row.resize(n);
        decisions.resize(n);
        const std::span<const double> next_row = result.values.rows[static_cast<size_t>(t) + 1];
        const auto ctx = step.prepare_period(t, space, model, next_row);
        size_t infeasible_count = 0;
        for (size_t yi = 0; yi < n; ++yi) {
            const InfoState y = space.grid_point(t, yi);
            StageSolution sol = solve_stage(step, space, model, t, y, next_row, ctx.get());
            row[yi] = sol.value;
            decisions[yi] = sol.decision;
            if (is_infeasible(sol.value)) ++infeasible_count;
        }
        auto& diag = result.diagnostics[static_cast<size_t>(t)];
        diag.grid_points = n;
        diag.infeasible_points = infeasible_count;
        diag.elapsed_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (infeasible_count == n && !result.first_infeasible_period.has_value())
            result.first_infeasible_period = t;
    }

    result.optimum = result.values.at(0, space.index_of(0, space.initial()));
    return result;
}

/// Backward pass with the policy's decisions fixed: no minimization, just the
/// stage premium of the stored (action, z, aux). Holes and infeasible stages
/// evaluate to infeasible() and propagate to ancestors.
inline ValueTable evaluate_policy(const MdpModel& model, const RiskFrontierStep& step, const InfoStateSpace& space,
                                  const Policy& policy) {
    const int T = model.horizon;
    ValueTable table;
    table.rows.resize(static_cast<size_t>(T) + 2);
    auto& terminal = table.rows[static_cast<size_t>(T) + 1];
    terminal.resize(space.grid_size(T + 1));
    for (size_t yi = 0; yi < terminal.size(); ++yi)
        terminal[yi] = step.terminal_premium(space.grid_point(T + 1, yi));

    std::vector<double> payoffs(static_cast<size_t>(model.num_outcomes));
    std::vector<int> next_states(static_cast<size_t>(model.num_outcomes));
    for (int t = T; t >= 0; --t) {
        const size_t n = space.grid_size(t);
        auto& row = table.rows[static_cast<size_t>(t)];
        row.resize(n);
        const std::span<const double> next_row = table.rows[static_cast<size_t>(t) + 1];
        for (size_t yi = 0; yi < n; ++yi) {
            const auto& decision = policy.at(t, yi);
            if (!decision.has_value()) {
                row[yi] = infeasible();
                continue;
            }
            const InfoState y = space.grid_point(t, yi);
            if (!step.action_feasible(t, y, decision->action)) {
                row[yi] = infeasible();
                continue;
            }
            for (int xi = 0; xi < model.num_outcomes; ++xi) {
                payoffs[static_cast<size_t>(xi)] = model.payoff(t, y.state, decision->action, xi);
                next_states[static_cast<size_t>(xi)] = model.transition(t, y.state, decision->action, xi);
            }
            NextPremiums next(space, next_row, next_states, t, y, decision->action, decision->disbursement,
                              decision->aux);
            row[yi] = step.min_premium(t, y, payoffs, decision->disbursement, decision->aux, next, nullptr);
        }
    }
    return table;
}

/// Grid points visited with positive probability under a fixed policy.
inline std::vector<std::vector<char>> reachable_states(const MdpModel& model, const InfoStateSpace& space,
                                                       const Policy& policy) {
    const int T = model.horizon;
    std::vector<std::vector<char>> mark(static_cast<size_t>(T) + 2);
    for (int t = 0; t <= T + 1; ++t) mark[static_cast<size_t>(t)].assign(space.grid_size(t), 0);
    std::vector<size_t> frontier{space.index_of(0, space.initial())};
    mark[0][frontier[0]] = 1;
    for (int t = 0; t <= T; ++t) {
        std::vector<size_t> next;
        for (size_t yi : frontier) {
            const auto& decision = policy.at(t, yi);
            if (!decision.has_value()) continue;
            const InfoState y = space.grid_point(t, yi);
            for (int xi : model.noise(t).support) {
                const InfoState yn = space.next_state(t, y, decision->action, decision->disbursement, decision->aux, xi);
                const size_t ni = space.index_of(t + 1, yn);
                if (!mark[static_cast<size_t>(t) + 1][ni]) {
                    mark[static_cast<size_t>(t) + 1][ni] = 1;
                    next.push_back(ni);
                }
            }
        }
        frontier = std::move(next);
    }
    return mark;
}

struct MonteCarloReport {
    std::vector<Trajectory> trajectories;
    double mean = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// n seeded rollouts; per-run seeds derive deterministically from `seed`.
inline MonteCarloReport monte_carlo(const MdpModel& model, const Policy& policy, const InfoStateSpace& space,
                                    int n, std::uint64_t seed) {
    detail::require(n >= 1, "monte_carlo: need n >= 1");
    SplitMix64 master(seed);
    MonteCarloReport report;
    report.trajectories.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        report.trajectories.push_back(simulate_trajectory(model, policy, space, master.next_u64()));

    double sum = 0.0, sum_sq = 0.0;
    report.min = report.trajectories.front().cumulative_payoff;
    report.max = report.min;
    for (const auto& tr : report.trajectories) {
        const double c = tr.cumulative_payoff;
        sum += c;
        sum_sq += c * c;
        report.min = std::min(report.min, c);
        report.max = std::max(report.max, c);
    }
    report.mean = sum / n;
    report.stddev = n > 1 ? std::sqrt(std::max(0.0, (sum_sq - n * report.mean * report.mean) / (n - 1))) : 0.0;
    return report;
}

} // namespace gcr

#endif // GCR_SOLVER_HPP
