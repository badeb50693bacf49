#ifndef GCR_ORACLE_HPP
#define GCR_ORACLE_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gcr/risk_models.hpp"
#include "gcr/solver.hpp"

namespace gcr {

/// Closed-form objective evaluated directly on the history tree; each kind
/// mirrors one risk_models constructor. Adversarial kinds carry the same
/// grids as the frontier step so both sides face the same adversary.
struct ObjectiveSpec {
    enum class Kind {
        NegExpectedTotal,
        Entropic,
        Nested,
        ExpectedUtilityOfShortfall,
        CvarOfShortfall,
        QuantileOfShortfall,
        WorstCaseShortfall,
        MaxShortfall,
    };

    Kind kind = Kind::NegExpectedTotal;
    double gamma = 1.0;                              // Entropic
    std::vector<OneStepRiskSpec> nested_specs;       // Nested
    std::function<double(double)> utility;           // ExpectedUtilityOfShortfall
    double alpha = 0.5;                              // Cvar tail mass / quantile tau
    RiskLevelUpdate update = RiskLevelUpdate::Multiply;
    DensityGrid density;                             // Cvar adversary grid
    double budget = 0.0;                             // WorstCase budget
    std::vector<double> budget_grid;                 // WorstCase spend grid
    GrowthStep::AcceptanceFn growth_acceptance;      // MaxShortfall wealth-dependent acceptance
    double initial_wealth = 0.0;                     // MaxShortfall

    static ObjectiveSpec neg_expected_total() { return {}; }
    static ObjectiveSpec entropic(double gamma) {
        ObjectiveSpec s;
        s.kind = Kind::Entropic;
        s.gamma = gamma;
        return s;
    }
    static ObjectiveSpec nested(std::vector<OneStepRiskSpec> specs) {
        ObjectiveSpec s;
        s.kind = Kind::Nested;
        s.nested_specs = std::move(specs);
        return s;
    }
    static ObjectiveSpec expected_utility(std::function<double(double)> u) {
        ObjectiveSpec s;
        s.kind = Kind::ExpectedUtilityOfShortfall;
        s.utility = std::move(u);
        return s;
    }
    static ObjectiveSpec cvar_of_shortfall(double alpha, DensityGrid density,
                                           RiskLevelUpdate update = RiskLevelUpdate::Multiply) {
        ObjectiveSpec s;
        s.kind = Kind::CvarOfShortfall;
        s.alpha = alpha;
        s.density = std::move(density);
        s.update = update;
        return s;
    }
    static ObjectiveSpec quantile_of_shortfall(double tau) {
        ObjectiveSpec s;
        s.kind = Kind::QuantileOfShortfall;
        s.alpha = tau;
        return s;
    }
    static ObjectiveSpec worst_case_shortfall(double budget, std::vector<double> budget_grid) {
        ObjectiveSpec s;
        s.kind = Kind::WorstCaseShortfall;
        s.budget = budget;
        s.budget_grid = std::move(budget_grid);
        return s;
    }
    static ObjectiveSpec max_shortfall(GrowthStep::AcceptanceFn acceptance, double initial_wealth = 0.0) {
        ObjectiveSpec s;
        s.kind = Kind::MaxShortfall;
        s.growth_acceptance = std::move(acceptance);
        s.initial_wealth = initial_wealth;
        return s;
    }
};

struct EnumerationBudget {
    std::uint64_t max_policies = 10000000;
};

/// Lexicographic odometer over all history-dependent deterministic policies
/// (an (action, disbursement) pair at every (t, history) node). Histories are
/// ranked lexicographically; decisions order action-major over the z grid.
class PolicyEnumerator {
public:
    PolicyEnumerator(const MdpModel& model, std::vector<double> z_grid, EnumerationBudget budget = {})
        : z_grid_(std::move(z_grid)), num_actions_(model.num_actions) {
        detail::require(!z_grid_.empty(), "PolicyEnumerator: empty z grid");
        const std::uint64_t branch = static_cast<std::uint64_t>(model.num_actions) * model.num_outcomes;
        std::uint64_t nodes_at_t = 1;
        std::uint64_t total_nodes = 0;
        offsets_.clear();
        for (int t = 0; t <= model.horizon; ++t) {
            offsets_.push_back(total_nodes);
            total_nodes += nodes_at_t;
            nodes_at_t *= branch;
            detail::require(total_nodes < (1ULL << 40), "PolicyEnumerator: history tree too large");
        }
        choices_ = static_cast<std::uint64_t>(model.num_actions) * z_grid_.size();
        long double count = 1.0L;
        for (std::uint64_t i = 0; i < total_nodes; ++i) {
            count *= static_cast<long double>(choices_);
            if (count > static_cast<long double>(budget.max_policies))
                throw size_error("enumerate_policies: " + std::to_string(static_cast<double>(count)) +
                                 " policies exceeds budget " + std::to_string(budget.max_policies));
        }
        total_policies_ = static_cast<std::uint64_t>(count);
        current_.assign(total_nodes, 0);
    }

    std::uint64_t total_policies() const { return total_policies_; }

    /// Decision at a (period, lexicographic-history-rank) node.
    std::pair<int, double> decide(int t, std::uint64_t rank) const {
        const std::uint64_t c = current_[offsets_[static_cast<size_t>(t)] + rank];
        return {static_cast<int>(c / z_grid_.size()), z_grid_[c % z_grid_.size()]};
    }

    /// Advance to the next policy; false once all have been visited.
    bool next() {
        for (size_t i = current_.size(); i-- > 0;) {
            if (++current_[i] < choices_) return true;
            current_[i] = 0;
        }
        return false;
    }

    std::vector<std::uint64_t> snapshot() const { return current_; }
    void restore(const std::vector<std::uint64_t>& snap) { current_ = snap; }

private:
    std::vector<double> z_grid_;
    int num_actions_;
    std::vector<std::uint64_t> offsets_;
    std::uint64_t choices_ = 1;
    std::uint64_t total_policies_ = 1;
    std::vector<std::uint64_t> current_;
};

namespace detail {

struct PathStats {
    double prob;
    double sum_x;
    double sum_z;
    double max_z;
    double wealth; // w_0 + sum of payoffs so far
};

/// Expands the outcome tree under a history-dependent policy, checking
/// acceptance at every positive-probability node. Returns false as soon as a
/// node is unacceptable. PolicyFn: (t, rank) -> (action, z).
template <typename PolicyFn, typename LeafFn>
bool expand_paths(const MdpModel& model, PolicyFn&& policy, const AcceptanceSchedule& acceptance,
                  const GrowthStep::AcceptanceFn& wealth_acceptance, double initial_wealth, LeafFn&& leaf) {
    std::vector<double> payoffs(static_cast<size_t>(model.num_outcomes));
    const std::uint64_t branch = static_cast<std::uint64_t>(model.num_actions) * model.num_outcomes;

    const std::function<bool(int, std::uint64_t, int, PathStats)> walk = [&](int t, std::uint64_t rank, int s,
                                                                             PathStats acc) -> bool {
        if (t > model.horizon) {
            leaf(acc);
            return true;
        }
        const auto [a, z] = policy(t, rank);
        for (int xi = 0; xi < model.num_outcomes; ++xi) payoffs[static_cast<size_t>(xi)] = model.payoff(t, s, a, xi);
        if (wealth_acceptance) {
            if (!wealth_acceptance(t, acc.wealth).accepts(model.noise(t), payoffs, acc.wealth + z)) return false;
        } else if (!acceptance.at(t).accepts(model.noise(t), payoffs, z)) {
            return false;
        }
        for (int xi : model.noise(t).support) {
            PathStats child = acc;
            child.prob = acc.prob * model.noise(t).probs[static_cast<size_t>(xi)];
            const double x = model.payoff(t, s, a, xi);
            child.sum_x += x;
            child.sum_z += z;
            child.max_z = std::max(child.max_z, z);
            child.wealth += x;
            if (!walk(t + 1, rank * branch + static_cast<std::uint64_t>(a) * model.num_outcomes + xi,
                      model.transition(t, s, a, xi), child))
                return false;
        }
        return true;
    };
    return walk(0, 0, model.initial_state, PathStats{1.0, 0.0, 0.0, 0.0, initial_wealth});
}

/// Upper tau-quantile of the path shortfall distribution: the largest value v
/// with P(S >= v) >= tau.
inline double upper_quantile(std::vector<std::pair<double, double>>& value_prob, double tau) {
    std::sort(value_prob.begin(), value_prob.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    double cum = 0.0;
    for (const auto& [v, p] : value_prob) {
        cum += p;
        if (cum >= tau - 1e-12) return v;
    }
    return value_prob.empty() ? 0.0 : value_prob.back().first;
}

} // namespace detail

/// Evaluates the closed-form objective of `spec` for a fixed
/// history-dependent policy by full tree expansion; infeasible() when the
/// acceptance system is violated with positive probability.
/// PolicyFn: (t, lexicographic history rank) -> (action, z).
template <typename PolicyFn>
double direct_objective(const MdpModel& model, PolicyFn&& policy, const ObjectiveSpec& spec,
                        const AcceptanceSchedule& acceptance = {}) {
    using Kind = ObjectiveSpec::Kind;
    const std::uint64_t branch = static_cast<std::uint64_t>(model.num_actions) * model.num_outcomes;
    std::vector<double> payoffs(static_cast<size_t>(model.num_outcomes));

    switch (spec.kind) {
    case Kind::NegExpectedTotal:
    case Kind::Entropic:
    case Kind::ExpectedUtilityOfShortfall:
    case Kind::QuantileOfShortfall:
    case Kind::MaxShortfall: {
        double acc = 0.0;
        double worst = 0.0;
        std::vector<std::pair<double, double>> leaves;
        const bool ok = detail::expand_paths(
            model, policy, acceptance,
            spec.kind == Kind::MaxShortfall ? spec.growth_acceptance : GrowthStep::AcceptanceFn{},
            spec.initial_wealth, [&](const detail::PathStats& p) {
                if (p.prob <= 0.0) return;
                switch (spec.kind) {
                case Kind::NegExpectedTotal:
                    acc -= p.prob * p.sum_x;
                    break;
                case Kind::Entropic:
                    acc += p.prob * std::exp(-spec.gamma * p.sum_x);
                    break;
                case Kind::ExpectedUtilityOfShortfall:
                    acc += p.prob * spec.utility(p.sum_z);
                    break;
                case Kind::QuantileOfShortfall:
                    leaves.emplace_back(p.sum_z, p.prob);
                    break;
                case Kind::MaxShortfall:
                    worst = std::max(worst, p.max_z);
                    break;
                default:
                    break;
                }
            });
        if (!ok) return infeasible();
        if (spec.kind == Kind::QuantileOfShortfall) return detail::upper_quantile(leaves, spec.alpha);
        if (spec.kind == Kind::MaxShortfall) return worst;
        return acc;
    }

    case Kind::Nested: {
        const std::function<double(int, std::uint64_t, int)> walk = [&](int t, std::uint64_t rank, int s) -> double {
            if (t > model.horizon) return 0.0;
            const auto [a, z] = policy(t, rank);
            (void)z;
            const FiniteDistribution& dist = model.noise(t);
            std::vector<double> diff(static_cast<size_t>(model.num_outcomes), 0.0);
            for (int xi : dist.support) {
                const double tail = walk(t + 1, rank * branch + static_cast<std::uint64_t>(a) * model.num_outcomes + xi,
                                         model.transition(t, s, a, xi));
                if (is_infeasible(tail)) return infeasible();
                diff[static_cast<size_t>(xi)] = model.payoff(t, s, a, xi) - tail;
            }
            const OneStepRiskSpec& one =
                spec.nested_specs.size() == 1 ? spec.nested_specs[0] : spec.nested_specs[static_cast<size_t>(t)];
            return one.evaluate(dist, diff);
        };
        return walk(0, 0, model.initial_state);
    }

    case Kind::CvarOfShortfall: {
        const std::function<double(int, std::uint64_t, int, double)> walk = [&](int t, std::uint64_t rank, int s,
                                                                                double eta) -> double {
            if (t > model.horizon) return 0.0;
            const auto [a, z] = policy(t, rank);
            for (int xi = 0; xi < model.num_outcomes; ++xi)
                payoffs[static_cast<size_t>(xi)] = model.payoff(t, s, a, xi);
            if (!acceptance.at(t).accepts(model.noise(t), payoffs, z)) return infeasible();
            const double sup =
                density_grid_sup(model.noise(t), spec.density, eta, spec.update, [&](int xi, double eta_next) {
                    return walk(t + 1, rank * branch + static_cast<std::uint64_t>(a) * model.num_outcomes + xi,
                                model.transition(t, s, a, xi), eta_next);
                });
            if (is_infeasible(sup) || sup == -infeasible()) return infeasible();
            return z + sup;
        };
        return walk(0, 0, model.initial_state, spec.alpha);
    }

    case Kind::WorstCaseShortfall: {
        const std::function<double(int, std::uint64_t, int, double)> walk = [&](int t, std::uint64_t rank, int s,
                                                                                double budget) -> double {
            if (t > model.horizon) return 0.0;
            const auto [a, z] = policy(t, rank);
            for (int xi = 0; xi < model.num_outcomes; ++xi)
                payoffs[static_cast<size_t>(xi)] = model.payoff(t, s, a, xi);
            if (!acceptance.at(t).accepts(model.noise(t), payoffs, z)) return infeasible();
            std::vector<double> w(static_cast<size_t>(model.num_outcomes), 0.0);
            double sup = -infeasible();
            for (double spend : spec.budget_grid) {
                if (spend > budget + 1e-12) break;
                for (int xi : model.noise(t).support)
                    w[static_cast<size_t>(xi)] =
                        walk(t + 1, rank * branch + static_cast<std::uint64_t>(a) * model.num_outcomes + xi,
                             model.transition(t, s, a, xi), budget - spend);
                sup = std::max(sup, WorstCaseStep::tv_ball_sup(model.noise(t), w, spend));
                if (is_infeasible(sup)) break;
            }
            if (is_infeasible(sup) || sup == -infeasible()) return infeasible();
            return z + sup;
        };
        return walk(0, 0, model.initial_state, spec.budget);
    }
    }
    return infeasible();
}

struct BruteForceResult {
    double value = infeasible();
    /// Decisions of the first optimal policy in enumeration order, [t][rank].
    std::vector<std::vector<std::pair<int, double>>> policy;
};

/// Global minimum of the objective over all history-dependent policies:
/// the ground truth that information-state dynamic programming must match.
inline BruteForceResult brute_force_optimum(const MdpModel& model, const ObjectiveSpec& spec,
                                            std::vector<double> z_grid, const AcceptanceSchedule& acceptance = {},
                                            EnumerationBudget budget = {}) {
    PolicyEnumerator en(model, std::move(z_grid), budget);
    BruteForceResult best;
    std::vector<std::uint64_t> best_snapshot = en.snapshot();
    bool more = true;
    bool first = true;
    while (more) {
        const double value =
            direct_objective(model, [&](int t, std::uint64_t rank) { return en.decide(t, rank); }, spec, acceptance);
        if (first || value < best.value) {
            best.value = value;
            best_snapshot = en.snapshot();
            first = false;
        }
        more = en.next();
    }
    en.restore(best_snapshot);
    best.policy.resize(static_cast<size_t>(model.horizon) + 1);
    std::uint64_t nodes_at_t = 1;
    const std::uint64_t branch = static_cast<std::uint64_t>(model.num_actions) * model.num_outcomes;
    for (int t = 0; t <= model.horizon; ++t) {
        best.policy[static_cast<size_t>(t)].resize(nodes_at_t);
        for (std::uint64_t r = 0; r < nodes_at_t; ++r) best.policy[static_cast<size_t>(t)][r] = en.decide(t, r);
        nodes_at_t *= branch;
    }
    return best;
}

/// Classical finite-horizon backward induction maximizing expected total
/// payoff; the independent yardstick for the risk-neutral reduction.
inline double classical_max_expectation(const MdpModel& model) {
    std::vector<double> next(static_cast<size_t>(model.num_states), 0.0);
    std::vector<double> cur(static_cast<size_t>(model.num_states), 0.0);
    for (int t = model.horizon; t >= 0; --t) {
        for (int s = 0; s < model.num_states; ++s) {
            double best = -infeasible();
            for (int a = 0; a < model.num_actions; ++a) {
                double q = 0.0;
                for (int xi : model.noise(t).support)
                    q += model.noise(t).probs[static_cast<size_t>(xi)] *
                         (model.payoff(t, s, a, xi) + next[static_cast<size_t>(model.transition(t, s, a, xi))]);
                best = std::max(best, q);
            }
            cur[static_cast<size_t>(s)] = best;
        }
        std::swap(cur, next);
    }
    return next[static_cast<size_t>(model.initial_state)];
}

struct ConsistencyReport {
    struct Violation {
        int t;
        size_t y_index;
        double policy_value;
        double optimal_value;
    };
    std::vector<Violation> violations;
    size_t reachable_checked = 0;

    bool consistent() const { return violations.empty(); }
};

/// Tail-optimality check: at every reachable (t, y), the policy's tail value
/// must attain the re-solved optimum. Greedy policies pass by construction;
/// policies optimal only at the root do not.
inline ConsistencyReport check_time_consistency(const MdpModel& model, const RiskFrontierStep& step,
                                                const InfoStateSpace& space, const Policy& policy,
                                                double tol = 1e-9) {
    const SolveResult fresh = solve(model, step, space);
    const ValueTable tails = evaluate_policy(model, step, space, policy);
    const auto reachable = reachable_states(model, space, policy);
    ConsistencyReport report;
    for (int t = 0; t <= model.horizon; ++t)
        for (size_t yi = 0; yi < space.grid_size(t); ++yi) {
            if (!reachable[static_cast<size_t>(t)][yi]) continue;
            ++report.reachable_checked;
            const double v_pi = tails.at(t, yi);
            const double v_opt = fresh.values.at(t, yi);
            if (is_infeasible(v_pi) && is_infeasible(v_opt)) continue;
            if (v_pi > v_opt + tol) report.violations.push_back({t, yi, v_pi, v_opt});
        }
    return report;
}

struct MonotonicityReport {
    double max_violation = -infeasible(); // max over trials of GCR(X') - GCR(X); <= 0 when monotone
    int trials = 0;
};

/// Randomized pointwise payoff perturbations X' >= X; the stream risk must
/// never increase. `build` reconstructs the frontier for a modified model.
inline MonotonicityReport check_monotonicity(const std::function<GcrProblem(const MdpModel&)>& build,
                                             const MdpModel& base_model, int n_trials, std::uint64_t seed) {
    detail::require(base_model.num_actions == 1, "check_monotonicity: needs a single-action stream model");
    SplitMix64 rng(seed);
    GcrProblem base = build(base_model);
    const double risk_base = solve(base_model, *base.step, base.space).optimum;

    MonotonicityReport report;
    report.trials = n_trials;
    for (int trial = 0; trial < n_trials; ++trial) {
        MdpModel bumped = base_model;
        for (double& r : bumped.payoff_table)
            if (rng.next_unit() < 0.5) r += 3.0 * rng.next_unit();
        GcrProblem lifted = build(bumped);
        const double risk_lifted = solve(bumped, *lifted.step, lifted.space).optimum;
        double violation;
        if (is_infeasible(risk_lifted) && is_infeasible(risk_base))
            violation = 0.0;
        else if (is_infeasible(risk_lifted))
            violation = infeasible();
        else if (is_infeasible(risk_base))
            violation = -infeasible();
        else
            violation = risk_lifted - risk_base;
        report.max_violation = std::max(report.max_violation, violation);
    }
    return report;
}

} // namespace gcr

#endif // GCR_ORACLE_HPP
