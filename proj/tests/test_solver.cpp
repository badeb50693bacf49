#include <catch2/catch_amalgamated.hpp>

#include "gcr/risk_models.hpp"
#include "gcr/solver.hpp"
#include "gcr/tail_risk.hpp"
#include "helpers.hpp"

using namespace gcr;
using gcr::testing::constant_stream;
using gcr::testing::stream_model;

namespace {

/// One state, two actions with per-outcome payoffs {0,2} and {2,4}.
MdpModel two_action_model(int horizon) {
    return MdpModel::build(
        1, 2, 2, horizon, 0, std::vector<FiniteDistribution>(static_cast<size_t>(horizon) + 1, make_distribution({1.0, 1.0})),
        [](int, int, int, int) { return 0; }, [](int, int, int a, int xi) { return 2.0 * a + 2.0 * xi; });
}

} // namespace

TEST_CASE("solve_stage picks the larger-mean action under the risk-neutral step") {
    const auto model = two_action_model(0);
    auto [step, space] = build_risk_neutral(model);
    std::vector<double> terminal(space.grid_size(1), 0.0);
    const auto sol = solve_stage(*step, space, model, 0, space.initial(), terminal);
    REQUIRE(sol.decision.has_value());
    CHECK(sol.value == Catch::Approx(-3.0));
    CHECK(sol.decision->action == 1);
}

TEST_CASE("solve on a T=0 model reduces to one stage") {
    const auto model = two_action_model(0);
    auto [step, space] = build_risk_neutral(model);
    const auto result = solve(model, *step, space);
    std::vector<double> terminal(space.grid_size(1), 0.0);
    const auto sol = solve_stage(*step, space, model, 0, space.initial(), terminal);
    CHECK(result.optimum == sol.value);
    CHECK(result.policy.at(0, 0)->action == sol.decision->action);
}

TEST_CASE("an unsatisfiable acceptance makes the solve infeasible with a witness") {
    const auto model = constant_stream(0.0, 1);
    auto [step, space] = build_standard_cr(model, AcceptanceSpec::pointwise_floor(100.0),
                                           AuxAxis("wealth", {-2, -1, 0, 1, 2}), {0, 1, 2});
    const auto result = solve(model, *step, space);
    CHECK(is_infeasible(result.optimum));
    REQUIRE(result.first_infeasible_period.has_value());
    CHECK(*result.first_infeasible_period == 1); // backward pass hits period T first
}

TEST_CASE("stage-equation residual: re-solving reproduces stored values") {
    const auto model = stream_model(
        2, 2, 2, {1.0, 2.0}, [](int, int, int xi) { return xi; },
        [](int t, int s, int xi) { return s - xi + 0.5 * t; });
    auto [step, space] = build_standard_cr(model, AcceptanceSpec::expectation_floor(-1.0),
                                           AuxAxis("wealth", {-4, -3, -2, -1, 0, 1, 2, 3, 4}), {0, 1, 2});
    const auto result = solve(model, *step, space);
    for (int t = model.horizon; t >= 0; --t)
        for (size_t yi = 0; yi < space.grid_size(t); ++yi) {
            const auto sol = solve_stage(*step, space, model, t, space.grid_point(t, yi),
                                         result.values.row(t + 1));
            if (is_infeasible(result.values.at(t, yi)))
                CHECK(is_infeasible(sol.value));
            else
                CHECK(sol.value == Catch::Approx(result.values.at(t, yi)).margin(1e-12));
        }
}

TEST_CASE("greedy policy evaluation matches solve values on reachable states") {
    const auto model = two_action_model(2);
    auto [step, space] = build_risk_neutral(model);
    const auto result = solve(model, *step, space);
    const auto eval = evaluate_policy(model, *step, space, result.policy);
    const auto reachable = reachable_states(model, space, result.policy);
    for (int t = 0; t <= model.horizon; ++t)
        for (size_t yi = 0; yi < space.grid_size(t); ++yi)
            if (reachable[static_cast<size_t>(t)][yi])
                CHECK(eval.at(t, yi) == Catch::Approx(result.values.at(t, yi)).margin(1e-12));
}

TEST_CASE("a corrupted decision never improves the evaluated value") {
    const auto model = two_action_model(1);
    auto [step, space] = build_risk_neutral(model);
    const auto result = solve(model, *step, space);
    Policy corrupted = result.policy;
    corrupted.rows[0][0]->action = 0; // optimal is action 1
    const auto eval = evaluate_policy(model, *step, space, corrupted);
    CHECK(eval.at(0, 0) >= result.values.at(0, 0) - 1e-12);
    CHECK(eval.at(0, 0) > result.values.at(0, 0) + 0.5); // strictly worse here
}

TEST_CASE("infeasible fixed decisions propagate to ancestors") {
    const auto model = constant_stream(0.0, 1);
    auto [step, space] = build_standard_cr(model, AcceptanceSpec::expectation_floor(0.0),
                                           AuxAxis("wealth", {-2, -1, 0, 1, 2}), {0, 1, 2});
    const auto result = solve(model, *step, space);
    REQUIRE(!is_infeasible(result.optimum));
    Policy fixed = result.policy;
    // Force a disbursement that violates wealth feasibility at the terminal.
    for (auto& d : fixed.rows[1])
        if (d.has_value()) d->disbursement = 2.0;
    for (auto& d : fixed.rows[0])
        if (d.has_value()) {
            d->aux.value = 0.0; // no endowment
            d->disbursement = 0.0;
        }
    const auto eval = evaluate_policy(model, *step, space, fixed);
    CHECK(is_infeasible(eval.at(0, space.index_of(0, space.initial()))));
}

TEST_CASE("simulation is a pure function of the seed") {
    const auto model = stream_model(
        3, 3, 4, {1.0, 2.0, 1.0}, [](int, int s, int xi) { return (s + xi) % 3; },
        [](int, int s, int xi) { return s - 0.5 * xi; });
    auto [step, space] = build_risk_neutral(model);
    const auto result = solve(model, *step, space);

    const auto a = simulate_trajectory(model, result.policy, space, 7);
    const auto b = simulate_trajectory(model, result.policy, space, 7);
    CHECK(a.history.steps == b.history.steps);
    CHECK(a.cumulative_payoff == b.cumulative_payoff);

    // Replay: states and payoffs recompute from (s0, actions, outcomes).
    int s = a.history.initial_state;
    double total = 0.0;
    for (int t = 0; t <= model.horizon; ++t) {
        const auto [act, xi] = a.history.steps[static_cast<size_t>(t)];
        CHECK(a.info_states[static_cast<size_t>(t)].state == s);
        total += model.payoff(t, s, act, xi);
        CHECK(a.payoffs[static_cast<size_t>(t)] == model.payoff(t, s, act, xi));
        s = model.transition(t, s, act, xi);
    }
    CHECK(a.cumulative_payoff == Catch::Approx(total).margin(1e-12));
}

TEST_CASE("point-mass noise gives a deterministic rollout") {
    const auto model = stream_model(
        2, 2, 2, {1.0, 0.0}, [](int, int s, int xi) { return xi == 0 ? 1 - s : s; },
        [](int, int s, int) { return static_cast<double>(s); });
    auto [step, space] = build_risk_neutral(model);
    const auto result = solve(model, *step, space);
    const auto t1 = simulate_trajectory(model, result.policy, space, 1);
    const auto t2 = simulate_trajectory(model, result.policy, space, 99);
    CHECK(t1.cumulative_payoff == t2.cumulative_payoff);
    CHECK(t1.history.steps == t2.history.steps);
}

TEST_CASE("policy holes surface with the offending period and state") {
    const auto model = two_action_model(1);
    auto [step, space] = build_risk_neutral(model);
    auto result = solve(model, *step, space);
    result.policy.rows[1][0].reset();
    try {
        simulate_trajectory(model, result.policy, space, 3);
        FAIL("expected policy_hole_error");
    } catch (const policy_hole_error& e) {
        CHECK(e.period == 1);
        CHECK(std::string(e.what()).find("t=1") != std::string::npos);
    }
}

TEST_CASE("monte carlo reproducibility and summary") {
    const auto model = stream_model(
        2, 2, 3, {1.0, 1.0}, [](int, int, int xi) { return xi; }, [](int, int s, int xi) { return s + xi * 0.5; });
    auto [step, space] = build_risk_neutral(model);
    const auto result = solve(model, *step, space);
    const auto r1 = monte_carlo(model, result.policy, space, 50, 11);
    const auto r2 = monte_carlo(model, result.policy, space, 50, 11);
    CHECK(r1.mean == r2.mean);
    CHECK(r1.stddev == r2.stddev);
    CHECK(r1.trajectories.size() == 50);
    for (const auto& tr : r1.trajectories) CHECK(tr.payoffs.size() == 4);
    CHECK(r1.min <= r1.mean);
    CHECK(r1.mean <= r1.max);
}

TEST_CASE("monte carlo mean approaches the exact policy expectation") {
    const auto model = stream_model(
        2, 2, 2, {1.0, 3.0}, [](int, int, int xi) { return xi; }, [](int, int s, int xi) { return s + xi - 0.5; });
    auto [step, space] = build_risk_neutral(model);
    const auto result = solve(model, *step, space);

    // Exact E[sum R] under the greedy policy by full tree expansion.
    std::function<double(int, int)> walk = [&](int t, int s) -> double {
        if (t > model.horizon) return 0.0;
        const auto& d = result.policy.at(t, space.index_of(t, InfoState{s, {}}));
        double acc = 0.0;
        for (int xi : model.noise(t).support)
            acc += model.noise(t).probs[static_cast<size_t>(xi)] *
                   (model.payoff(t, s, d->action, xi) + walk(t + 1, model.transition(t, s, d->action, xi)));
        return acc;
    };
    const double exact = walk(0, model.initial_state);

    const int n = 4000;
    const auto mc = monte_carlo(model, result.policy, space, n, 2024);
    CHECK(std::abs(mc.mean - exact) <= 3.0 * mc.stddev / std::sqrt(static_cast<double>(n)));
}
