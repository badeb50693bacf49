#include <catch2/catch_amalgamated.hpp>

#include "gcr/mdp.hpp"

using namespace gcr;

namespace {

MdpModel identity_model(int horizon) {
    return MdpModel::build(
        3, 2, 2, horizon, 0, std::vector<FiniteDistribution>(static_cast<size_t>(horizon) + 1, make_distribution({1.0, 1.0})),
        [](int, int s, int, int) { return s; }, [](int, int s, int a, int xi) { return s + a + xi; });
}

} // namespace

TEST_CASE("step is deterministic and validates indices") {
    const auto m = identity_model(1);
    const auto [s1, r] = step(m, 0, 1, 1, 0);
    CHECK(s1 == 1);
    CHECK(r == 2.0);
    CHECK_THROWS_AS(step(m, 0, 3, 0, 0), validation_error);
    CHECK_THROWS_AS(step(m, 2, 0, 0, 0), validation_error);
    CHECK_THROWS_AS(step(m, 0, 0, 2, 0), validation_error);
}

TEST_CASE("history replay recomputes states") {
    const auto m = MdpModel::build(
        4, 1, 2, 2, 0, std::vector<FiniteDistribution>(3, make_distribution({1.0, 1.0})),
        [](int, int s, int, int xi) { return std::min(s + 1 + xi, 3); }, [](int, int, int, int) { return 0.0; });
    History h;
    h.initial_state = 0;
    h.steps = {{0, 1}, {0, 0}};
    CHECK(h.replay_state(m) == 3);
}

TEST_CASE("enumerate_histories counts and caps") {
    const auto m = identity_model(2);
    CHECK(enumerate_histories(m, 0).size() == 1);
    CHECK(enumerate_histories(m, 2).size() == 16); // (|A| * |Xi|)^2 = 4^2

    // First histories are lexicographically smallest.
    const auto hs = enumerate_histories(m, 1);
    CHECK(hs[0].steps[0] == std::make_pair(0, 0));
    CHECK(hs[1].steps[0] == std::make_pair(0, 1));

    const auto big = MdpModel::build(
        1, 3, 3, 13, 0, std::vector<FiniteDistribution>(14, make_distribution({1.0, 1.0, 1.0})),
        [](int, int, int, int) { return 0; }, [](int, int, int, int) { return 0.0; });
    CHECK_THROWS_AS(enumerate_histories(big, 13), size_error);
}

TEST_CASE("model validation rejects broken tables") {
    MdpModel m = identity_model(0);
    m.transition_table[0] = 7;
    CHECK_THROWS_AS(m.validate(), validation_error);
}
