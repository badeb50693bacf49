#include <catch2/catch_amalgamated.hpp>

#include "gcr/cvar.hpp"

using namespace gcr;

TEST_CASE("variational CVaR, cost form") {
    const auto d = make_distribution({1.0, 1.0});
    const std::vector<double> v{0.0, 2.0};
    CHECK(cvar_variational(d, v, 0.5, CvarForm::Cost) == Catch::Approx(2.0));

    // alpha near 0 collapses to the expectation.
    CHECK(cvar_variational(d, v, 1e-12, CvarForm::Cost) == Catch::Approx(1.0));
}

TEST_CASE("variational CVaR, payoff form") {
    const auto d = make_distribution({1.0, 1.0});
    const std::vector<double> v{0.0, 2.0};
    CHECK(cvar_variational(d, v, 0.4, CvarForm::Payoff) == Catch::Approx(0.0));
    // Full-mass tail is the expectation.
    CHECK(cvar_payoff_tail_mass(d, v, 1.0) == Catch::Approx(1.0));
}

TEST_CASE("tail-mass helpers agree with hand tails") {
    const auto d = make_distribution({0.9, 0.1});
    const std::vector<double> v{0.0, 10.0};
    // Worst 0.2 cost tail: the 10-atom (0.1) plus 0.1 of zeros -> 5.
    CHECK(cvar_cost_tail_mass(d, v, 0.2) == Catch::Approx(5.0));
    // Worst 0.5 payoff tail: all zeros -> 0.
    CHECK(cvar_payoff_tail_mass(d, v, 0.5) == Catch::Approx(0.0));
    CHECK(cvar_cost_tail_mass(d, v, 1.0) == Catch::Approx(1.0));
}

TEST_CASE("cvar_variational validates input") {
    const auto d = make_distribution({1.0});
    const std::vector<double> v{1.0};
    CHECK_THROWS_AS(cvar_variational(d, v, 0.0, CvarForm::Cost), validation_error);
    CHECK_THROWS_AS(cvar_variational(d, v, 1.0, CvarForm::Cost), validation_error);
}
