#include <catch2/catch_amalgamated.hpp>

#include "gcr/distribution.hpp"

using namespace gcr;

TEST_CASE("make_distribution normalizes weights") {
    const auto d = make_distribution({1.0, 1.0});
    CHECK(d.probs[0] == Catch::Approx(0.5));
    CHECK(d.probs[1] == Catch::Approx(0.5));
    CHECK(d.support == std::vector<int>{0, 1});
}

TEST_CASE("make_distribution keeps zero-probability outcomes out of the support") {
    const auto d = make_distribution({2.0, 0.0, 2.0});
    CHECK(d.probs[0] == Catch::Approx(0.5));
    CHECK(d.probs[1] == 0.0);
    CHECK(d.probs[2] == Catch::Approx(0.5));
    CHECK(d.support == std::vector<int>{0, 2});
}

TEST_CASE("make_distribution rejects degenerate and negative weights") {
    CHECK_THROWS_AS(make_distribution({0.0, 0.0}), validation_error);
    CHECK_THROWS_WITH(make_distribution({0.0, 0.0}), Catch::Matchers::ContainsSubstring("degenerate"));
    CHECK_THROWS_WITH(make_distribution({1.0, -0.5}), Catch::Matchers::ContainsSubstring("index 1"));
}

TEST_CASE("expectation") {
    const auto uniform = make_distribution({1.0, 1.0});
    const std::vector<double> v1{0.0, 2.0};
    CHECK(expectation(uniform, v1) == Catch::Approx(1.0));

    const auto point = make_distribution({1.0, 0.0});
    const std::vector<double> v2{7.0, -1.0};
    CHECK(expectation(point, v2) == 7.0);

    const auto skewed = make_distribution({0.3, 0.7});
    const std::vector<double> v3{10.0, 0.0};
    CHECK(expectation(skewed, v3) == Catch::Approx(3.0));

    const std::vector<double> wrong{1.0};
    CHECK_THROWS_AS(expectation(uniform, wrong), validation_error);
}

TEST_CASE("expectation skips zero-probability infeasible outcomes") {
    const auto point = make_distribution({1.0, 0.0});
    const std::vector<double> v{3.0, infeasible()};
    CHECK(expectation(point, v) == 3.0);
}

TEST_CASE("truncated gaussian pmf") {
    const auto d = truncated_gaussian_pmf(4.0, 1.2, 9);
    double total = 0.0;
    for (double p : d.probs) total += p;
    CHECK(total == Catch::Approx(1.0).epsilon(1e-12));

    int argmax = 0;
    for (int k = 0; k < d.num_outcomes(); ++k)
        if (d.probs[static_cast<size_t>(k)] > d.probs[static_cast<size_t>(argmax)]) argmax = k;
    CHECK(argmax == 4);

    const auto single = truncated_gaussian_pmf(0.0, 1.0, 0);
    CHECK(single.probs == std::vector<double>{1.0});

    CHECK_THROWS_AS(truncated_gaussian_pmf(0.0, 0.0, 3), validation_error);

    const auto binned = truncated_gaussian_pmf(4.0, 1.2, 9, PmfMode::CdfBins);
    total = 0.0;
    for (double p : binned.probs) total += p;
    CHECK(total == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sampling is deterministic in the seed") {
    const auto d = truncated_gaussian_pmf(4.0, 1.2, 9);
    SplitMix64 a(42), b(42);
    for (int i = 0; i < 200; ++i) CHECK(sample_outcome(d, a) == sample_outcome(d, b));
}
