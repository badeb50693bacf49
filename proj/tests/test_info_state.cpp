#include <catch2/catch_amalgamated.hpp>

#include "gcr/info_state.hpp"

using namespace gcr;

namespace {

MdpModel two_state_model(int horizon) {
    return MdpModel::build(
        2, 1, 2, horizon, 0, std::vector<FiniteDistribution>(static_cast<size_t>(horizon) + 1, make_distribution({1.0, 1.0})),
        [](int, int, int, int xi) { return xi; }, [](int, int s, int, int) { return static_cast<double>(s); });
}

} // namespace

TEST_CASE("axis nearest breaks ties toward the smaller coordinate") {
    AuxAxis ax("wealth", {0.0, 1.0, 2.0});
    CHECK(ax.nearest(-5.0) == 0);
    CHECK(ax.nearest(0.4) == 0);
    CHECK(ax.nearest(0.5) == 0); // tie
    CHECK(ax.nearest(0.6) == 1);
    CHECK(ax.nearest(1.5) == 1); // tie
    CHECK(ax.nearest(9.0) == 2);
}

TEST_CASE("non-uniform axis lookup") {
    AuxAxis ax("eta", {0.1, 0.2, 0.5, 1.0});
    CHECK(ax.nearest(0.34) == 1);
    CHECK(ax.nearest(0.36) == 2);
    const auto b = ax.bracket(0.75);
    CHECK(b.lo == 2);
    CHECK(b.hi == 3);
    CHECK(b.w_hi == Catch::Approx(0.5));
}

TEST_CASE("grid indexing round-trips") {
    const auto m = two_state_model(1);
    auto space = InfoStateSpace::uniform_axes(
        2, 1, {AuxAxis("wealth", {-1.0, 0.0, 1.0}), AuxAxis("peak", {0.0, 2.0})}, InfoState{0, {0.0, 0.0}},
        [](int, const InfoState& y, int, double z, const AuxDecision&, int xi) {
            return InfoState{xi, {y.aux[0] - z, y.aux[1]}};
        });
    CHECK(space.grid_size(0) == 2 * 3 * 2);
    for (size_t i = 0; i < space.grid_size(0); ++i) CHECK(space.index_of(0, space.grid_point(0, i)) == i);
}

TEST_CASE("value_at interpolates premium values on flagged axes") {
    AuxAxis lin("eta", {0.0, 1.0}, /*interpolate=*/true);
    auto space = InfoStateSpace::uniform_axes(1, 0, {lin}, InfoState{0, {0.0, 0.0}},
                                              [](int, const InfoState& y, int, double, const AuxDecision&, int) {
                                                  return y;
                                              });
    const std::vector<double> table{10.0, 20.0};
    CHECK(space.value_at(0, InfoState{0, {0.25, 0.0}}, table) == Catch::Approx(12.5));
    CHECK(space.value_at(0, InfoState{0, {-3.0, 0.0}}, table) == 10.0);
    CHECK(space.value_at(0, InfoState{0, {7.0, 0.0}}, table) == 20.0);

    // Infeasible neighbors poison any positively weighted blend.
    const std::vector<double> with_inf{10.0, infeasible()};
    CHECK(is_infeasible(space.value_at(0, InfoState{0, {0.25, 0.0}}, with_inf)));
    CHECK(space.value_at(0, InfoState{0, {0.0, 0.0}}, with_inf) == 10.0);
}

TEST_CASE("compress_history replays wealth") {
    const auto m = two_state_model(2);
    auto space = InfoStateSpace::uniform_axes(
        2, 2, {AuxAxis("wealth", {-5.0, -4.0, -3.0, -2.0, -1.0, 0.0, 1.0})}, InfoState{0, {0.0, 0.0}},
        [](int, const InfoState& y, int, double z, const AuxDecision&, int xi) {
            return InfoState{xi, {y.aux[0] - z, 0.0}};
        });
    History h;
    h.initial_state = 0;
    h.steps = {{0, 1}};
    const std::vector<double> z{3.0};
    const InfoState y1 = compress_history(space, 1, h, z);
    CHECK(y1.state == 1);
    CHECK(y1.aux[0] == -3.0);

    CHECK_THROWS_AS(compress_history(space, 2, h, z), validation_error);
}
