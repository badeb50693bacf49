#ifndef GCR_TEST_HELPERS_HPP
#define GCR_TEST_HELPERS_HPP

#include <functional>
#include <vector>

#include "gcr/mdp.hpp"

namespace gcr::testing {

/// Single-action payoff stream: X_t(s, xi) with s' = next(s, xi).
inline MdpModel stream_model(int num_states, int num_outcomes, int horizon, std::vector<double> noise_weights,
                             const std::function<int(int, int, int)>& next,
                             const std::function<double(int, int, int)>& payoff, int initial_state = 0) {
    auto noise = std::vector<FiniteDistribution>(static_cast<size_t>(horizon) + 1,
                                                 make_distribution(std::span<const double>(noise_weights)));
    return MdpModel::build(
        num_states, 1, num_outcomes, horizon, initial_state, std::move(noise),
        [&next](int t, int s, int, int xi) { return next(t, s, xi); },
        [&payoff](int t, int s, int, int xi) { return payoff(t, s, xi); });
}

/// Deterministic constant stream X_t = x on a single state.
inline MdpModel constant_stream(double x, int horizon) {
    return stream_model(
        1, 1, horizon, {1.0}, [](int, int, int) { return 0; }, [x](int, int, int) { return x; });
}

} // namespace gcr::testing

#endif
