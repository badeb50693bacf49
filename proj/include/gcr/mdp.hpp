#ifndef GCR_MDP_HPP
#define GCR_MDP_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gcr/distribution.hpp"

namespace gcr {

/// Finite-horizon controlled system on dense integer indices. Periods run
/// 0..horizon; `transition` and `payoff` are flat tables indexed
/// [t][s][a][xi]. The transition at t == horizon supplies the terminal state
/// component of the period-(T+1) information state.
struct MdpModel {
    int num_states = 0;
    int num_actions = 0;
    int num_outcomes = 0;
    int horizon = 0; // T; periods 0..T
    int initial_state = 0;
    std::vector<FiniteDistribution> noise_dists; // one per period 0..T
    std::vector<int> transition_table;           // (T+1)*S*A*Xi entries
    std::vector<double> payoff_table;            // (T+1)*S*A*Xi entries

    size_t flat_index(int t, int s, int a, int xi) const {
        return ((static_cast<size_t>(t) * num_states + s) * num_actions + a) * num_outcomes + xi;
    }

    int transition(int t, int s, int a, int xi) const { return transition_table[flat_index(t, s, a, xi)]; }
    double payoff(int t, int s, int a, int xi) const { return payoff_table[flat_index(t, s, a, xi)]; }

    const FiniteDistribution& noise(int t) const { return noise_dists[static_cast<size_t>(t)]; }

    void validate() const {
        detail::require(num_states > 0 && num_actions > 0 && num_outcomes > 0, "MdpModel: empty space");
        detail::require(horizon >= 0, "MdpModel: negative horizon");
        detail::require(initial_state >= 0 && initial_state < num_states, "MdpModel: initial state out of range");
        detail::require(static_cast<int>(noise_dists.size()) == horizon + 1, "MdpModel: need one noise distribution per period");
        const size_t n = static_cast<size_t>(horizon + 1) * num_states * num_actions * num_outcomes;
        detail::require(transition_table.size() == n && payoff_table.size() == n, "MdpModel: table size mismatch");
        for (const auto& d : noise_dists)
            detail::require(d.num_outcomes() == num_outcomes, "MdpModel: noise support size mismatch");
        for (size_t i = 0; i < n; ++i) {
            detail::require(transition_table[i] >= 0 && transition_table[i] < num_states,
                            "MdpModel: transition leaves the state space");
            detail::require(std::isfinite(payoff_table[i]), "MdpModel: non-finite payoff");
        }
    }

    double max_abs_payoff() const {
        double m = 0.0;
        for (double r : payoff_table) m = std::max(m, std::abs(r));
        return m;
    }

    /// Builds the flat tables from callables; the usual way to set up models
    /// in tests and generators.
    static MdpModel build(int num_states, int num_actions, int num_outcomes, int horizon, int initial_state,
                          std::vector<FiniteDistribution> noise,
                          const std::function<int(int, int, int, int)>& f,
                          const std::function<double(int, int, int, int)>& r) {
        MdpModel m;
        m.num_states = num_states;
        m.num_actions = num_actions;
        m.num_outcomes = num_outcomes;
        m.horizon = horizon;
        m.initial_state = initial_state;
        m.noise_dists = std::move(noise);
        const size_t n = static_cast<size_t>(horizon + 1) * num_states * num_actions * num_outcomes;
        m.transition_table.resize(n);
        m.payoff_table.resize(n);
        for (int t = 0; t <= horizon; ++t)
            for (int s = 0; s < num_states; ++s)
                for (int a = 0; a < num_actions; ++a)
                    for (int xi = 0; xi < num_outcomes; ++xi) {
                        m.transition_table[m.flat_index(t, s, a, xi)] = f(t, s, a, xi);
                        m.payoff_table[m.flat_index(t, s, a, xi)] = r(t, s, a, xi);
                    }
        m.validate();
        return m;
    }
};

/// One period's move and reward.
inline std::pair<int, double> step(const MdpModel& model, int t, int s, int a, int xi) {
    detail::require(t >= 0 && t <= model.horizon, "step: period out of range");
    detail::require(s >= 0 && s < model.num_states, "step: state out of range");
    detail::require(a >= 0 && a < model.num_actions, "step: action out of range");
    detail::require(xi >= 0 && xi < model.num_outcomes, "step: outcome out of range");
    return {model.transition(t, s, a, xi), model.payoff(t, s, a, xi)};
}

/// (action, outcome) record per period; the state sequence is recomputed from
/// the transition map on demand (perfect recall).
struct History {
    int initial_state = 0;
    std::vector<std::pair<int, int>> steps; // (a_k, xi_k) for k = 0..t-1

    int length() const { return static_cast<int>(steps.size()); }

    /// State at the beginning of period `length()`, replayed through f.
    int replay_state(const MdpModel& model) const {
        int s = initial_state;
        for (int k = 0; k < length(); ++k) s = model.transition(k, s, steps[static_cast<size_t>(k)].first,
                                                               steps[static_cast<size_t>(k)].second);
        return s;
    }
};

/// All histories of length t, lexicographic in ((a_0, xi_0), ..., (a_{t-1}, xi_{t-1})).
inline std::vector<History> enumerate_histories(const MdpModel& model, int t,
                                                std::uint64_t cap = 1000000) {
    detail::require(t >= 0 && t <= model.horizon + 1, "enumerate_histories: period out of range");
    const std::uint64_t branch = static_cast<std::uint64_t>(model.num_actions) * model.num_outcomes;
    std::uint64_t count = 1;
    for (int k = 0; k < t; ++k) {
        count *= branch;
        if (count > cap)
            throw size_error("enumerate_histories: " + std::to_string(count) + "+ histories exceeds cap " +
                             std::to_string(cap));
    }
    std::vector<History> out;
    out.reserve(static_cast<size_t>(count));
    History h;
    h.initial_state = model.initial_state;
    h.steps.assign(static_cast<size_t>(t), {0, 0});
    std::function<void(int)> rec = [&](int depth) {
        if (depth == t) {
            out.push_back(h);
            return;
        }
        for (int a = 0; a < model.num_actions; ++a)
            for (int xi = 0; xi < model.num_outcomes; ++xi) {
                h.steps[static_cast<size_t>(depth)] = {a, xi};
                rec(depth + 1);
            }
    };
    rec(0);
    return out;
}

} // namespace gcr

#endif // GCR_MDP_HPP
