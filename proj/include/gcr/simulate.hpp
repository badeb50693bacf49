#ifndef GCR_SIMULATE_HPP
#define GCR_SIMULATE_HPP

#include <string>
#include <vector>

#include "gcr/tables.hpp"

namespace gcr {

struct Trajectory {
    History history;                    // T+1 (action, outcome) steps
    std::vector<double> payoffs;        // realized r_t, t = 0..T
    std::vector<double> disbursements;  // realized z_t
    std::vector<AuxDecision> aux_decisions;
    std::vector<InfoState> info_states; // y_0..y_{T+1}, snapped to the grids
    double cumulative_payoff = 0.0;
};

class policy_hole_error : public error {
public:
    policy_hole_error(int t, const InfoState& y)
        : error("policy hole at t=" + std::to_string(t) + ", y=(s=" + std::to_string(y.state) + ", aux0=" +
                std::to_string(y.aux[0]) + ", aux1=" + std::to_string(y.aux[1]) + ")"),
          period(t), state(y) {}
    int period;
    InfoState state;
};

/// Seeded rollout of a policy: outcomes are drawn i.i.d. from the per-period
/// noise distributions through a deterministic generator, so equal seeds give
/// identical trajectories.
inline Trajectory simulate_trajectory(const MdpModel& model, const Policy& policy, const InfoStateSpace& space,
                                      std::uint64_t seed) {
    SplitMix64 rng(seed);
    Trajectory traj;
    traj.history.initial_state = model.initial_state;
    InfoState y = space.initial();
    for (int t = 0; t <= model.horizon; ++t) {
        const size_t yi = space.index_of(t, y);
        const auto& decision = policy.at(t, yi);
        if (!decision.has_value()) throw policy_hole_error(t, y);
        const int a = decision->action;
        const double z = decision->disbursement;
        const int xi = sample_outcome(model.noise(t), rng);
        const double r = model.payoff(t, y.state, a, xi);

        traj.history.steps.emplace_back(a, xi);
        traj.payoffs.push_back(r);
        traj.disbursements.push_back(z);
        traj.aux_decisions.push_back(decision->aux);
        traj.info_states.push_back(y);
        traj.cumulative_payoff += r;

        y = space.next_state(t, y, a, z, decision->aux, xi);
    }
    traj.info_states.push_back(y); // y_{T+1}
    return traj;
}

} // namespace gcr

#endif // GCR_SIMULATE_HPP
