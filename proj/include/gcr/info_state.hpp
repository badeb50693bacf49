#ifndef GCR_INFO_STATE_HPP
#define GCR_INFO_STATE_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gcr/mdp.hpp"

namespace gcr {

/// Augmented state: MDP state index plus up to two augmenting coordinates
/// (wealth, cumulative shortfall, risk level, budget, running max).
struct InfoState {
    int state = 0;
    std::array<double, 2> aux{0.0, 0.0};
};

/// Model-specific auxiliary decision taken alongside (action, disbursement):
/// `value` carries scalars (endowment w0, utility scale alpha), `mask` carries
/// outcome-exclusion sets.
struct AuxDecision {
    double value = 0.0;
    std::uint64_t mask = 0;

    bool operator==(const AuxDecision&) const = default;
};

/// One augmenting coordinate's grid. `interpolate` selects linear
/// interpolation of premium values along this axis; otherwise lookups snap to
/// the nearest grid point (ties toward the smaller coordinate).
struct AuxAxis {
    std::string label;
    std::vector<double> points; // sorted ascending, distinct
    bool interpolate = false;

    AuxAxis() = default;
    AuxAxis(std::string lbl, std::vector<double> pts, bool interp = false)
        : label(std::move(lbl)), points(std::move(pts)), interpolate(interp) {
        detail::require(!points.empty(), "AuxAxis '" + label + "': empty grid");
        for (size_t i = 1; i < points.size(); ++i)
            detail::require(points[i] > points[i - 1], "AuxAxis '" + label + "': points must be strictly increasing");
        uniform_ = true;
        step_ = points.size() > 1 ? points[1] - points[0] : 1.0;
        for (size_t i = 1; i < points.size(); ++i)
            if (std::abs((points[i] - points[i - 1]) - step_) > 1e-9 * std::max(1.0, std::abs(step_))) {
                uniform_ = false;
                break;
            }
    }

    int size() const { return static_cast<int>(points.size()); }

    /// Index of the nearest grid point, ties toward the smaller coordinate.
    int nearest(double v) const {
        const int n = size();
        if (v <= points.front()) return 0;
        if (v >= points.back()) return n - 1;
        int hi;
        if (uniform_) {
            hi = static_cast<int>((v - points.front()) / step_) + 1;
            if (hi > n - 1) hi = n - 1;
            while (points[static_cast<size_t>(hi)] < v) ++hi; // guard rounding
            while (hi > 0 && points[static_cast<size_t>(hi - 1)] >= v) --hi;
        } else {
            hi = static_cast<int>(std::lower_bound(points.begin(), points.end(), v) - points.begin());
        }
        const int lo = hi - 1;
        const double dlo = v - points[static_cast<size_t>(lo)];
        const double dhi = points[static_cast<size_t>(hi)] - v;
        return dlo <= dhi ? lo : hi;
    }

    /// Bracketing pair and interpolation weight for v (clamped to the range).
    struct Bracket {
        int lo, hi;
        double w_hi; // weight on hi; weight on lo is 1 - w_hi
    };
    Bracket bracket(double v) const {
        const int n = size();
        if (v <= points.front()) return {0, 0, 0.0};
        if (v >= points.back()) return {n - 1, n - 1, 0.0};
        int hi;
        if (uniform_) {
            hi = static_cast<int>((v - points.front()) / step_) + 1;
            if (hi > n - 1) hi = n - 1;
            while (points[static_cast<size_t>(hi)] < v) ++hi;
            while (hi > 0 && points[static_cast<size_t>(hi - 1)] >= v) --hi;
        } else {
            hi = static_cast<int>(std::lower_bound(points.begin(), points.end(), v) - points.begin());
        }
        const int lo = hi - 1;
        const double span = points[static_cast<size_t>(hi)] - points[static_cast<size_t>(lo)];
        return {lo, hi, (v - points[static_cast<size_t>(lo)]) / span};
    }

private:
    bool uniform_ = true;
    double step_ = 1.0;
};

/// Per-period augmented grids (state x aux axes), the compression sigma_t via
/// replay, and the transition g_t. Periods run 0..T+1; the T+1 grid hosts the
/// terminal premium.
class InfoStateSpace {
public:
    /// g_t(y, a, z, aux, xi) -> raw (unsnapped) successor information state.
    using TransitionFn = std::function<InfoState(int t, const InfoState&, int a, double z, const AuxDecision&, int xi)>;

    InfoStateSpace() = default;
    InfoStateSpace(int num_states, int horizon, std::vector<std::vector<AuxAxis>> axes_per_period,
                   InfoState initial, TransitionFn g)
        : num_states_(num_states), horizon_(horizon), axes_(std::move(axes_per_period)),
          initial_(initial), transition_(std::move(g)) {
        detail::require(static_cast<int>(axes_.size()) == horizon_ + 2,
                        "InfoStateSpace: need axes for periods 0..T+1");
        for (const auto& ax : axes_)
            detail::require(ax.size() <= 2, "InfoStateSpace: at most two augmenting coordinates");
    }

    /// Uniform axes across all periods.
    static InfoStateSpace uniform_axes(int num_states, int horizon, std::vector<AuxAxis> axes, InfoState initial,
                                       TransitionFn g) {
        std::vector<std::vector<AuxAxis>> per(static_cast<size_t>(horizon) + 2, axes);
        return InfoStateSpace(num_states, horizon, std::move(per), initial, std::move(g));
    }

    int num_states() const { return num_states_; }
    int horizon() const { return horizon_; }
    const InfoState& initial() const { return initial_; }
    const std::vector<AuxAxis>& axes(int t) const { return axes_[static_cast<size_t>(t)]; }
    int num_aux(int t) const { return static_cast<int>(axes_[static_cast<size_t>(t)].size()); }

    size_t grid_size(int t) const {
        size_t n = static_cast<size_t>(num_states_);
        for (const auto& ax : axes_[static_cast<size_t>(t)]) n *= static_cast<size_t>(ax.size());
        return n;
    }

    size_t index_of(int t, const InfoState& y) const {
        const auto& ax = axes_[static_cast<size_t>(t)];
        size_t idx = static_cast<size_t>(y.state);
        for (size_t k = 0; k < ax.size(); ++k)
            idx = idx * static_cast<size_t>(ax[k].size()) + static_cast<size_t>(ax[k].nearest(y.aux[k]));
        return idx;
    }

    InfoState grid_point(int t, size_t index) const {
        const auto& ax = axes_[static_cast<size_t>(t)];
        InfoState y;
        for (size_t k = ax.size(); k-- > 0;) {
            const size_t n = static_cast<size_t>(ax[k].size());
            y.aux[k] = ax[k].points[index % n];
            index /= n;
        }
        y.state = static_cast<int>(index);
        return y;
    }

    /// Nearest grid point to a raw state (projection).
    InfoState snap(int t, const InfoState& raw) const {
        return grid_point(t, index_of(t, raw));
    }

    InfoState apply_transition(int t, const InfoState& y, int a, double z, const AuxDecision& aux, int xi) const {
        return transition_(t, y, a, z, aux, xi);
    }

    /// Projected transition: g_t followed by snapping onto the t+1 grid.
    InfoState next_state(int t, const InfoState& y, int a, double z, const AuxDecision& aux, int xi) const {
        return snap(t + 1, transition_(t, y, a, z, aux, xi));
    }

    /// Table lookup at a raw point: nearest-point projection on
    /// non-interpolating axes, linear interpolation of values on interpolating
    /// ones. Infeasible entries propagate through any positive weight.
    double value_at(int t, const InfoState& raw, std::span<const double> table) const {
        const auto& ax = axes_[static_cast<size_t>(t)];
        if (ax.empty()) return table[static_cast<size_t>(raw.state)];
        if (ax.size() == 1) {
            const size_t base = static_cast<size_t>(raw.state) * static_cast<size_t>(ax[0].size());
            if (!ax[0].interpolate) return table[base + static_cast<size_t>(ax[0].nearest(raw.aux[0]))];
            const auto b = ax[0].bracket(raw.aux[0]);
            return blend(table[base + static_cast<size_t>(b.lo)], table[base + static_cast<size_t>(b.hi)], b.w_hi);
        }
        const size_t n1 = static_cast<size_t>(ax[1].size());
        const size_t base = static_cast<size_t>(raw.state) * static_cast<size_t>(ax[0].size()) * n1;
        AuxAxis::Bracket b0 = ax[0].interpolate ? ax[0].bracket(raw.aux[0])
                                                : AuxAxis::Bracket{ax[0].nearest(raw.aux[0]), ax[0].nearest(raw.aux[0]), 0.0};
        AuxAxis::Bracket b1 = ax[1].interpolate ? ax[1].bracket(raw.aux[1])
                                                : AuxAxis::Bracket{ax[1].nearest(raw.aux[1]), ax[1].nearest(raw.aux[1]), 0.0};
        const double v00 = table[base + static_cast<size_t>(b0.lo) * n1 + static_cast<size_t>(b1.lo)];
        const double v01 = table[base + static_cast<size_t>(b0.lo) * n1 + static_cast<size_t>(b1.hi)];
        const double v10 = table[base + static_cast<size_t>(b0.hi) * n1 + static_cast<size_t>(b1.lo)];
        const double v11 = table[base + static_cast<size_t>(b0.hi) * n1 + static_cast<size_t>(b1.hi)];
        return blend(blend(v00, v01, b1.w_hi), blend(v10, v11, b1.w_hi), b0.w_hi);
    }

private:
    static double blend(double lo, double hi, double w_hi) {
        if (w_hi <= 0.0) return lo;
        if (w_hi >= 1.0) return hi;
        if (is_infeasible(lo) || is_infeasible(hi)) return infeasible();
        return lo * (1.0 - w_hi) + hi * w_hi;
    }

    int num_states_ = 0;
    int horizon_ = 0;
    std::vector<std::vector<AuxAxis>> axes_;
    InfoState initial_;
    TransitionFn transition_;
};

/// sigma_t(h_t): replay the history through g_t from the initial information
/// state. Disbursement and auxiliary decision records are required by
/// wealth/shortfall-augmented models; defaulted for models that ignore them.
inline InfoState compress_history(const InfoStateSpace& space, int t, const History& h,
                                  std::span<const double> disbursements = {},
                                  std::span<const AuxDecision> aux_decisions = {}) {
    detail::require(h.length() == t, "compress_history: history length " + std::to_string(h.length()) +
                                         " != period " + std::to_string(t));
    InfoState y = space.initial();
    for (int k = 0; k < t; ++k) {
        const double z = k < static_cast<int>(disbursements.size()) ? disbursements[static_cast<size_t>(k)] : 0.0;
        const AuxDecision aux =
            k < static_cast<int>(aux_decisions.size()) ? aux_decisions[static_cast<size_t>(k)] : AuxDecision{};
        y = space.next_state(k, y, h.steps[static_cast<size_t>(k)].first, z, aux, h.steps[static_cast<size_t>(k)].second);
    }
    return y;
}

} // namespace gcr

#endif // GCR_INFO_STATE_HPP
