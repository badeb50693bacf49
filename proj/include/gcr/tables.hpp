#ifndef GCR_TABLES_HPP
#define GCR_TABLES_HPP

#include <optional>
#include <vector>

#include "gcr/frontier.hpp"

namespace gcr {

/// V-bar tables over the information-state grids, periods 0..T+1 (the last
/// row is the terminal premium). Entries may be infeasible().
struct ValueTable {
    std::vector<std::vector<double>> rows;

    double at(int t, size_t y_index) const { return rows[static_cast<size_t>(t)][y_index]; }
    std::span<const double> row(int t) const { return rows[static_cast<size_t>(t)]; }
};

struct Decision {
    int action = 0;
    double disbursement = 0.0;
    AuxDecision aux{};
};

/// Greedy (or fixed) decisions per (t, grid index); empty where the stage was
/// infeasible.
struct Policy {
    std::vector<std::vector<std::optional<Decision>>> rows; // periods 0..T

    const std::optional<Decision>& at(int t, size_t y_index) const { return rows[static_cast<size_t>(t)][y_index]; }
};

struct StageDiagnostics {
    size_t grid_points = 0;
    size_t infeasible_points = 0;
    double elapsed_ms = 0.0;
};

struct SolveResult {
    ValueTable values;
    Policy policy;
    double optimum = 0.0; // V-bar_0 at the initial information state; infeasible() if none
    std::vector<StageDiagnostics> diagnostics;
    /// First period where every candidate failed, when optimum is infeasible.
    std::optional<int> first_infeasible_period;
};

} // namespace gcr

#endif // GCR_TABLES_HPP
