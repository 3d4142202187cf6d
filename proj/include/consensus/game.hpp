#pragma once

#include <functional>
#include <span>
#include <vector>

#include "consensus/grid.hpp"
#include "consensus/pde.hpp"
#include "consensus/scenarios.hpp"
#include "consensus/strategy.hpp"
#include "consensus/velocity.hpp"

namespace consensus {

struct GameTrace {
    std::vector<double> times;                   // epoch boundaries, size epochs+1
    std::vector<std::vector<Vec2>> positions;    // per time, per agent
    std::vector<std::vector<Vec2>> controls;     // per epoch, per agent
    std::vector<std::vector<double>> running_costs; // per time, per agent
    std::vector<double> mass;                    // per time
    std::vector<double> final_costs;             // per agent
    std::vector<std::pair<double, ScalarField>> snapshots;
    AdvanceStats advance_stats;

    int epochs() const { return static_cast<int>(controls.size()); }
    int agent_count() const { return times.empty() ? 0 : static_cast<int>(positions[0].size()); }
};

// Epoch observer for tests and progress reporting: called after the controls
// of epoch `ell` are chosen but before the transport step.
using EpochObserver =
    std::function<void(int ell, double t, const ScalarField& rho,
                       std::span<const Vec2> P, std::span<const Vec2> w)>;

double terminal_cost(const ScalarField& rho_T, const TargetWeight& psi);

GameTrace run_game(const Scenario& scenario, const EpochObserver& observer = nullptr);

} // namespace consensus
