#include "consensus/game.hpp"

#include <cmath>

#include "consensus/motion.hpp"
#include "consensus/pde.hpp"

namespace consensus {

double terminal_cost(const ScalarField& rho_T, const TargetWeight& psi) {
    return integrate_weighted(rho_T, psi);
}

GameTrace run_game(const Scenario& scenario, const EpochObserver& observer) {
    scenario.validate();
    const Grid2D grid = scenario.grid();
    const VelocityModel model = scenario.velocity_model();
    const InitialDensity rho0 = scenario.initial_density();
    const int k = static_cast<int>(scenario.agents.size());
    const int epochs = scenario.epoch_count();
    const double dt = epochs > 0 ? scenario.T / epochs : scenario.dt_strategy;

    std::vector<TargetWeight> weights;
    weights.reserve(k);
    for (const auto& a : scenario.agents) weights.push_back(a.weight());

    ScalarField rho = ScalarField::sample(grid, [&](Vec2 p) { return rho0(p); });
    std::vector<Vec2> P = scenario.initial_positions();

    GameTrace trace;
    trace.times.reserve(epochs + 1);
    trace.positions.reserve(epochs + 1);
    trace.controls.reserve(epochs);

    const BBox domain = grid.domain();
    const double escape_margin = std::max(domain.width(), domain.height());

    auto record_state = [&](double t) {
        trace.times.push_back(t);
        trace.positions.push_back(P);
        std::vector<double> costs(k);
        for (int i = 0; i < k; ++i) costs[i] = integrate_weighted(rho, weights[i]);
        trace.running_costs.push_back(std::move(costs));
        trace.mass.push_back(total_mass(rho));
    };

    // snapshot fires at the epoch boundary nearest to each requested time
    auto want_snapshot = [&](int boundary_index) {
        for (double ts : scenario.snapshot_times) {
            long idx = std::lround(ts / dt);
            idx = std::max(0L, std::min<long>(idx, epochs));
            if (idx == boundary_index) return true;
        }
        return false;
    };

    record_state(0.0);
    if (want_snapshot(0)) trace.snapshots.emplace_back(0.0, rho);

    std::vector<Vec2> w(k);
    int sweep_parity = 0;
    for (int ell = 0; ell < epochs; ++ell) {
        const double t = scenario.T * static_cast<double>(ell) / epochs;
        const double t_next = scenario.T * static_cast<double>(ell + 1) / epochs;

        // simultaneous move: every agent reads the same snapshot
        for (int i = 0; i < k; ++i)
            w[i] = choose_control(scenario.agents[i].strategy, rho, P, i, model, weights[i],
                                  t, dt, scenario.cfl);
        if (observer) observer(ell, t, rho, P, w);

        LinearMotion motion(P, std::vector<Vec2>(w.begin(), w.end()), t);
        rho = advance_interval(rho, model, motion, t, t_next - t, scenario.cfl,
                               &trace.advance_stats, &sweep_parity);

        for (int i = 0; i < k; ++i) {
            P[i] += (t_next - t) * w[i];
            if (P[i].x < domain.xmin - escape_margin || P[i].x > domain.xmax + escape_margin ||
                P[i].y < domain.ymin - escape_margin || P[i].y > domain.ymax + escape_margin)
                throw NumericsError("agent escaped");
        }

        trace.controls.push_back(std::vector<Vec2>(w.begin(), w.end()));
        record_state(t_next);
        if (want_snapshot(ell + 1)) trace.snapshots.emplace_back(t_next, rho);
    }

    trace.final_costs.resize(k);
    for (int i = 0; i < k; ++i) trace.final_costs[i] = terminal_cost(rho, weights[i]);
    return trace;
}

} // namespace consensus
