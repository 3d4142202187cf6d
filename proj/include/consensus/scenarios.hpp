#pragma once

#include <optional>
#include <string>
#include <vector>

#include "consensus/grid.hpp"
#include "consensus/strategy.hpp"
#include "consensus/velocity.hpp"

namespace consensus {

// Tensor-product density profile on a box: amplitude inside, C1 smoothstep
// ramps of width `ramp_x/y` just inside each edge (0 = sharp indicator). The
// support is exactly the box either way.
struct InitialDensity {
    BBox box;
    double amplitude = 1.0;
    double ramp_x = 0.0;
    double ramp_y = 0.0;

    double operator()(Vec2 p) const;
    Vec2 gradient(Vec2 p) const;
    double l1_norm() const;
    double grad_linf() const;
};

struct DensitySpec {
    BBox box;
    double amplitude = 1.0;
    double mollify_cells = 0.0; // ramp width in cells (per axis)
};

struct AgentSpec {
    Vec2 position;
    RadialKernel kernel;
    StrategySpec strategy;
    std::optional<Vec2> target;
    double psi_sign = 1.0;

    TargetWeight weight() const { return {target, psi_sign}; }
};

struct Scenario {
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    int nx = 400, ny = 400;
    double cfl = 0.45;
    double T = 1.0;
    double dt_strategy = 0.01;
    DensitySpec density;
    std::vector<AgentSpec> agents;
    std::vector<double> snapshot_times;

    int epoch_count() const;
    Grid2D grid() const { return Grid2D::over_box(x0, x1, y0, y1, nx, ny); }
    InitialDensity initial_density() const;
    VelocityModel velocity_model() const;
    std::vector<Vec2> initial_positions() const;
    void validate() const;
};

// TOML subset configuration; unknown keys are rejected.
Scenario load_scenario_text(const std::string& text);
Scenario load_scenario_file(const std::string& path);
std::string scenario_to_toml(const Scenario& s);

struct PresetInfo {
    std::string name;
    std::string description;
};
const std::vector<PresetInfo>& preset_catalog();
Scenario preset(const std::string& name);

struct GameTrace;

// summary.json + trajectory.csv + one CSV/PGM pair per snapshot; returns the
// written paths.
std::vector<std::string> write_outputs(const GameTrace& trace, const Scenario& scenario,
                                       const std::string& out_dir);

} // namespace consensus
