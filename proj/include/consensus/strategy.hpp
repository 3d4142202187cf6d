#pragma once

#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "consensus/grid.hpp"
#include "consensus/velocity.hpp"

namespace consensus {

// psi_i(x) = sign * |x - target|; agents without a target weigh everything 0.
struct TargetWeight {
    std::optional<Vec2> target;
    double sign = 1.0;

    double operator()(Vec2 p) const {
        return target ? sign * (p - *target).norm() : 0.0;
    }
    Vec2 gradient(Vec2 p) const {
        if (!target) return {};
        const Vec2 d = p - *target;
        const double r = d.norm();
        return r > 0.0 ? d * (sign / r) : Vec2{};
    }
};

struct GreedySpec {
    double dt_horizon = 0.0;  // 0 -> scenario strategy interval
    double denom_tol = -1.0;  // < 0 -> 1e-12 * (1 + |rho|_L1)
};
struct ConstantSpec {
    Vec2 u;
};
struct ScriptedSpec {
    // piecewise constant from each entry's time until the next one
    std::vector<std::pair<double, Vec2>> table;
};
struct BruteForceSpec {
    int n_directions = 64;
    double dt_horizon = 0.0; // 0 -> scenario strategy interval
};

struct StrategySpec {
    std::variant<GreedySpec, ConstantSpec, ScriptedSpec, BruteForceSpec> variant;
    double speed_cap = 1.0; // U

    bool is_greedy() const { return std::holds_alternative<GreedySpec>(variant); }
};

// Descent direction of the one-interval lookahead cost J_{t,dt}(w): its
// leading-order gradient in w is
//   (dt^2/2) * g,   g = -int [grad(rho)^T D_P v + rho grad_P div_x v] psi dx
// (equivalently g = int rho grad(psi)^T D_P v dx). Returns -U g/|g| when
// |g| > denom_tol, else (0,0). `g_norm_out` reports |g| when non-null.
Vec2 greedy_direction(const ScalarField& rho, std::span<const Vec2> P, int agent,
                      const VelocityModel& model, const TargetWeight& psi, double U,
                      double denom_tol = -1.0, double* g_norm_out = nullptr);

// The raw gradient-law integral g above, before normalization.
Vec2 greedy_gradient_integral(const ScalarField& rho, std::span<const Vec2> P, int agent,
                              const VelocityModel& model, const TargetWeight& psi);

// Frozen local problem: advance rho over [t, t+dt] with only `agent` moving at
// w (competitors pinned at P), then integrate against psi.
double local_cost(const ScalarField& rho, std::span<const Vec2> P, int agent,
                  const VelocityModel& model, const TargetWeight& psi, Vec2 w, double dt,
                  double cfl = 0.45);

// Evaluates local_cost at w = 0 and n_directions points on the radius-U
// circle; returns the earliest minimizer.
Vec2 brute_force_direction(const ScalarField& rho, std::span<const Vec2> P, int agent,
                           const VelocityModel& model, const TargetWeight& psi, double U,
                           double dt, int n_directions, double cfl = 0.45);

// Dispatch by strategy variant at epoch time t; `dt_strategy` supplies the
// default lookahead horizon.
Vec2 choose_control(const StrategySpec& spec, const ScalarField& rho,
                    std::span<const Vec2> P, int agent, const VelocityModel& model,
                    const TargetWeight& psi, double t, double dt_strategy,
                    double cfl = 0.45);

} // namespace consensus
