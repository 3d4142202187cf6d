#include "consensus/strategy.hpp"

#include <cmath>

#include "consensus/motion.hpp"
#include "consensus/parallel.hpp"
#include "consensus/pde.hpp"

namespace consensus {

Vec2 greedy_gradient_integral(const ScalarField& rho, std::span<const Vec2> P, int agent,
                              const VelocityModel& model, const TargetWeight& psi) {
    // g = -int [grad(rho)^T D_P v + rho grad_P div_x v] psi dx, evaluated after
    // integrating the derivative off the density:
    //     g = int rho(x) grad(psi)(x)^T D_P v(x) dx.
    // The transported density develops kernel-scale spikes that central
    // differences cannot resolve; this form never differentiates it.
    const Grid2D& g = rho.grid;
    std::vector<double> row_x(g.ny, 0.0), row_y(g.ny, 0.0);
    std::vector<Vec2> pos(P.begin(), P.end());

    parallel::parallel_for(g.ny, [&](std::size_t j_) {
        const int j = static_cast<int>(j_);
        double ax = 0.0, ay = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            const double r = rho.at(i, j);
            if (r == 0.0) continue;
            const Vec2 x = g.cell_center(i, j);
            const Mat2 dpv = model.jacobian_dp(x, pos, agent);
            const Vec2 term = dpv.apply_left(psi.gradient(x)) * r;
            ax += term.x;
            ay += term.y;
        }
        row_x[j_] = ax;
        row_y[j_] = ay;
    });
    const Vec2 out{reduce_tree(row_x) * g.cell_area(), reduce_tree(row_y) * g.cell_area()};
    if (!std::isfinite(out.x) || !std::isfinite(out.y))
        throw NumericsError("strategy integrand not finite");
    return out;
}

Vec2 greedy_direction(const ScalarField& rho, std::span<const Vec2> P, int agent,
                      const VelocityModel& model, const TargetWeight& psi, double U,
                      double denom_tol, double* g_norm_out) {
    const Vec2 grad = greedy_gradient_integral(rho, P, agent, model, psi);
    const double norm = grad.norm();
    if (g_norm_out) *g_norm_out = norm;
    if (denom_tol < 0.0) denom_tol = 1e-12 * (1.0 + total_mass(rho));
    if (norm <= denom_tol) return {};
    return grad * (-U / norm);
}

double local_cost(const ScalarField& rho, std::span<const Vec2> P, int agent,
                  const VelocityModel& model, const TargetWeight& psi, Vec2 w, double dt,
                  double cfl) {
    if (!(dt > 0.0)) throw ConfigError("local_cost: dt must be > 0");
    SingleMoverMotion motion(std::vector<Vec2>(P.begin(), P.end()), agent, w, 0.0);
    const ScalarField advanced = advance_interval(rho, model, motion, 0.0, dt, cfl);
    return integrate_weighted(advanced, psi);
}

Vec2 brute_force_direction(const ScalarField& rho, std::span<const Vec2> P, int agent,
                           const VelocityModel& model, const TargetWeight& psi, double U,
                           double dt, int n_directions, double cfl) {
    if (n_directions < 4) throw ConfigError("brute_force_direction: n_directions must be >= 4");
    Vec2 best_w{};
    double best = local_cost(rho, P, agent, model, psi, best_w, dt, cfl);
    for (int d = 0; d < n_directions; ++d) {
        const double ang = 2.0 * M_PI * d / n_directions;
        const Vec2 w{U * std::cos(ang), U * std::sin(ang)};
        const double cost = local_cost(rho, P, agent, model, psi, w, dt, cfl);
        if (cost < best) {
            best = cost;
            best_w = w;
        }
    }
    return best_w;
}

Vec2 choose_control(const StrategySpec& spec, const ScalarField& rho,
                    std::span<const Vec2> P, int agent, const VelocityModel& model,
                    const TargetWeight& psi, double t, double dt_strategy, double cfl) {
    const double U = spec.speed_cap;
    if (const auto* c = std::get_if<ConstantSpec>(&spec.variant)) return c->u;
    if (const auto* s = std::get_if<ScriptedSpec>(&spec.variant)) {
        Vec2 w{};
        for (const auto& [ti, wi] : s->table) {
            if (ti <= t + 1e-12) w = wi;
            else break;
        }
        return w;
    }
    if (const auto* gr = std::get_if<GreedySpec>(&spec.variant)) {
        (void)dt_strategy; // the leading-order direction does not depend on the horizon
        return greedy_direction(rho, P, agent, model, psi, U, gr->denom_tol);
    }
    const auto& bf = std::get<BruteForceSpec>(spec.variant);
    const double dt = bf.dt_horizon > 0.0 ? bf.dt_horizon : dt_strategy;
    return brute_force_direction(rho, P, agent, model, psi, U, dt, bf.n_directions, cfl);
}

} // namespace consensus
