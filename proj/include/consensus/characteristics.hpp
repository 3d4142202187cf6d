#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "consensus/geometry.hpp"
#include "consensus/motion.hpp"
#include "consensus/velocity.hpp"

namespace consensus {

// Point transported along a characteristic together with the accumulated
// divergence integral int_{t_from}^{t_to} div_x v(tau, X(tau)) dtau (signed
// by the direction of integration).
struct FlowPoint {
    Vec2 position;
    double divergence_integral = 0.0;
};

// A time-dependent velocity environment: anything exposing velocity(x,t),
// divergence(x,t) and jacobian_x(x,t). The kernel family is the production
// environment; tests can plug in engineered fields.
struct KernelFlowField {
    const VelocityModel* model;
    const AgentMotion* motion;

    Vec2 velocity(Vec2 x, double t) const {
        thread_local std::vector<Vec2> P;
        P.resize(motion->count());
        motion->positions(t, P);
        return model->velocity(x, P);
    }
    double divergence(Vec2 x, double t) const {
        thread_local std::vector<Vec2> P;
        P.resize(motion->count());
        motion->positions(t, P);
        return model->divergence(x, P);
    }
    Mat2 jacobian_x(Vec2 x, double t) const {
        thread_local std::vector<Vec2> P;
        P.resize(motion->count());
        motion->positions(t, P);
        return model->jacobian_dx(x, P);
    }
};

inline constexpr double kDefaultOdeStep = 1.0 / 256.0;

// Classic 4-stage Runge-Kutta on the augmented state (position, divergence
// integral); the quadrature reuses the RK4 stage nodes. Integrates from
// t_from to t_to (either direction).
template <class Field>
FlowPoint backtrack(const Field& field, double t_from, double t_to, Vec2 x,
                    double h_ode = kDefaultOdeStep) {
    const double span = t_to - t_from;
    FlowPoint fp{x, 0.0};
    if (span == 0.0) return fp;
    const long n = std::max<long>(1, static_cast<long>(std::ceil(std::abs(span) / h_ode)));
    const double h = span / static_cast<double>(n);
    Vec2 q = x;
    double s = 0.0;
    for (long step = 0; step < n; ++step) {
        const double t = t_from + h * static_cast<double>(step);
        const Vec2 k1 = field.velocity(q, t);
        const double d1 = field.divergence(q, t);
        const Vec2 q2 = q + (0.5 * h) * k1;
        const Vec2 k2 = field.velocity(q2, t + 0.5 * h);
        const double d2 = field.divergence(q2, t + 0.5 * h);
        const Vec2 q3 = q + (0.5 * h) * k2;
        const Vec2 k3 = field.velocity(q3, t + 0.5 * h);
        const double d3 = field.divergence(q3, t + 0.5 * h);
        const Vec2 q4 = q + h * k3;
        const Vec2 k4 = field.velocity(q4, t + h);
        const double d4 = field.divergence(q4, t + h);
        q += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        s += (h / 6.0) * (d1 + 2.0 * d2 + 2.0 * d3 + d4);
        if (!std::isfinite(q.x) || !std::isfinite(q.y) || !std::isfinite(s))
            throw NumericsError("characteristic blow-up");
    }
    fp.position = q;
    fp.divergence_integral = s;
    return fp;
}

inline FlowPoint backtrack(const VelocityModel& model, const AgentMotion& motion,
                           double t_from, double t_to, Vec2 x,
                           double h_ode = kDefaultOdeStep) {
    return backtrack(KernelFlowField{&model, &motion}, t_from, t_to, x, h_ode);
}

// rho(t,x) = rho0(X(0;t,x)) exp(-int_0^t div_x v(tau, X(tau;t,x)) dtau).
// Backtracking from t to 0 accumulates exactly the negated exponent.
template <class Field, class Rho0>
double exact_density(const Rho0& rho0, const Field& field, double t, Vec2 x,
                     double h_ode = kDefaultOdeStep) {
    const FlowPoint fp = backtrack(field, t, 0.0, x, h_ode);
    return rho0(fp.position) * std::exp(fp.divergence_integral);
}

template <class Rho0>
double exact_density(const Rho0& rho0, const VelocityModel& model,
                     const AgentMotion& motion, double t, Vec2 x,
                     double h_ode = kDefaultOdeStep) {
    return exact_density(rho0, KernelFlowField{&model, &motion}, t, x, h_ode);
}

// Variational state along the frozen local problem of one controlled agent:
//   xi' = v(xi, P(t) + (tau-t) w)            (only `agent` moves)
//   Y'  = D_x v(...) Y + (tau-t) D_P v(...)
// Forward: xi(t) = x, Y(t) = 0, integrated to t+dt. Backward: xi(t+dt) = x,
// Y(t+dt) = 0, integrated down to t. Y is the derivative of the flow map
// with respect to w.
struct VariationalResult {
    std::vector<double> times;
    std::vector<Vec2> positions;
    std::vector<Mat2> dwx; // Y(tau)
};

enum class VariationalDirection { Forward, Backward };

VariationalResult variational_dwx(const VelocityModel& model, std::span<const Vec2> P_at_t,
                                  int agent, double t, double dt, Vec2 w, Vec2 x,
                                  VariationalDirection direction = VariationalDirection::Forward,
                                  double h_ode = 0.0 /* 0 -> dt/20 */);

} // namespace consensus
