#include "consensus/characteristics.hpp"

namespace consensus {

namespace {

struct VarState {
    Vec2 q;
    Mat2 y;
};

} // namespace

VariationalResult variational_dwx(const VelocityModel& model, std::span<const Vec2> P_at_t,
                                  int agent, double t, double dt, Vec2 w, Vec2 x,
                                  VariationalDirection direction, double h_ode) {
    if (!(dt > 0.0)) throw ConfigError("variational_dwx: dt must be > 0");
    if (agent < 0 || agent >= model.agent_count())
        throw ConfigError("variational_dwx: bad agent index");
    if (h_ode <= 0.0) h_ode = dt / 20.0;

    std::vector<Vec2> P(P_at_t.begin(), P_at_t.end());
    const Vec2 base = P[agent];

    auto rhs = [&](double tau, const VarState& s) -> VarState {
        P[agent] = base + (tau - t) * w;
        const Vec2 dq = model.velocity(s.q, P);
        const Mat2 dxv = model.jacobian_dx(s.q, P);
        const Mat2 dpv = model.jacobian_dp(s.q, P, agent);
        VarState d;
        d.q = dq;
        d.y = dxv.matmul(s.y) + dpv * (tau - t);
        return d;
    };

    const bool forward = direction == VariationalDirection::Forward;
    const double t_start = forward ? t : t + dt;
    const double t_end = forward ? t + dt : t;
    const long n = std::max<long>(1, static_cast<long>(std::ceil(dt / h_ode)));
    const double h = (t_end - t_start) / static_cast<double>(n);

    VariationalResult out;
    out.times.reserve(n + 1);
    out.positions.reserve(n + 1);
    out.dwx.reserve(n + 1);

    VarState s{x, Mat2{}};
    out.times.push_back(t_start);
    out.positions.push_back(s.q);
    out.dwx.push_back(s.y);

    auto add = [](const VarState& a, const VarState& b, double c) {
        return VarState{a.q + c * b.q, a.y + b.y * c};
    };

    for (long step = 0; step < n; ++step) {
        const double tau = t_start + h * static_cast<double>(step);
        const VarState k1 = rhs(tau, s);
        const VarState k2 = rhs(tau + 0.5 * h, add(s, k1, 0.5 * h));
        const VarState k3 = rhs(tau + 0.5 * h, add(s, k2, 0.5 * h));
        const VarState k4 = rhs(tau + h, add(s, k3, h));
        s.q += (h / 6.0) * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
        s.y += (k1.y + k2.y * 2.0 + k3.y * 2.0 + k4.y) * (h / 6.0);
        if (!std::isfinite(s.q.x) || !std::isfinite(s.q.y))
            throw NumericsError("characteristic blow-up");
        out.times.push_back(tau + h);
        out.positions.push_back(s.q);
        out.dwx.push_back(s.y);
    }
    return out;
}

} // namespace consensus
