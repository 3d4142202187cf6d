#pragma once

#include <span>
#include <vector>

#include "consensus/geometry.hpp"

namespace consensus {

// Agent positions as a function of time. Implementations fill a caller-owned
// span so hot loops stay allocation-free.
struct AgentMotion {
    virtual ~AgentMotion() = default;
    virtual int count() const = 0;
    virtual void positions(double t, std::span<Vec2> out) const = 0;

    std::vector<Vec2> at(double t) const {
        std::vector<Vec2> p(count());
        positions(t, p);
        return p;
    }
};

struct StaticMotion final : AgentMotion {
    std::vector<Vec2> base;

    explicit StaticMotion(std::vector<Vec2> p) : base(std::move(p)) {}
    int count() const override { return static_cast<int>(base.size()); }
    void positions(double, std::span<Vec2> out) const override {
        for (std::size_t i = 0; i < base.size(); ++i) out[i] = base[i];
    }
};

// P_i(t) = base_i + (t - t0) * vel_i
struct LinearMotion final : AgentMotion {
    std::vector<Vec2> base;
    std::vector<Vec2> vel;
    double t0 = 0.0;

    LinearMotion(std::vector<Vec2> p, std::vector<Vec2> w, double t0_)
        : base(std::move(p)), vel(std::move(w)), t0(t0_) {}
    int count() const override { return static_cast<int>(base.size()); }
    void positions(double t, std::span<Vec2> out) const override {
        const double s = t - t0;
        for (std::size_t i = 0; i < base.size(); ++i) out[i] = base[i] + s * vel[i];
    }
};

// One agent moves at constant speed w from t0, all others stay put. This is
// the frozen local problem a strategy evaluates.
struct SingleMoverMotion final : AgentMotion {
    std::vector<Vec2> base;
    int mover = 0;
    Vec2 w;
    double t0 = 0.0;

    SingleMoverMotion(std::vector<Vec2> p, int mover_, Vec2 w_, double t0_)
        : base(std::move(p)), mover(mover_), w(w_), t0(t0_) {}
    int count() const override { return static_cast<int>(base.size()); }
    void positions(double t, std::span<Vec2> out) const override {
        for (std::size_t i = 0; i < base.size(); ++i) out[i] = base[i];
        out[mover] += (t - t0) * w;
    }
};

} // namespace consensus
