#pragma once

#include <span>
#include <vector>

#include "consensus/geometry.hpp"

namespace consensus {

enum class KernelForm {
    UnitDirection, // a(xi) = sign * strength * exp(-xi/L) / sqrt(xi^2 + eps^2)
    Linear,        // a(xi) = sign * strength * exp(-xi/L)
};

struct RadialKernel {
    double sign = 1.0;         // +1 attractive, -1 repulsive
    double decay_length = 1.0; // L > 0
    KernelForm form = KernelForm::UnitDirection;
    double epsilon = 0.0;      // regularization length, >= 0
    double strength = 1.0;     // 0 disables the agent's pull entirely

    struct Coeffs {
        double a;   // a(xi)
        double da;  // a'(xi)
        double dda; // a''(xi)
    };

    double prefactor() const { return sign * strength; }
    bool is_zero() const { return prefactor() == 0.0; }
    // UnitDirection with eps = 0 is singular at xi = 0
    bool singular_at_zero() const {
        return form == KernelForm::UnitDirection && epsilon == 0.0;
    }

    double a(double xi) const;
    Coeffs coeffs(double xi) const;

    void validate() const;
    bool operator==(const RadialKernel&) const = default;
};

// v(t,x,P) = sum_i a_i(|x - P_i|) (P_i - x); autonomous in t.
struct VelocityModel {
    std::vector<RadialKernel> kernels;

    int agent_count() const { return static_cast<int>(kernels.size()); }
    bool is_identically_zero() const;

    Vec2 velocity(Vec2 x, std::span<const Vec2> P) const;
    // div_x v = sum_i [-2 a_i(xi_i) - a_i'(xi_i) xi_i]
    double divergence(Vec2 x, std::span<const Vec2> P) const;
    // D_{P_i} v = a_i I + a_i'(xi) (P_i-x)(P_i-x)^T / xi (limit a_i(0) I at xi=0)
    Mat2 jacobian_dp(Vec2 x, std::span<const Vec2> P, int agent) const;
    // D_x v = -sum_i D_{P_i} v
    Mat2 jacobian_dx(Vec2 x, std::span<const Vec2> P) const;
    // grad_{P_i} div_x v = -(3 a_i' + a_i'' xi) (P_i-x)/xi  ((0,0) at xi=0)
    Vec2 grad_p_div(Vec2 x, std::span<const Vec2> P, int agent) const;
    // grad_x div_x v = -sum_i grad_{P_i} div_x v
    Vec2 grad_x_div(Vec2 x, std::span<const Vec2> P) const;

private:
    void check_args(Vec2 x, std::span<const Vec2> P) const;
};

} // namespace consensus
