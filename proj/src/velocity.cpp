#include "consensus/velocity.hpp"

namespace consensus {

void RadialKernel::validate() const {
    if (!(decay_length > 0.0)) throw ConfigError("kernel: decay_length must be > 0");
    if (epsilon < 0.0) throw ConfigError("kernel: epsilon must be >= 0");
    if (strength < 0.0) throw ConfigError("kernel: strength must be >= 0");
    if (sign != 1.0 && sign != -1.0) throw ConfigError("kernel: sign must be +1 or -1");
}

double RadialKernel::a(double xi) const {
    const double s = prefactor();
    if (s == 0.0) return 0.0;
    const double e = std::exp(-xi / decay_length);
    if (form == KernelForm::Linear) return s * e;
    if (epsilon == 0.0) {
        if (xi == 0.0) throw NumericsError("kernel singular at agent position");
        return s * e / xi;
    }
    return s * e / std::sqrt(xi * xi + epsilon * epsilon);
}

RadialKernel::Coeffs RadialKernel::coeffs(double xi) const {
    const double s = prefactor();
    if (s == 0.0) return {0.0, 0.0, 0.0};
    const double L = decay_length;
    const double e = std::exp(-xi / L);
    if (form == KernelForm::Linear)
        return {s * e, -s * e / L, s * e / (L * L)};
    if (epsilon == 0.0 && xi == 0.0)
        throw NumericsError("kernel singular at agent position");
    const double q = 1.0 / std::sqrt(xi * xi + epsilon * epsilon);
    const double q3 = q * q * q;
    const double a = s * e * q;
    const double da = s * e * (-q / L - xi * q3);
    const double dda = s * e * (q / (L * L) + 2.0 * xi * q3 / L - q3 + 3.0 * xi * xi * q3 * q * q);
    return {a, da, dda};
}

bool VelocityModel::is_identically_zero() const {
    for (const auto& k : kernels)
        if (!k.is_zero()) return false;
    return true;
}

void VelocityModel::check_args(Vec2, std::span<const Vec2> P) const {
    if (P.size() != kernels.size())
        throw ConfigError("velocity: position count does not match kernel count");
}

Vec2 VelocityModel::velocity(Vec2 x, std::span<const Vec2> P) const {
    check_args(x, P);
    Vec2 out;
    for (std::size_t i = 0; i < kernels.size(); ++i) {
        const RadialKernel& k = kernels[i];
        if (k.is_zero()) continue;
        const Vec2 d = P[i] - x;
        const double xi = d.norm();
        if (xi == 0.0 && k.form == KernelForm::Linear) continue; // a(0)*(0,0)
        out += k.a(xi) * d;
    }
    return out;
}

double VelocityModel::divergence(Vec2 x, std::span<const Vec2> P) const {
    check_args(x, P);
    double out = 0.0;
    for (std::size_t i = 0; i < kernels.size(); ++i) {
        const RadialKernel& k = kernels[i];
        if (k.is_zero()) continue;
        const double xi = (P[i] - x).norm();
        const auto c = k.coeffs(xi);
        out += -2.0 * c.a - c.da * xi;
    }
    return out;
}

Mat2 VelocityModel::jacobian_dp(Vec2 x, std::span<const Vec2> P, int agent) const {
    check_args(x, P);
    const RadialKernel& k = kernels[agent];
    if (k.is_zero()) return {};
    const Vec2 d = P[agent] - x;
    const double xi = d.norm();
    const auto c = k.coeffs(xi);
    Mat2 out = Mat2::identity() * c.a;
    if (xi > 0.0) {
        // exact derivative carries 1/xi; the outer product itself is O(xi^2),
        // so the term vanishes in the limit and xi = 0 needs no special value
        out += Mat2::outer(d, d) * (c.da / xi);
    }
    return out;
}

Mat2 VelocityModel::jacobian_dx(Vec2 x, std::span<const Vec2> P) const {
    check_args(x, P);
    Mat2 out;
    for (int i = 0; i < agent_count(); ++i) out += jacobian_dp(x, P, i) * -1.0;
    return out;
}

Vec2 VelocityModel::grad_p_div(Vec2 x, std::span<const Vec2> P, int agent) const {
    check_args(x, P);
    const RadialKernel& k = kernels[agent];
    if (k.is_zero()) return {};
    const Vec2 d = P[agent] - x;
    const double xi = d.norm();
    if (xi == 0.0) return {}; // symmetric point, central value
    const auto c = k.coeffs(xi);
    return d * (-(3.0 * c.da + c.dda * xi) / xi);
}

Vec2 VelocityModel::grad_x_div(Vec2 x, std::span<const Vec2> P) const {
    check_args(x, P);
    Vec2 out;
    for (int i = 0; i < agent_count(); ++i) out += -grad_p_div(x, P, i);
    return out;
}

} // namespace consensus
