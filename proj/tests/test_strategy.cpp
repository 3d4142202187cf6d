#include <doctest.h>

#include <cmath>
#include <random>

#include "consensus/scenarios.hpp"
#include "consensus/strategy.hpp"

using namespace consensus;

namespace {

VelocityModel one_kernel(RadialKernel k) {
    VelocityModel m;
    m.kernels.push_back(k);
    return m;
}

struct GradientState {
    Grid2D grid = Grid2D::over_box(0, 10, 0, 10, 200, 200);
    VelocityModel model = one_kernel({+1.0, 10.0, KernelForm::Linear, 0.0});
    std::vector<Vec2> P{{3.0, 2.0}};
    TargetWeight psi{Vec2{1.0, 8.0}, +1.0};
    double U = 1.5;
    ScalarField rho;

    GradientState() {
        InitialDensity d;
        d.box = {6, 8, 2, 8};
        d.amplitude = 1.0;
        d.ramp_x = d.ramp_y = 0.4;
        rho = ScalarField::sample(grid, [&](Vec2 p) { return d(p); });
    }
};

} // namespace

TEST_CASE("greedy direction is zero for empty density or disabled weight") {
    GradientState st;
    ScalarField zero(st.grid);
    CHECK(greedy_direction(zero, st.P, 0, st.model, st.psi, st.U).norm() == 0.0);

    TargetWeight off{std::nullopt, 1.0};
    CHECK(greedy_direction(st.rho, st.P, 0, st.model, off, st.U).norm() == 0.0);
}

TEST_CASE("greedy direction norm is exactly 0 or U") {
    GradientState st;
    const Vec2 w = greedy_direction(st.rho, st.P, 0, st.model, st.psi, st.U);
    CHECK(w.norm() == doctest::Approx(st.U).epsilon(1e-15));
}

TEST_CASE("scaling the weight leaves the direction invariant; negating flips it") {
    GradientState st;
    const Vec2 w1 = greedy_direction(st.rho, st.P, 0, st.model, st.psi, st.U);
    TargetWeight scaled = st.psi;
    scaled.sign = 3.75; // lambda * psi
    const Vec2 w2 = greedy_direction(st.rho, st.P, 0, st.model, scaled, st.U);
    CHECK((w1 - w2).norm() <= 1e-12 * st.U);

    TargetWeight flipped = st.psi;
    flipped.sign = -2.0;
    const Vec2 w3 = greedy_direction(st.rho, st.P, 0, st.model, flipped, st.U);
    CHECK((w1 + w3).norm() <= 1e-12 * st.U);
}

TEST_CASE("greedy direction is a pure function of the snapshot") {
    GradientState st;
    const Vec2 a = greedy_direction(st.rho, st.P, 0, st.model, st.psi, st.U);
    // arbitrary interleaved work must not change the answer
    ScalarField other(st.grid, 0.123);
    (void)greedy_direction(other, st.P, 0, st.model, st.psi, st.U);
    const Vec2 b = greedy_direction(st.rho, st.P, 0, st.model, st.psi, st.U);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
}

TEST_CASE("local cost with dead kernels equals the current cost for any control") {
    GradientState st;
    st.model.kernels[0].strength = 0.0;
    const double now = integrate_weighted(st.rho, st.psi);
    CHECK(local_cost(st.rho, st.P, 0, st.model, st.psi, {0, 0}, 0.02) ==
          doctest::Approx(now).epsilon(1e-15));
    CHECK(local_cost(st.rho, st.P, 0, st.model, st.psi, {1.0, -0.5}, 0.02) ==
          doctest::Approx(now).epsilon(1e-15));
}

TEST_CASE("local cost is Lipschitz in w within the quadratic-in-dt bound") {
    GradientState st;
    const double dt = 0.05;
    const Vec2 w1{0.2, 0.1}, w2{0.5, -0.3};
    const double j1 = local_cost(st.rho, st.P, 0, st.model, st.psi, w1, dt);
    const double j2 = local_cost(st.rho, st.P, 0, st.model, st.psi, w2, dt);
    const double measured = std::abs(j1 - j2) / (w1 - w2).norm();

    // constant of the quadratic bound, sampled crudely over the domain
    double v = 0, dxv = 0, dpv = 0, gd = 0;
    for (int j = 0; j <= 40; ++j)
        for (int i = 0; i <= 40; ++i) {
            const Vec2 x{10.0 * i / 40, 10.0 * j / 40};
            v = std::max(v, st.model.velocity(x, st.P).norm());
            dxv = std::max(dxv, st.model.jacobian_dx(x, st.P).spectral_norm());
            dpv = std::max(dpv, st.model.jacobian_dp(x, st.P, 0).spectral_norm());
            gd = std::max(gd, st.model.grad_p_div(x, st.P, 0).norm());
        }
    const double C = std::max(std::max(v, dxv), std::max(0.5 * dpv, gd));
    InitialDensity d;
    d.box = {6, 8, 2, 8};
    d.ramp_x = d.ramp_y = 0.4;
    const double radius = C * std::exp(C * dt) * dt;
    const double area = d.box.width() * d.box.height() +
                        2 * radius * (d.box.width() + d.box.height()) +
                        M_PI * radius * radius;
    const double bound = (d.grad_linf() * area + (1 + C * dt) * d.l1_norm()) * C *
                         std::exp(2 * C * dt) * dt * dt;
    CHECK(measured <= bound * 1.10);
}

TEST_CASE("finite differences of the local cost recover the gradient law") {
    GradientState st;
    const Vec2 g = greedy_gradient_integral(st.rho, st.P, 0, st.model, st.psi);
    const double dt = 2.5e-3;
    const double h = 1e-4 * st.U;
    Vec2 fd;
    fd.x = (local_cost(st.rho, st.P, 0, st.model, st.psi, {h, 0}, dt) -
            local_cost(st.rho, st.P, 0, st.model, st.psi, {-h, 0}, dt)) /
           (2 * h);
    fd.y = (local_cost(st.rho, st.P, 0, st.model, st.psi, {0, h}, dt) -
            local_cost(st.rho, st.P, 0, st.model, st.psi, {0, -h}, dt)) /
           (2 * h);
    const Vec2 lead = g * (dt * dt / 2.0);
    CHECK((fd - lead).norm() <= 0.05 * lead.norm());
}

TEST_CASE("brute force returns zero when every direction costs the same") {
    GradientState st;
    st.model.kernels[0].strength = 0.0;
    const Vec2 w = brute_force_direction(st.rho, st.P, 0, st.model, st.psi, st.U, 0.02, 8);
    CHECK(w.x == 0.0);
    CHECK(w.y == 0.0);
}

TEST_CASE("brute force argmin lands within one angular bin of the greedy direction") {
    GradientState st;
    const int n_dir = 64;
    double g_norm = 0.0;
    const Vec2 greedy =
        greedy_direction(st.rho, st.P, 0, st.model, st.psi, st.U, -1.0, &g_norm);
    REQUIRE(g_norm > 1e-6);
    const Vec2 brute = brute_force_direction(st.rho, st.P, 0, st.model, st.psi, st.U,
                                             2.5e-3, n_dir);
    const double cosang = greedy.dot(brute) / (greedy.norm() * brute.norm());
    const double ang = std::acos(std::clamp(cosang, -1.0, 1.0));
    CHECK(ang <= 2.0 * (2.0 * M_PI / n_dir));
}

TEST_CASE("duel opening move: brute force and greedy agree for the challenger") {
    // both attractors start stacked at (8,5) over the box [7,9]x[3,7]; the
    // challenger aims at (1,1)
    Grid2D g = Grid2D::over_box(0, 10, 0, 10, 100, 100);
    ScalarField rho = ScalarField::sample(g, [](Vec2 p) {
        return (p.x >= 7 && p.x <= 9 && p.y >= 3 && p.y <= 7) ? 1.0 : 0.0;
    });
    VelocityModel m;
    m.kernels.push_back({+1.0, 5.0, KernelForm::Linear, 0.0});
    m.kernels.push_back({+1.0, 5.0, KernelForm::Linear, 0.0});
    const std::vector<Vec2> P{{8, 5}, {8, 5}};
    const TargetWeight psi{Vec2{1, 1}, +1.0};
    const double U = 1.5;
    const Vec2 greedy = greedy_direction(rho, P, 1, m, psi, U);
    const Vec2 brute = brute_force_direction(rho, P, 1, m, psi, U, 2.5e-3, 64);
    REQUIRE(greedy.norm() > 0.0);
    REQUIRE(brute.norm() > 0.0);
    const double ang = std::acos(
        std::clamp(greedy.dot(brute) / (greedy.norm() * brute.norm()), -1.0, 1.0));
    CHECK(ang <= 2.0 * (2.0 * M_PI / 64));
}

TEST_CASE("scripted and constant strategies clamp to their tables") {
    StrategySpec spec;
    spec.speed_cap = 2.0;
    spec.variant = ScriptedSpec{{{0.0, {1.0, 0.0}}, {1.0, {0.0, 1.0}}}};
    Grid2D g = Grid2D::over_box(0, 1, 0, 1, 4, 4);
    ScalarField rho(g, 1.0);
    VelocityModel m = one_kernel({+1.0, 5.0, KernelForm::Linear, 0.0});
    std::vector<Vec2> P{{0.5, 0.5}};
    TargetWeight psi{Vec2{0, 0}, 1.0};

    CHECK(choose_control(spec, rho, P, 0, m, psi, 0.5, 0.01).x == 1.0);
    CHECK(choose_control(spec, rho, P, 0, m, psi, 1.5, 0.01).y == 1.0);

    spec.variant = ConstantSpec{{-0.7, 0.4}};
    const Vec2 c = choose_control(spec, rho, P, 0, m, psi, 9.0, 0.01);
    CHECK(c.x == -0.7);
    CHECK(c.y == 0.4);
}
