#include <doctest.h>

#include <cmath>

#include "consensus/parallel.hpp"
#include "consensus/pde.hpp"

using namespace consensus;

namespace {

ScalarField gaussian_bump(const Grid2D& g, Vec2 center, double width) {
    return ScalarField::sample(g, [&](Vec2 p) {
        const double r2 = (p - center).norm_sq();
        return std::exp(-r2 / (width * width));
    });
}

std::vector<double> uniform_faces_x(const Grid2D& g, double u) {
    return std::vector<double>(static_cast<std::size_t>(g.nx + 1) * g.ny, u);
}

} // namespace

TEST_CASE("cfl_dt arithmetic, scaling, and the vmax = 0 escape hatch") {
    Grid2D g(0, 0, 100, 100, 0.05, 0.05);
    CHECK(cfl_dt(g, 1.5, 0.45) == doctest::Approx(0.015));
    CHECK(cfl_dt(g, 3.0, 0.45) == doctest::Approx(0.0075));
    CHECK(cfl_dt(g, 0.0, 0.45, 123.0) == 123.0);
    CHECK_THROWS_AS(cfl_dt(g, 1.0, 1.5), ConfigError);
}

TEST_CASE("lxf_sweep keeps constants constant") {
    Grid2D g = Grid2D::over_box(0, 1, 0, 1, 32, 16);
    ScalarField c(g, 0.7);

    SUBCASE("zero velocity") {
        ScalarField out = lxf_sweep(c, Axis::X, uniform_faces_x(g, 0.0), 0.01);
        for (double v : out.values) CHECK(v == doctest::Approx(0.7).epsilon(1e-15));
    }
    SUBCASE("uniform velocity") {
        const double dt = 0.9 * g.dx / 0.5;
        ScalarField out = lxf_sweep(c, Axis::X, uniform_faces_x(g, 0.5), dt);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i) // boundary cells exchange with outside
                CHECK(out.at(i, j) == doctest::Approx(0.7).epsilon(1e-14));
    }
}

TEST_CASE("lxf_sweep rejects Courant violations without touching the field") {
    Grid2D g = Grid2D::over_box(0, 1, 0, 1, 16, 8);
    ScalarField f(g, 1.0);
    CHECK_THROWS_AS(lxf_sweep(f, Axis::X, uniform_faces_x(g, 2.0), g.dx), NumericsError);
}

TEST_CASE("mass is conserved exactly when support stays clear of the boundary") {
    Grid2D g = Grid2D::over_box(0, 1, 0, 1, 64, 32);
    ScalarField f = ScalarField::sample(g, [&](Vec2 p) {
        return (p.x > 0.3 && p.x < 0.7 && p.y > 0.2 && p.y < 0.8) ? 1.0 : 0.0;
    });
    const double before = total_mass(f);
    const double dt = 0.8 * g.dx / 0.5;
    ScalarField out = lxf_sweep(f, Axis::X, uniform_faces_x(g, 0.5), dt);
    const double after = total_mass(out);
    CHECK(std::abs(after - before) <= 1e-12 * before);
}

TEST_CASE("sweep mass change equals net boundary flux") {
    Grid2D g = Grid2D::over_box(0, 1, 0, 1, 48, 24);
    // support touching the right boundary so mass leaves
    ScalarField f = ScalarField::sample(
        g, [&](Vec2 p) { return p.x > 0.8 ? 1.0 + 0.3 * std::sin(9 * p.y) : 0.0; });
    const double u = 0.4;
    const double dt = 0.7 * g.dx / u;
    ScalarField out = lxf_sweep(f, Axis::X, uniform_faces_x(g, u), dt);
    // outflow through the right boundary: upwind flux u * rho_edge per row
    double flux = 0.0;
    for (int j = 0; j < g.ny; ++j) flux += u * f.at(g.nx - 1, j);
    flux *= dt * g.dy;
    const double before = total_mass(f);
    const double after = total_mass(out);
    CHECK(std::abs((before - after) - flux) <= 1e-12 * before);
}

TEST_CASE("advection of a smooth bump converges at first order") {
    // uniform velocity, error against the exactly translated profile
    const double u = 0.5, t_final = 0.25;
    auto l1_error = [&](int n) {
        Grid2D g = Grid2D::over_box(0, 2, 0, 1, 2 * n, n);
        auto profile = [&](Vec2 p, double t) {
            const double r2 = (p.x - 0.5 - u * t) * (p.x - 0.5 - u * t) +
                              (p.y - 0.5) * (p.y - 0.5);
            return std::exp(-r2 / 0.01);
        };
        ScalarField f = ScalarField::sample(g, [&](Vec2 p) { return profile(p, 0.0); });
        const double dt = 0.45 * g.dx / u;
        const int steps = static_cast<int>(std::ceil(t_final / dt));
        const double dt_actual = t_final / steps;
        auto faces = uniform_faces_x(g, u);
        for (int s = 0; s < steps; ++s) f = lxf_sweep(f, Axis::X, faces, dt_actual);
        double err = 0.0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                err += std::abs(f.at(i, j) - profile(g.cell_center(i, j), t_final));
        return err * g.cell_area();
    };
    const double e1 = l1_error(64);
    const double e2 = l1_error(128);
    const double ratio = e1 / e2;
    CHECK(ratio >= 1.6);
    CHECK(ratio <= 2.6);
}

TEST_CASE("advance_interval with a dead model returns the input bitwise") {
    Grid2D g = Grid2D::over_box(0, 10, 0, 10, 50, 50);
    ScalarField f = gaussian_bump(g, {5, 5}, 1.0);
    VelocityModel m;
    m.kernels.push_back({+1.0, 5.0, KernelForm::UnitDirection, 0.005, 0.0});
    StaticMotion motion({Vec2{2, 2}});
    ScalarField out = advance_interval(f, m, motion, 0.0, 0.37);
    REQUIRE(out.values.size() == f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(out.values[i] == f.values[i]);
}

TEST_CASE("advance_interval keeps the density nonnegative and respects the cfl") {
    Grid2D g = Grid2D::over_box(0, 10, 0, 10, 80, 80);
    ScalarField f = ScalarField::sample(g, [&](Vec2 p) {
        return (p.x > 3 && p.x < 7 && p.y > 3 && p.y < 7) ? 1.0 : 0.0;
    });
    VelocityModel m;
    m.kernels.push_back({-1.0, 5.0, KernelForm::UnitDirection, 0.005}); // repulsive
    StaticMotion motion({Vec2{5, 5}});
    AdvanceStats stats;
    ScalarField out = advance_interval(f, m, motion, 0.0, 0.5, 0.45, &stats);
    for (double v : out.values) CHECK(v >= 0.0);
    CHECK(stats.max_courant <= 0.45 + 1e-12);
    CHECK(stats.substeps >= 1);
}

TEST_CASE("symmetric setup stays symmetric under alternating sweeps") {
    // square grid with dyadic spacing, agent at the exact center, square bump
    const int n = 64;
    Grid2D g = Grid2D::over_box(0, 8, 0, 8, n, n);
    ScalarField f = ScalarField::sample(g, [&](Vec2 p) {
        const double r2 = (p - Vec2{4, 4}).norm_sq();
        return std::exp(-r2);
    });
    VelocityModel m;
    m.kernels.push_back({+1.0, 4.0, KernelForm::Linear, 0.0});
    StaticMotion motion({Vec2{4, 4}});
    // two equal intervals with threaded parity: the sweep sequence alternates
    // globally, so every XY substep is cancelled by a YX twin
    int parity = 0;
    ScalarField out = advance_interval(f, m, motion, 0.0, 0.25, 0.45, nullptr, &parity);
    out = advance_interval(out, m, motion, 0.25, 0.25, 0.45, nullptr, &parity);
    // axis mirrors are preserved exactly by each sweep (up to rounding);
    // the diagonal swap only survives at splitting order, restored pairwise
    double mirror_gap = 0.0, diagonal_gap = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            mirror_gap = std::max(mirror_gap, std::abs(out.at(i, j) - out.at(n - 1 - i, j)));
            mirror_gap = std::max(mirror_gap, std::abs(out.at(i, j) - out.at(i, n - 1 - j)));
            diagonal_gap = std::max(diagonal_gap, std::abs(out.at(i, j) - out.at(j, i)));
        }
    CHECK(mirror_gap <= 1e-12);
    CHECK(diagonal_gap <= 1e-3);

    // without pairing, one leftover substep leaves a visibly larger diagonal skew
    AdvanceStats stats;
    ScalarField once = advance_interval(f, m, motion, 0.0, 0.25, 0.45, &stats);
    double skew_once = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            skew_once = std::max(skew_once, std::abs(once.at(i, j) - once.at(j, i)));
    if (stats.substeps % 2 == 1) CHECK(diagonal_gap < skew_once);
}

TEST_CASE("advance_interval is bitwise identical across thread counts") {
    Grid2D g = Grid2D::over_box(0, 10, 0, 10, 70, 70);
    ScalarField f = gaussian_bump(g, {6, 4}, 0.8);
    VelocityModel m;
    m.kernels.push_back({+1.0, 5.0, KernelForm::UnitDirection, 0.005});
    LinearMotion motion({Vec2{3, 3}}, {Vec2{0.5, 0.25}}, 0.0);

    parallel::set_threads(1);
    ScalarField a = advance_interval(f, m, motion, 0.0, 0.3);
    parallel::set_threads(3);
    ScalarField b = advance_interval(f, m, motion, 0.0, 0.3);
    parallel::set_threads(0 /* reset to env/hardware */);
    parallel::set_threads(2);
    REQUIRE(a.values.size() == b.values.size());
    for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
}
