#include "consensus/pde.hpp"

#include <cmath>

#include "consensus/parallel.hpp"

namespace consensus {

double cfl_dt(const Grid2D& grid, double vmax, double cfl, double max_step) {
    if (!(cfl > 0.0) || cfl > 1.0) throw ConfigError("cfl must be in (0, 1]");
    if (vmax < 0.0) throw ConfigError("vmax must be >= 0");
    if (vmax == 0.0) return max_step;
    return cfl * grid.min_spacing() / vmax;
}

ScalarField lxf_sweep(const ScalarField& f, Axis axis, std::span<const double> face_u,
                      double dt) {
    const Grid2D& g = f.grid;
    const double h = axis == Axis::X ? g.dx : g.dy;
    const std::size_t n_faces = axis == Axis::X
                                    ? static_cast<std::size_t>(g.nx + 1) * g.ny
                                    : static_cast<std::size_t>(g.ny + 1) * g.nx;
    if (face_u.size() != n_faces) throw ConfigError("lxf_sweep: face velocity size mismatch");
    if (!(dt > 0.0)) throw ConfigError("lxf_sweep: dt must be > 0");

    const double lam = dt / h;
    for (double u : face_u)
        if (std::abs(u) * lam > 1.0 + 1e-12) throw NumericsError("CFL violated");

    ScalarField out(g);
    const double visc = h / (2.0 * dt);

    if (axis == Axis::X) {
        parallel::parallel_for(g.ny, [&](std::size_t j) {
            const double* row = &f.values[g.index(0, static_cast<int>(j))];
            const double* u = &face_u[j * (g.nx + 1)];
            double* dst = &out.values[g.index(0, static_cast<int>(j))];
            const int n = g.nx;
            // interior flux at face i (between cells i-1 and i); boundary faces
            // use upwind flux against zero exterior
            double f_left = u[0] < 0.0 ? u[0] * row[0] : 0.0;
            for (int i = 0; i < n; ++i) {
                double f_right;
                if (i + 1 == n)
                    f_right = u[n] > 0.0 ? u[n] * row[n - 1] : 0.0;
                else
                    f_right = 0.5 * u[i + 1] * (row[i] + row[i + 1]) -
                              visc * (row[i + 1] - row[i]);
                dst[i] = row[i] - lam * (f_right - f_left);
                f_left = f_right;
            }
        });
    } else {
        parallel::parallel_for(g.ny, [&](std::size_t j_) {
            const int j = static_cast<int>(j_);
            const int n = g.ny;
            for (int i = 0; i < g.nx; ++i) {
                const double c = f.at(i, j);
                const double lo = j == 0 ? c : f.at(i, j - 1);
                const double hi = j == n - 1 ? c : f.at(i, j + 1);
                const double u_lo = face_u[static_cast<std::size_t>(j) * g.nx + i];
                const double u_hi = face_u[static_cast<std::size_t>(j + 1) * g.nx + i];
                double f_lo, f_hi;
                if (j == 0)
                    f_lo = u_lo < 0.0 ? u_lo * c : 0.0;
                else
                    f_lo = 0.5 * u_lo * (lo + c) - visc * (c - lo);
                if (j == n - 1)
                    f_hi = u_hi > 0.0 ? u_hi * c : 0.0;
                else
                    f_hi = 0.5 * u_hi * (c + hi) - visc * (hi - c);
                out.at(i, j) = c - lam * (f_hi - f_lo);
            }
        });
    }
    return out;
}

double max_speed_on_grid(const Grid2D& g, const VelocityModel& model,
                         std::span<const Vec2> P) {
    std::vector<double> row_max(g.ny + 1, 0.0);
    parallel::parallel_for(g.ny + 1, [&](std::size_t j_) {
        const int j = static_cast<int>(j_);
        double m = 0.0;
        if (j < g.ny) {
            const double yc = g.y0 + (j + 0.5) * g.dy;
            for (int i = 0; i <= g.nx; ++i)
                m = std::max(m, model.velocity({g.face_x(i), yc}, P).norm());
        }
        const double yf = g.face_y(j);
        for (int i = 0; i < g.nx; ++i)
            m = std::max(m, model.velocity({g.x0 + (i + 0.5) * g.dx, yf}, P).norm());
        row_max[j_] = m;
    });
    double m = 0.0;
    for (double v : row_max) m = std::max(m, v);
    return m;
}

namespace {

void fill_face_velocities(const Grid2D& g, const VelocityModel& model,
                          std::span<const Vec2> P, std::vector<double>& ux,
                          std::vector<double>& uy) {
    ux.resize(static_cast<std::size_t>(g.nx + 1) * g.ny);
    uy.resize(static_cast<std::size_t>(g.ny + 1) * g.nx);
    parallel::parallel_for(g.ny, [&](std::size_t j_) {
        const int j = static_cast<int>(j_);
        const double yc = g.y0 + (j + 0.5) * g.dy;
        double* dst = &ux[j_ * (g.nx + 1)];
        for (int i = 0; i <= g.nx; ++i) dst[i] = model.velocity({g.face_x(i), yc}, P).x;
    });
    parallel::parallel_for(g.ny + 1, [&](std::size_t j_) {
        const int j = static_cast<int>(j_);
        const double yf = g.face_y(j);
        double* dst = &uy[j_ * g.nx];
        for (int i = 0; i < g.nx; ++i) dst[i] = model.velocity({g.x0 + (i + 0.5) * g.dx, yf}, P).y;
    });
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace

ScalarField advance_interval(const ScalarField& f, const VelocityModel& model,
                             const AgentMotion& motion, double t, double dt_total,
                             double cfl, AdvanceStats* stats, int* sweep_parity) {
    if (!(dt_total > 0.0)) throw ConfigError("advance_interval: dt_total must be > 0");
    if (motion.count() != model.agent_count())
        throw ConfigError("advance_interval: motion/model agent count mismatch");
    if (model.is_identically_zero()) return f;
    const int parity_in = sweep_parity ? (*sweep_parity & 1) : 0;

    const Grid2D& g = f.grid;
    std::vector<Vec2> P(model.agent_count());
    motion.positions(t, P);
    const double v0 = max_speed_on_grid(g, model, P);
    long n_sub = std::max<long>(1, static_cast<long>(std::ceil(dt_total / cfl_dt(g, v0, cfl, dt_total))));

    std::vector<double> ux, uy;
    for (int attempt = 0;; ++attempt) {
        if (attempt > 60) throw NumericsError("advance_interval: substep selection failed");
        ScalarField cur = f;
        bool retry = false;
        double worst = 0.0;
        double attempt_min = 0.0;
        double attempt_clamped = 0.0;
        for (long s = 0; s < n_sub; ++s) {
            const double t0 = t + dt_total * static_cast<double>(s) / static_cast<double>(n_sub);
            const double t1 = t + dt_total * static_cast<double>(s + 1) / static_cast<double>(n_sub);
            const double dt = t1 - t0;
            motion.positions(t0 + 0.5 * dt, P);
            fill_face_velocities(g, model, P, ux, uy);
            const double m = std::max(max_abs(ux) * dt / g.dx, max_abs(uy) * dt / g.dy);
            worst = std::max(worst, m);
            if (m > cfl) {
                n_sub = std::max(n_sub + 1, static_cast<long>(std::ceil(n_sub * m / cfl)));
                retry = true;
                break;
            }
            if ((s & 1) == parity_in) {
                cur = lxf_sweep(cur, Axis::X, ux, dt);
                cur = lxf_sweep(cur, Axis::Y, uy, dt);
            } else {
                cur = lxf_sweep(cur, Axis::Y, uy, dt);
                cur = lxf_sweep(cur, Axis::X, ux, dt);
            }
            // positivity: the update is a convex combination at Courant <= 1
            // wherever the face velocities are resolved; cells straddling an
            // unresolved kernel core can undershoot by a sliver, which is
            // clamped and accounted for
            const double floor = -1e-6 * std::max(1.0, cur.max_abs());
            for (double& v : cur.values) {
                if (v < 0.0) {
                    if (v < floor) throw NumericsError("advance_interval: negative density");
                    attempt_min = std::min(attempt_min, v);
                    attempt_clamped -= v;
                    v = 0.0;
                }
                if (!std::isfinite(v)) throw NumericsError("advance_interval: non-finite density");
            }
        }
        if (!retry) {
            if (stats) {
                stats->max_courant = std::max(stats->max_courant, worst);
                stats->substeps += n_sub;
                stats->min_density = std::min(stats->min_density, attempt_min);
                stats->clamped_mass += attempt_clamped * g.cell_area();
            }
            if (sweep_parity) *sweep_parity = (parity_in + n_sub) & 1;
            return cur;
        }
    }
}

} // namespace consensus
