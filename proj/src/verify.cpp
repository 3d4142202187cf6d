#include "consensus/verify.hpp"

#include <cmath>
#include <fstream>

#include "consensus/characteristics.hpp"
#include "consensus/game.hpp"
#include "consensus/parallel.hpp"
#include "consensus/pde.hpp"

namespace consensus::verify {

using nlohmann::ordered_json;

nlohmann::ordered_json CheckReport::to_json() const {
    ordered_json j;
    j["check"] = check;
    j["lhs"] = lhs;
    j["rhs"] = rhs;
    j["pass"] = pass;
    j["params"] = params.is_null() ? ordered_json::object() : params;
    j["resolutions"] = resolutions;
    j["orders"] = orders;
    return j;
}

namespace {

// sampled sup norms of the kernel field over a box region, a time interval and
// the agent paths visited on it
struct FieldNorms {
    double v = 0.0;        // sup |v|
    double dxv = 0.0;      // sup |D_x v| (spectral)
    double dpv = 0.0;      // sup |D_P v| (conservative block bound)
    double grad_div = 0.0; // sup |grad_x div_x v| = |grad_P div| summed
};

FieldNorms sample_norms(const VelocityModel& model, const AgentMotion& motion, double t0,
                        double t1, const BBox& region, int nx = 80, int nt = 21) {
    FieldNorms n;
    std::vector<Vec2> P(motion.count());
    for (int s = 0; s < nt; ++s) {
        const double t = nt == 1 ? t0 : t0 + (t1 - t0) * s / (nt - 1);
        motion.positions(t, P);
        for (int j = 0; j <= nx; ++j) {
            for (int i = 0; i <= nx; ++i) {
                Vec2 x{region.xmin + region.width() * i / nx,
                       region.ymin + region.height() * j / nx};
                n.v = std::max(n.v, model.velocity(x, P).norm());
                n.dxv = std::max(n.dxv, model.jacobian_dx(x, P).spectral_norm());
                double dp2 = 0.0;
                Vec2 gd{};
                for (int a = 0; a < model.agent_count(); ++a) {
                    const double s2 = model.jacobian_dp(x, P, a).spectral_norm();
                    dp2 += s2 * s2;
                    gd += -model.grad_p_div(x, P, a);
                }
                n.dpv = std::max(n.dpv, std::sqrt(dp2));
                n.grad_div = std::max(n.grad_div, gd.norm());
            }
        }
    }
    return n;
}

double ball_neighborhood_area(const BBox& box, double r) {
    return box.width() * box.height() + 2.0 * r * (box.width() + box.height()) +
           M_PI * r * r;
}

InitialDensity mollified_box(BBox box, double amplitude, double ramp) {
    InitialDensity d;
    d.box = box;
    d.amplitude = amplitude;
    d.ramp_x = ramp;
    d.ramp_y = ramp;
    return d;
}

// L1 distance between two pointwise densities sampled on a grid
template <class F1, class F2>
double grid_l1_distance(const Grid2D& g, const F1& a, const F2& b) {
    std::vector<double> rows(g.ny, 0.0);
    parallel::parallel_for(g.ny, [&](std::size_t j_) {
        const int j = static_cast<int>(j_);
        double acc = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            const Vec2 x = g.cell_center(i, j);
            acc += std::abs(a(x) - b(x));
        }
        rows[j_] = acc;
    });
    return reduce_tree(rows) * g.cell_area();
}

} // namespace

// --- support bound -----------------------------------------------------------

CheckReport check_support_bound(const SupportBoundConfig& cfg) {
    // one attractive agent outside the initial support, short decay so the
    // measured growth stays comparable to the bound
    const Grid2D grid = Grid2D::over_box(0, 10, 0, 10, cfg.resolution, cfg.resolution);
    VelocityModel model;
    model.kernels.push_back({+1.0, 2.0, KernelForm::Linear, 0.0, cfg.kernel_strength});
    StaticMotion motion({Vec2{3.0, 5.0}});
    const InitialDensity rho0 = mollified_box({6.0, 8.0, 2.0, 8.0}, 1.0, 0.0);

    ScalarField f = ScalarField::sample(grid, [&](Vec2 p) { return rho0(p); });
    const auto bbox0 = support_bbox(f, cfg.support_threshold_rel * f.max_abs());

    const ScalarField ft =
        advance_interval(f, model, motion, 0.0, cfg.t_final, 0.45, nullptr);
    const auto bbox1 = support_bbox(ft, cfg.support_threshold_rel * ft.max_abs());

    // |V| over the initial support only; |D_x V| over the whole domain
    const FieldNorms on_support = sample_norms(model, motion, 0.0, cfg.t_final, rho0.box, 60, 3);
    const FieldNorms global = sample_norms(model, motion, 0.0, cfg.t_final, grid.domain(), 100, 3);

    const double radius = on_support.v * cfg.t_final * std::exp(global.dxv * cfg.t_final);
    const double growth = (bbox0 && bbox1) ? bbox0->growth_to(*bbox1) : 0.0;

    CheckReport rep;
    rep.check = "support-bound";
    rep.lhs = growth * cfg.lhs_inflation;
    rep.rhs = radius;
    rep.pass = rep.lhs <= rep.rhs + grid.cell_diagonal();
    rep.resolutions = {cfg.resolution};
    rep.params = {{"t", cfg.t_final},
                  {"threshold_rel", cfg.support_threshold_rel},
                  {"v_sup_on_support", on_support.v},
                  {"dxv_sup", global.dxv},
                  {"slack", grid.cell_diagonal()},
                  {"sampling_region", {grid.domain().xmin, grid.domain().xmax,
                                       grid.domain().ymin, grid.domain().ymax}},
                  {"lhs_inflation", cfg.lhs_inflation}};
    return rep;
}

// --- stability estimates -------------------------------------------------

std::vector<CheckReport> check_stability_estimates(const StabilityConfig& cfg) {
    const Grid2D grid = Grid2D::over_box(0, 10, 0, 10, cfg.resolution, cfg.resolution);
    VelocityModel model;
    model.kernels.push_back({+1.0, 5.0, KernelForm::Linear, 0.0, 1.0});
    const Vec2 P0{3.0, 2.0};
    const Vec2 u1{0.5, 0.3};
    const Vec2 u2 = u1 + cfg.delta_u;
    LinearMotion m1({P0}, {u1}, 0.0);
    LinearMotion m2({P0}, {u2}, 0.0);
    const InitialDensity rho0 = mollified_box({6.0, 8.0, 2.0, 8.0}, 1.0, 0.5);
    const double t = cfg.t_final;
    const BBox region = grid.domain();

    const FieldNorms n1 = sample_norms(model, m1, 0.0, t, region);
    const FieldNorms n2 = sample_norms(model, m2, 0.0, t, region);

    std::vector<CheckReport> out;

    // trajectory gap, sampled over the initial support
    double traj_gap = 0.0;
    {
        const int ns = 15;
        for (int j = 0; j < ns; ++j) {
            for (int i = 0; i < ns; ++i) {
                const Vec2 x{rho0.box.xmin + rho0.box.width() * (i + 0.5) / ns,
                             rho0.box.ymin + rho0.box.height() * (j + 0.5) / ns};
                const Vec2 x1 = backtrack(model, m1, 0.0, t, x).position;
                const Vec2 x2 = backtrack(model, m2, 0.0, t, x).position;
                traj_gap = std::max(traj_gap, (x1 - x2).norm());
            }
        }
    }

    // |V1 - V2| in L1((0,t); L-inf), Simpson in time, dense sampling in x
    double v_gap_l1linf = 0.0;
    {
        const int nt = 33;
        std::vector<Vec2> p1(1), p2(1);
        for (int s = 0; s <= nt; ++s) {
            const double tau = t * s / nt;
            m1.positions(tau, p1);
            m2.positions(tau, p2);
            double sup = 0.0;
            const int nx = 80;
            for (int j = 0; j <= nx; ++j)
                for (int i = 0; i <= nx; ++i) {
                    const Vec2 x{region.xmin + region.width() * i / nx,
                                 region.ymin + region.height() * j / nx};
                    sup = std::max(sup,
                                   (model.velocity(x, p1) - model.velocity(x, p2)).norm());
                }
            const double wgt = (s == 0 || s == nt) ? 1.0 : (s % 2 ? 4.0 : 2.0);
            v_gap_l1linf += wgt * sup;
        }
        v_gap_l1linf *= t / nt / 3.0;
    }

    {
        CheckReport rep;
        rep.check = "stability-ode-gap";
        rep.lhs = traj_gap * cfg.lhs_inflation;
        rep.rhs = v_gap_l1linf * std::exp(n2.dxv * t) * (1.0 + cfg.slack);
        rep.pass = rep.lhs <= rep.rhs;
        rep.resolutions = {cfg.resolution};
        rep.params = {{"t", t}, {"v_gap_l1linf", v_gap_l1linf}, {"dxv2", n2.dxv},
                      {"slack", cfg.slack}, {"lhs_inflation", cfg.lhs_inflation}};
        out.push_back(std::move(rep));
    }

    const double C = std::max(std::max(n1.v, n1.dxv), std::max(n1.dpv, n1.grad_div));
    const double p_gap = t * cfg.delta_u.norm(); // sup over [0,t] of |P1-P2|

    {
        CheckReport rep;
        rep.check = "stability-trajectory";
        rep.lhs = traj_gap * cfg.lhs_inflation;
        rep.rhs = C * t * std::exp(C * t) * p_gap * (1.0 + cfg.slack);
        rep.pass = rep.lhs <= rep.rhs;
        rep.resolutions = {cfg.resolution};
        rep.params = {{"t", t}, {"C", C}, {"p_gap", p_gap}, {"slack", cfg.slack},
                      {"lhs_inflation", cfg.lhs_inflation}};
        out.push_back(std::move(rep));
    }

    // L1 distance of the two exact densities at time t
    {
        KernelFlowField f1{&model, &m1}, f2{&model, &m2};
        const double l1 = grid_l1_distance(
            grid, [&](Vec2 x) { return exact_density(rho0, f1, t, x); },
            [&](Vec2 x) { return exact_density(rho0, f2, t, x); });
        const double radius = C * t * std::exp(C * t);
        const double rhs =
            C *
            (rho0.grad_linf() * ball_neighborhood_area(rho0.box, radius) +
             rho0.l1_norm() * (1.0 + C * t)) *
            t * std::exp(2.0 * C * t) * p_gap;
        CheckReport rep;
        rep.check = "stability-density-l1";
        rep.lhs = l1 * cfg.lhs_inflation;
        rep.rhs = rhs * (1.0 + cfg.slack);
        rep.pass = rep.lhs <= rep.rhs;
        rep.resolutions = {cfg.resolution};
        rep.params = {{"t", t}, {"C", C}, {"grad_rho0_linf", rho0.grad_linf()},
                      {"rho0_l1", rho0.l1_norm()}, {"p_gap", p_gap},
                      {"slack", cfg.slack}, {"lhs_inflation", cfg.lhs_inflation}};
        out.push_back(std::move(rep));
    }

    // frozen local problem: quadratic-in-dt Lipschitz bound in w
    {
        const double dt = cfg.dt_local;
        const Vec2 w1 = u1, w2 = u2;
        SingleMoverMotion sm1({P0}, 0, w1, 0.0);
        SingleMoverMotion sm2({P0}, 0, w2, 0.0);
        KernelFlowField f1{&model, &sm1}, f2{&model, &sm2};
        const double l1 = grid_l1_distance(
            grid, [&](Vec2 x) { return exact_density(rho0, f1, dt, x); },
            [&](Vec2 x) { return exact_density(rho0, f2, dt, x); });

        // constant over positions the moving agent can reach
        const double reach = dt * std::max(w1.norm(), w2.norm());
        BBox pbox{P0.x - reach, P0.x + reach, P0.y - reach, P0.y + reach};
        FieldNorms local{};
        for (double px : {pbox.xmin, 0.5 * (pbox.xmin + pbox.xmax), pbox.xmax}) {
            for (double py : {pbox.ymin, 0.5 * (pbox.ymin + pbox.ymax), pbox.ymax}) {
                StaticMotion sp({Vec2{px, py}});
                const FieldNorms n = sample_norms(model, sp, 0.0, dt, region, 60, 1);
                local.v = std::max(local.v, n.v);
                local.dxv = std::max(local.dxv, n.dxv);
                local.dpv = std::max(local.dpv, n.dpv);
                local.grad_div = std::max(local.grad_div, n.grad_div);
            }
        }
        const double Cl = std::max(std::max(local.v, local.dxv),
                                   std::max(0.5 * local.dpv, local.grad_div));
        const double radius = Cl * std::exp(Cl * dt) * dt;
        const double rhs =
            (rho0.grad_linf() * ball_neighborhood_area(rho0.box, radius) +
             (1.0 + Cl * dt) * rho0.l1_norm()) *
            Cl * std::exp(2.0 * Cl * dt) * dt * dt * (w1 - w2).norm();
        CheckReport rep;
        rep.check = "stability-local-lipschitz";
        rep.lhs = l1 * cfg.lhs_inflation;
        rep.rhs = rhs * (1.0 + cfg.slack);
        rep.pass = rep.lhs <= rep.rhs;
        rep.resolutions = {cfg.resolution};
        rep.params = {{"dt", dt}, {"C", Cl}, {"w_gap", (w1 - w2).norm()},
                      {"slack", cfg.slack}, {"lhs_inflation", cfg.lhs_inflation}};
        out.push_back(std::move(rep));
    }

    return out;
}

// --- gradient expansion ----------------------------------------------------

CheckReport check_gradient_expansion(const GradientExpansionConfig& cfg) {
    const Grid2D grid = Grid2D::over_box(0, 10, 0, 10, cfg.resolution, cfg.resolution);
    VelocityModel model;
    model.kernels.push_back({+1.0, 10.0, KernelForm::Linear, 0.0, 1.0});
    const std::vector<Vec2> P{{3.0, 2.0}};
    const double U = 1.5;
    const TargetWeight psi{Vec2{1.0, 8.0}, +1.0};
    const InitialDensity rho0 =
        mollified_box({6.0, 8.0, 2.0, 8.0}, 1.0, cfg.mollify_cells * grid.dx);
    const ScalarField f = ScalarField::sample(grid, [&](Vec2 p) { return rho0(p); });

    const Vec2 g_int = greedy_gradient_integral(f, P, 0, model, psi);
    const double h_w = cfg.fd_step_rel * U;

    auto fd_grad = [&](Vec2 w, double dt) {
        const double jxp = local_cost(f, P, 0, model, psi, w + Vec2{h_w, 0}, dt);
        const double jxm = local_cost(f, P, 0, model, psi, w - Vec2{h_w, 0}, dt);
        const double jyp = local_cost(f, P, 0, model, psi, w + Vec2{0, h_w}, dt);
        const double jym = local_cost(f, P, 0, model, psi, w - Vec2{0, h_w}, dt);
        return Vec2{(jxp - jxm) / (2.0 * h_w), (jyp - jym) / (2.0 * h_w)};
    };

    std::vector<double> deviations_rel, remainders;
    for (double dt : cfg.dt_ladder) {
        const Vec2 lead = g_int * (dt * dt / 2.0);
        const Vec2 fd = fd_grad({0.0, 0.0}, dt);
        const double r = (fd - lead).norm();
        remainders.push_back(r);
        deviations_rel.push_back(r / lead.norm());
    }

    // least-squares slope of log r vs log dt
    double order = 0.0;
    {
        const std::size_t n = cfg.dt_ladder.size();
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double lx = std::log(cfg.dt_ladder[i]);
            const double ly = std::log(std::max(remainders[i], 1e-300));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }

    // leading term is w-independent: FD gradients at w = 0 and |w| = U/2 agree
    const double dt_small = cfg.dt_ladder.back();
    const Vec2 fd0 = fd_grad({0.0, 0.0}, dt_small);
    const Vec2 fdw = fd_grad(Vec2{std::cos(0.5), std::sin(0.5)} * (U / 2.0), dt_small);
    const double lead_small = g_int.norm() * dt_small * dt_small / 2.0;
    const double w_indep_gap = (fdw - fd0).norm() / lead_small;

    CheckReport rep;
    rep.check = "gradient-expansion";
    rep.lhs = deviations_rel.back() * cfg.lhs_inflation;
    rep.rhs = cfg.tol_smallest;
    rep.pass = rep.lhs <= rep.rhs && order > 2.0 && w_indep_gap <= 0.10;
    rep.resolutions = {cfg.resolution};
    rep.orders = {order};
    rep.params = {{"dt_ladder", cfg.dt_ladder},
                  {"deviation_rel", deviations_rel},
                  {"remainders", remainders},
                  {"remainder_order", order},
                  {"w_independence_gap_rel", w_indep_gap},
                  {"fd_step", h_w},
                  {"lhs_inflation", cfg.lhs_inflation}};
    return rep;
}

// --- finite volume vs characteristics convergence ------------------------------

CheckReport check_convergence(const ConvergenceConfig& cfg) {
    // bounded-speed kernel: the scheme's numerical diffusion scales with the
    // peak speed, and the asymptotic first-order regime starts much earlier
    VelocityModel model;
    model.kernels.push_back({+1.0, 5.0, KernelForm::UnitDirection, 0.005, 1.0});
    StaticMotion motion({Vec2{3.0, 2.0}});
    const InitialDensity rho0 = mollified_box({6.0, 8.0, 2.0, 8.0}, 1.0, cfg.mollify_width);
    KernelFlowField field{&model, &motion};
    const double t = cfg.t_final;

    auto l1_error = [&](int n, double cfl) {
        const Grid2D g = Grid2D::over_box(0, 10, 0, 10, n, n);
        ScalarField f = ScalarField::sample(g, [&](Vec2 p) { return rho0(p); });
        const ScalarField fv = advance_interval(f, model, motion, 0.0, t, cfl);
        std::vector<double> rows(g.ny, 0.0);
        parallel::parallel_for(g.ny, [&](std::size_t j_) {
            const int j = static_cast<int>(j_);
            double acc = 0.0;
            for (int i = 0; i < g.nx; ++i) {
                const Vec2 x = g.cell_center(i, j);
                acc += std::abs(fv.at(i, j) - exact_density(rho0, field, t, x));
            }
            rows[j_] = acc;
        });
        return reduce_tree(rows) * g.cell_area();
    };

    std::vector<double> errors;
    for (int n : cfg.resolutions) errors.push_back(l1_error(n, 0.45));

    std::vector<double> orders;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i)
        orders.push_back(std::log2(errors[i] * cfg.lhs_inflation / errors[i + 1]));

    // dt-only refinement must not beat the spatial floor
    const int n_mid = cfg.resolutions[cfg.resolutions.size() / 2];
    const double e_full = errors[cfg.resolutions.size() / 2];
    const double e_half_dt = l1_error(n_mid, 0.225);
    const bool dt_floor_ok = e_half_dt >= 0.8 * e_full;

    bool orders_ok = true;
    double worst = 0.0;
    for (double o : orders) {
        worst = std::max(worst, std::abs(o - 1.0));
        if (o < 0.7 || o > 1.3) orders_ok = false;
    }

    CheckReport rep;
    rep.check = "fv-vs-characteristics";
    rep.lhs = worst;
    rep.rhs = 0.3;
    rep.pass = orders_ok && dt_floor_ok;
    rep.resolutions = cfg.resolutions;
    rep.orders = orders;
    rep.params = {{"t", t},
                  {"errors", errors},
                  {"mollify_width", cfg.mollify_width},
                  {"dt_half_error", e_half_dt},
                  {"dt_full_error", e_full},
                  {"dt_floor_ok", dt_floor_ok},
                  {"lhs_inflation", cfg.lhs_inflation}};
    return rep;
}

std::vector<CheckReport> run_suite(const SuiteOptions& opts) {
    std::vector<CheckReport> all;
    if (opts.support) {
        for (int res : {200, 400}) {
            SupportBoundConfig cfg;
            cfg.resolution = res;
            cfg.lhs_inflation = opts.lhs_inflation;
            all.push_back(check_support_bound(cfg));
        }
    }
    if (opts.stability) {
        StabilityConfig cfg;
        cfg.lhs_inflation = opts.lhs_inflation;
        for (auto& r : check_stability_estimates(cfg)) all.push_back(std::move(r));
    }
    if (opts.gradient) {
        GradientExpansionConfig cfg;
        cfg.lhs_inflation = opts.lhs_inflation;
        all.push_back(check_gradient_expansion(cfg));
    }
    if (opts.convergence) {
        ConvergenceConfig cfg;
        cfg.lhs_inflation = opts.lhs_inflation;
        all.push_back(check_convergence(cfg));
    }
    return all;
}

void write_report_json(const std::string& path, const std::vector<CheckReport>& reports) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) arr.push_back(r.to_json());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    os << arr.dump(2) << '\n';
    if (!os) throw ConfigError("write failed: " + path);
}

} // namespace consensus::verify
