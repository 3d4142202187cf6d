#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "consensus/scenarios.hpp"

namespace consensus::verify {

struct CheckReport {
    std::string check;
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
    nlohmann::ordered_json params;      // configuration actually used
    std::vector<int> resolutions;       // grid sizes involved, when relevant
    std::vector<double> orders;         // observed orders, when relevant

    nlohmann::ordered_json to_json() const;
};

// Every check takes `lhs_inflation` (default 1): the measured left-hand side
// is multiplied by it before the comparison. The harness self-tests set it to
// 2 and require the check to fail.

struct SupportBoundConfig {
    int resolution = 200;
    double t_final = 1.0;
    double support_threshold_rel = 1e-6; // relative to max|rho|
    double kernel_strength = 1.0;        // 0 freezes the field entirely
    double lhs_inflation = 1.0;
};
// Eq-style support growth bound: bbox growth of the transported density vs
// |V|_{L-inf(spt rho0)} * t * exp(|DxV|_inf t), slack one cell diagonal.
CheckReport check_support_bound(const SupportBoundConfig& cfg);

struct StabilityConfig {
    int resolution = 160;        // density-comparison grid
    double t_final = 1.0;        // horizon for the global estimates
    double dt_local = 0.5;       // horizon for the local (frozen) estimate
    Vec2 delta_u{0.1, 0.0};      // control gap
    double slack = 0.05;
    double lhs_inflation = 1.0;
};
// Four inequalities: characteristic stability (ODE-level and C-constant
// form), L1 continuous dependence of the density, and the frozen local
// problem's quadratic-in-dt Lipschitz bound.
std::vector<CheckReport> check_stability_estimates(const StabilityConfig& cfg);

struct GradientExpansionConfig {
    int resolution = 200;
    double mollify_cells = 8.0;
    std::vector<double> dt_ladder{1e-2, 5e-3, 2.5e-3};
    double fd_step_rel = 1e-4; // FD step = rel * U
    double tol_smallest = 0.05;
    double lhs_inflation = 1.0;
};
// Gradient law: central FD of the local cost vs the analytic leading term
// (dt^2/2) g at each ladder dt; remainder order fit; w-independence probe.
CheckReport check_gradient_expansion(const GradientExpansionConfig& cfg);

struct ConvergenceConfig {
    std::vector<int> resolutions{100, 200, 400};
    double t_final = 0.5;
    double mollify_width = 1.0; // space units
    double lhs_inflation = 1.0;
};
// Finite-volume vs characteristics L1 convergence; observed order must sit in
// [0.7, 1.3] per refinement; plus a dt-only refinement diagnostic.
CheckReport check_convergence(const ConvergenceConfig& cfg);

struct SuiteOptions {
    bool support = true;
    bool stability = true;
    bool gradient = true;
    bool convergence = true;
    double lhs_inflation = 1.0;
};
std::vector<CheckReport> run_suite(const SuiteOptions& opts);

void write_report_json(const std::string& path, const std::vector<CheckReport>& reports);

} // namespace consensus::verify
