#pragma once

#include <span>

#include "consensus/grid.hpp"
#include "consensus/motion.hpp"
#include "consensus/velocity.hpp"

namespace consensus {

enum class Axis { X, Y };

// CFL-limited step: cfl * min(dx,dy) / vmax; `max_step` when vmax == 0.
double cfl_dt(const Grid2D& grid, double vmax, double cfl, double max_step = 1e30);

// One conservative Lax-Friedrichs sweep along `axis`.
//   rho_c' = rho_c - (dt/h) (F_{c+1/2} - F_{c-1/2})
//   F_{c+1/2} = u_{c+1/2} (rho_c + rho_{c+1}) / 2 - (h / 2 dt) (rho_{c+1} - rho_c)
// Ghost cells are zero-order extrapolated (outflow). Boundary faces where the
// velocity points inward use the upwind flux with zero exterior density, so
// the copied ghost cannot feed mass into the domain.
//
// `face_u`: normal velocity at faces; layout (nx+1) x ny for Axis::X
// (index j*(nx+1)+i), nx x (ny+1) for Axis::Y (index j*nx+i).
// Throws NumericsError("CFL violated") if any |u| dt / h > 1; no partial update.
ScalarField lxf_sweep(const ScalarField& f, Axis axis, std::span<const double> face_u,
                      double dt);

struct AdvanceStats {
    double max_courant = 0.0;  // largest per-face |u| dt / h seen
    long substeps = 0;
    double min_density = 0.0;  // smallest value seen after any sweep (pre-clamp)
    double clamped_mass = 0.0; // total undershoot mass zeroed at kernel cores
};

// Advance d_t rho + div(rho v(x, P(t))) = 0 over [t, t+dt_total] with
// dimensional splitting. Equal CFL-compliant substeps; sweep order alternates
// X-then-Y / Y-then-X every substep; face velocities are sampled pointwise at
// face midpoints with agents at the substep midpoint time. If the model is
// identically zero the input is returned unchanged (bitwise).
//
// `sweep_parity` carries the alternation across successive intervals (the game
// loop threads it through its epochs); null starts at X-then-Y.
ScalarField advance_interval(const ScalarField& f, const VelocityModel& model,
                             const AgentMotion& motion, double t, double dt_total,
                             double cfl = 0.45, AdvanceStats* stats = nullptr,
                             int* sweep_parity = nullptr);

// Max |v| over cell centers and face midpoints with agents placed at P.
double max_speed_on_grid(const Grid2D& grid, const VelocityModel& model,
                         std::span<const Vec2> P);

} // namespace consensus
