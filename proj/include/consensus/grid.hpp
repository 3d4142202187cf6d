#pragma once

#include <optional>
#include <string>
#include <vector>

#include "consensus/geometry.hpp"

namespace consensus {

// Cell-centered rectangular grid. A field value represents the cell average,
// identified with the value at the cell center.
struct Grid2D {
    double x0 = 0.0;
    double y0 = 0.0;
    int nx = 0;
    int ny = 0;
    double dx = 0.0;
    double dy = 0.0;

    Grid2D() = default;
    Grid2D(double x0_, double y0_, int nx_, int ny_, double dx_, double dy_);

    static Grid2D over_box(double x0, double x1, double y0, double y1, int nx, int ny);

    Vec2 cell_center(int i, int j) const {
        return {x0 + (i + 0.5) * dx, y0 + (j + 0.5) * dy};
    }
    // face coordinates (i in [0,nx], j in [0,ny])
    double face_x(int i) const { return x0 + i * dx; }
    double face_y(int j) const { return y0 + j * dy; }

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    std::size_t cell_count() const { return static_cast<std::size_t>(nx) * ny; }
    double cell_area() const { return dx * dy; }
    double min_spacing() const { return dx < dy ? dx : dy; }
    double cell_diagonal() const { return std::hypot(dx, dy); }
    BBox domain() const { return {x0, x0 + nx * dx, y0, y0 + ny * dy}; }

    bool operator==(const Grid2D&) const = default;
};

struct ScalarField {
    Grid2D grid;
    std::vector<double> values; // row-major, values[j*nx + i]

    ScalarField() = default;
    explicit ScalarField(const Grid2D& g, double fill = 0.0)
        : grid(g), values(g.cell_count(), fill) {}

    double& at(int i, int j) { return values[grid.index(i, j)]; }
    double at(int i, int j) const { return values[grid.index(i, j)]; }

    double max_abs() const;
    bool all_finite() const;

    template <class Fn>
    static ScalarField sample(const Grid2D& g, Fn&& fn) {
        ScalarField f(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                f.at(i, j) = fn(g.cell_center(i, j));
        return f;
    }
};

struct VectorField2 {
    Grid2D grid;
    std::vector<double> u; // x component per cell
    std::vector<double> v; // y component per cell

    VectorField2() = default;
    explicit VectorField2(const Grid2D& g)
        : grid(g), u(g.cell_count(), 0.0), v(g.cell_count(), 0.0) {}

    Vec2 at(int i, int j) const {
        const std::size_t k = grid.index(i, j);
        return {u[k], v[k]};
    }
};

// Deterministic reduction: the partials are combined by a balanced binary
// tree, padded with zeros. Independent of threading, and exactly invariant
// under reversal of the inputs when their count is a power of two.
double reduce_tree(std::vector<double>& partials);

// Midpoint-rule integral of f * w over the grid. Per-row accumulation runs
// left to right; rows are combined with reduce_tree. Throws NumericsError
// ("weight not finite") if w evaluates non-finite at any cell center.
template <class W>
double integrate_weighted(const ScalarField& f, W&& w);

// Plain mass integral (weight 1, no per-cell finiteness check).
double total_mass(const ScalarField& f);

// Central differences in the interior, one-sided first order at the boundary.
VectorField2 gradient_field(const ScalarField& f);

// Smallest axis-aligned box containing all cell centers with |f| > threshold.
std::optional<BBox> support_bbox(const ScalarField& f, double threshold);
double default_support_threshold(const ScalarField& f); // 1e-12 * max|f|

// --- file formats -----------------------------------------------------------
// CSV: header line `# nx=.. ny=.. x0=.. y0=.. dx=.. dy=..`, then ny rows of nx
// comma-separated values (row j on line j), full round-trip precision.
void write_field_csv(const std::string& path, const ScalarField& f);
ScalarField read_field_csv(const std::string& path);

// Plain PGM (P2), values scaled linearly to 0..255 by max|f|; top image row is
// the j = ny-1 grid row.
void write_field_pgm(const std::string& path, const ScalarField& f);

// --- implementation ---------------------------------------------------------

template <class W>
double integrate_weighted(const ScalarField& f, W&& w) {
    const Grid2D& g = f.grid;
    std::vector<double> rows(g.ny, 0.0);
    for (int j = 0; j < g.ny; ++j) {
        double acc = 0.0;
        for (int i = 0; i < g.nx; ++i) {
            const double wv = w(g.cell_center(i, j));
            if (!std::isfinite(wv)) throw NumericsError("weight not finite");
            acc += f.at(i, j) * wv;
        }
        rows[j] = acc;
    }
    return reduce_tree(rows) * g.cell_area();
}

} // namespace consensus
