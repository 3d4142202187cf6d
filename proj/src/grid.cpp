#include "consensus/grid.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace consensus {

Grid2D::Grid2D(double x0_, double y0_, int nx_, int ny_, double dx_, double dy_)
    : x0(x0_), y0(y0_), nx(nx_), ny(ny_), dx(dx_), dy(dy_) {
    if (nx < 2 || ny < 2) throw ConfigError("grid: nx and ny must be >= 2");
    if (!(dx > 0.0) || !(dy > 0.0)) throw ConfigError("grid: dx and dy must be > 0");
}

Grid2D Grid2D::over_box(double x0, double x1, double y0, double y1, int nx, int ny) {
    if (!(x1 > x0) || !(y1 > y0)) throw ConfigError("grid: empty domain box");
    return Grid2D(x0, y0, nx, ny, (x1 - x0) / nx, (y1 - y0) / ny);
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

bool ScalarField::all_finite() const {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

double reduce_tree(std::vector<double>& partials) {
    std::size_t n = partials.size();
    if (n == 0) return 0.0;
    while (n > 1) {
        const std::size_t half = (n + 1) / 2;
        for (std::size_t i = 0; i < half; ++i) {
            const std::size_t hi = 2 * i + 1;
            partials[i] = hi < n ? partials[2 * i] + partials[hi] : partials[2 * i];
        }
        n = half;
    }
    return partials[0];
}

double total_mass(const ScalarField& f) {
    const Grid2D& g = f.grid;
    std::vector<double> rows(g.ny, 0.0);
    for (int j = 0; j < g.ny; ++j) {
        double acc = 0.0;
        for (int i = 0; i < g.nx; ++i) acc += f.at(i, j);
        rows[j] = acc;
    }
    return reduce_tree(rows) * g.cell_area();
}

VectorField2 gradient_field(const ScalarField& f) {
    const Grid2D& g = f.grid;
    VectorField2 out(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            double gx;
            if (i == 0)
                gx = (f.at(1, j) - f.at(0, j)) / g.dx;
            else if (i == g.nx - 1)
                gx = (f.at(g.nx - 1, j) - f.at(g.nx - 2, j)) / g.dx;
            else
                gx = (f.at(i + 1, j) - f.at(i - 1, j)) / (2.0 * g.dx);
            double gy;
            if (j == 0)
                gy = (f.at(i, 1) - f.at(i, 0)) / g.dy;
            else if (j == g.ny - 1)
                gy = (f.at(i, g.ny - 1) - f.at(i, g.ny - 2)) / g.dy;
            else
                gy = (f.at(i, j + 1) - f.at(i, j - 1)) / (2.0 * g.dy);
            const std::size_t k = g.index(i, j);
            out.u[k] = gx;
            out.v[k] = gy;
        }
    }
    return out;
}

std::optional<BBox> support_bbox(const ScalarField& f, double threshold) {
    if (threshold < 0.0) throw ConfigError("support threshold must be >= 0");
    const Grid2D& g = f.grid;
    bool found = false;
    int imin = 0, imax = 0, jmin = 0, jmax = 0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (std::abs(f.at(i, j)) > threshold) {
                if (!found) {
                    imin = imax = i;
                    jmin = jmax = j;
                    found = true;
                } else {
                    imin = std::min(imin, i);
                    imax = std::max(imax, i);
                    jmin = std::min(jmin, j);
                    jmax = std::max(jmax, j);
                }
            }
        }
    }
    if (!found) return std::nullopt;
    const Vec2 lo = g.cell_center(imin, jmin);
    const Vec2 hi = g.cell_center(imax, jmax);
    return BBox{lo.x, hi.x, lo.y, hi.y};
}

double default_support_threshold(const ScalarField& f) { return 1e-12 * f.max_abs(); }

namespace {

void append_double(std::string& out, double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, p);
}

double parse_double(const char* first, const char* last, const char*& next) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc()) throw ConfigError("field csv: malformed number");
    next = p;
    return v;
}

} // namespace

void write_field_csv(const std::string& path, const ScalarField& f) {
    const Grid2D& g = f.grid;
    std::string out;
    out.reserve(f.values.size() * 20 + 128);
    out += "# nx=";
    append_double(out, g.nx);
    out += " ny=";
    append_double(out, g.ny);
    out += " x0=";
    append_double(out, g.x0);
    out += " y0=";
    append_double(out, g.y0);
    out += " dx=";
    append_double(out, g.dx);
    out += " dy=";
    append_double(out, g.dy);
    out += '\n';
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            if (i) out += ',';
            append_double(out, f.at(i, j));
        }
        out += '\n';
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open for writing: " + path);
    os.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!os) throw ConfigError("write failed: " + path);
}

ScalarField read_field_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open: " + path);
    std::string header;
    std::getline(is, header);
    int nx = 0, ny = 0;
    double x0 = 0, y0 = 0, dx = 0, dy = 0;
    if (std::sscanf(header.c_str(), "# nx=%d ny=%d x0=%lf y0=%lf dx=%lf dy=%lf", &nx, &ny,
                    &x0, &y0, &dx, &dy) != 6)
        throw ConfigError("field csv: bad header in " + path);
    ScalarField f(Grid2D(x0, y0, nx, ny, dx, dy));
    std::string line;
    for (int j = 0; j < ny; ++j) {
        if (!std::getline(is, line)) throw ConfigError("field csv: truncated file " + path);
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (int i = 0; i < nx; ++i) {
            if (i) {
                if (p >= end || *p != ',') throw ConfigError("field csv: bad row " + path);
                ++p;
            }
            f.at(i, j) = parse_double(p, end, p);
        }
    }
    return f;
}

void write_field_pgm(const std::string& path, const ScalarField& f) {
    const Grid2D& g = f.grid;
    const double scale = f.max_abs();
    std::ostringstream os;
    os << "P2\n" << g.nx << ' ' << g.ny << "\n255\n";
    for (int j = g.ny - 1; j >= 0; --j) {
        for (int i = 0; i < g.nx; ++i) {
            int pix = 0;
            if (scale > 0.0) {
                pix = static_cast<int>(std::lround(255.0 * std::abs(f.at(i, j)) / scale));
                pix = std::clamp(pix, 0, 255);
            }
            os << pix << (i + 1 == g.nx ? '\n' : ' ');
        }
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open for writing: " + path);
    const std::string s = os.str();
    file.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!file) throw ConfigError("write failed: " + path);
}

} // namespace consensus
