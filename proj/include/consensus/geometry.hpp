#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace consensus {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2 operator-() const { return {-x, -y}; }
    bool operator==(const Vec2&) const = default;

    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    double norm_sq() const { return x * x + y * y; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

// 2x2 matrix, row-major: [a b; c d]
struct Mat2 {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
    Mat2& operator+=(const Mat2& o) { a += o.a; b += o.b; c += o.c; d += o.d; return *this; }

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 outer(Vec2 u, Vec2 v) { return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y}; }

    // matrix * column vector
    Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    // row vector * matrix
    Vec2 apply_left(Vec2 v) const { return {v.x * a + v.y * c, v.x * b + v.y * d}; }

    Mat2 matmul(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }

    double frobenius() const { return std::sqrt(a * a + b * b + c * c + d * d); }

    // spectral norm (largest singular value)
    double spectral_norm() const {
        const double g1 = a * a + b * b + c * c + d * d;
        const double det = a * d - b * c;
        const double disc = std::sqrt(std::max(0.0, g1 * g1 - 4.0 * det * det));
        return std::sqrt(0.5 * (g1 + disc));
    }
};

struct BBox {
    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    bool contains(Vec2 p) const {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }
    BBox inflated(double r) const { return {xmin - r, xmax + r, ymin - r, ymax + r}; }
    // largest outward displacement of `other` relative to this box, per side
    double growth_to(const BBox& other) const {
        double g = 0.0;
        g = std::max(g, xmin - other.xmin);
        g = std::max(g, other.xmax - xmax);
        g = std::max(g, ymin - other.ymin);
        g = std::max(g, other.ymax - ymax);
        return g;
    }
};

// configuration / input errors (CLI exit code 2)
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// runtime numerics failures (CLI exit code 3)
struct NumericsError : std::runtime_error {
    explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace consensus
