#pragma once

// Plain 2-vectors and 2x2 matrices.

#include <cmath>

namespace patchflow {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    [[nodiscard]] double norm2() const { return x * x + y * y; }
    [[nodiscard]] double norm() const { return std::hypot(x, y); }

    Vec2& operator+=(Vec2 o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    Vec2& operator-=(Vec2 o) {
        x -= o.x;
        y -= o.y;
        return *this;
    }
    Vec2& operator*=(double s) {
        x *= s;
        y *= s;
        return *this;
    }

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
    friend Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
    friend Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
    friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

/// Counterclockwise quarter turn: (x1, x2) -> (-x2, x1).
inline Vec2 rot90(Vec2 a) { return {-a.y, a.x}; }

/// Row-major 2x2 matrix.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    [[nodiscard]] double trace() const { return a11 + a22; }
    [[nodiscard]] Mat2 transpose() const { return {a11, a21, a12, a22}; }
    [[nodiscard]] double frobenius() const { return std::sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22); }

    /// Symmetric part with the trace removed.
    [[nodiscard]] Mat2 sym_traceless() const {
        const double off = 0.5 * (a12 + a21);
        const double half = 0.5 * (a11 - a22);
        return {half, off, off, -half};
    }

    friend Mat2 operator+(Mat2 a, Mat2 b) { return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22}; }
    friend Mat2 operator-(Mat2 a, Mat2 b) { return {a.a11 - b.a11, a.a12 - b.a12, a.a21 - b.a21, a.a22 - b.a22}; }
    friend Mat2 operator*(Mat2 a, double s) { return {a.a11 * s, a.a12 * s, a.a21 * s, a.a22 * s}; }
    friend Vec2 operator*(Mat2 m, Vec2 v) { return {m.a11 * v.x + m.a12 * v.y, m.a21 * v.x + m.a22 * v.y}; }
    Mat2& operator+=(Mat2 o) { return *this = *this + o; }
};

/// Outer product a b^T.
inline Mat2 outer(Vec2 a, Vec2 b) { return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y}; }

}  // namespace patchflow
