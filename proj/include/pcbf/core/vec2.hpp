#pragma once

#include <algorithm>
#include <cmath>

namespace pcbf {

// Geometry below this norm has no usable direction.
inline constexpr double kDegenerateNorm = 1e-12;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
    friend constexpr Vec2 operator*(Vec2 v, double s) { return {s * v.x, s * v.y}; }
    friend constexpr Vec2 operator/(Vec2 v, double s) { return {v.x / s, v.y / s}; }
    friend constexpr bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

    Vec2& operator+=(Vec2 o) {
        x += o.x;
        y += o.y;
        return *this;
    }
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double squared_norm(Vec2 v) { return dot(v, v); }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

inline bool is_finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

// Componentwise clamp to the centered box [-half, half]^2.
inline Vec2 clamp_box(Vec2 v, double half) {
    return {std::clamp(v.x, -half, half), std::clamp(v.y, -half, half)};
}

inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

}  // namespace pcbf
