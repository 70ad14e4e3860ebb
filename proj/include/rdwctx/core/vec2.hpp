#pragma once
/**
 * @file vec2.hpp
 * @brief Planar vector for physical and virtual walker coordinates (meters).
 */

#include <cmath>

namespace rdwctx {

struct Vec2 {
    double x{0.0};
    double y{0.0};

    constexpr Vec2() = default;
    constexpr Vec2(double X, double Y) : x(X), y(Y) {}

    constexpr Vec2 operator+(const Vec2& r) const { return {x + r.x, y + r.y}; }
    constexpr Vec2 operator-(const Vec2& r) const { return {x - r.x, y - r.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2& operator+=(const Vec2& r)
    {
        x += r.x;
        y += r.y;
        return *this;
    }
    constexpr Vec2& operator-=(const Vec2& r)
    {
        x -= r.x;
        y -= r.y;
        return *this;
    }
    constexpr bool operator==(const Vec2&) const = default;

    [[nodiscard]] constexpr double dot(const Vec2& r) const { return x * r.x + y * r.y; }
    /// z-component of the 3-D cross product; positive when @p r is CCW of *this.
    [[nodiscard]] constexpr double cross(const Vec2& r) const { return x * r.y - y * r.x; }
    [[nodiscard]] double norm() const { return std::hypot(x, y); }
    [[nodiscard]] constexpr double squared_norm() const { return x * x + y * y; }
    [[nodiscard]] bool finite() const { return std::isfinite(x) && std::isfinite(y); }

    /// Unit vector, or {0,0} when the norm is at or below @p eps.
    [[nodiscard]] Vec2 normalized(double eps = 1e-12) const
    {
        const double n = norm();
        return n > eps ? Vec2{x / n, y / n} : Vec2{};
    }
};

constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Unit vector pointing along @p heading_deg (0° = +x, counter-clockwise positive).
inline Vec2 heading_vector(double heading_deg)
{
    const double r = heading_deg * 3.14159265358979323846 / 180.0;
    return {std::cos(r), std::sin(r)};
}

/// Heading of @p v in degrees, in (-180, 180].
inline double heading_of(const Vec2& v) { return std::atan2(v.y, v.x) * 180.0 / 3.14159265358979323846; }

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Rotate @p v counter-clockwise by @p deg degrees.
inline Vec2 rotate(const Vec2& v, double deg)
{
    const double r = deg * 3.14159265358979323846 / 180.0;
    const double c = std::cos(r), s = std::sin(r);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

} // namespace rdwctx
