#pragma once

#include <cmath>

namespace waynav {

/// Horizontal world point. x grows east, z grows north.
struct Vec2 {
    double x = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// World point with elevation y.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;
    Vec2 horizontal() const noexcept { return {x, z}; }
};

inline double distance(const Vec2& a, const Vec2& b) noexcept {
    return std::hypot(a.x - b.x, a.z - b.z);
}

inline double distance(const Vec3& a, const Vec3& b) noexcept {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace waynav
