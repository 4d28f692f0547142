#pragma once

#include <cmath>

namespace hb {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }
inline double angle_of(const Vec2& a) { return std::atan2(a.y, a.x); }

inline Vec2 rotated(const Vec2& v, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Proper intersection test for segments ab and cd, excluding shared endpoints.
/// Touching at an endpoint within `tol` does not count as a crossing.
inline bool segments_cross(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d,
                           double tol = 1e-9) {
    if (distance(a, c) < tol || distance(a, d) < tol ||
        distance(b, c) < tol || distance(b, d) < tol)
        return false;
    const Vec2 r = b - a, s = d - c;
    const double denom = cross(r, s);
    const Vec2 qp = c - a;
    if (std::abs(denom) < tol * (norm(r) + norm(s))) return false; // parallel
    const double t = cross(qp, s) / denom;
    const double u = cross(qp, r) / denom;
    const double eps = 1e-9;
    return t > eps && t < 1.0 - eps && u > eps && u < 1.0 - eps;
}

} // namespace hb
