#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace nlmf {

/// Thrown when a solve, factorization or quadrature-generation step fails
/// numerically (singular system, unsatisfiable constraints, residual gate).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// Relative tolerance on horizon-ball radius comparisons, so lattice points
/// exactly on the ball boundary are included stably under fp rounding.
inline constexpr double kRadiusInclusionTol = 1e-12;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double a) const { return {a * x, a * y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    Vec2& operator-=(const Vec2& o) {
        x -= o.x;
        y -= o.y;
        return *this;
    }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
};

inline Vec2 operator*(double a, const Vec2& v) { return v * a; }

/// Axis-aligned rectangle [xmin, xmax] x [ymin, ymax].
struct Rect {
    double xmin = 0.0, ymin = 0.0, xmax = 1.0, ymax = 1.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    bool contains(const Vec2& p) const {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }
    bool degenerate() const { return !(xmax > xmin) || !(ymax > ymin); }
};

/// Line segment between two points; used for pre-notch cracks and free-surface
/// initialization.
struct Segment2 {
    Vec2 a;
    Vec2 b;

    bool degenerate() const { return (b - a).norm2() == 0.0; }
};

namespace detail {

inline double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

inline bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

}  // namespace detail

/// Inclusive segment intersection: touching endpoints and collinear overlap
/// both count as intersecting.
inline bool segments_intersect(const Segment2& s, const Segment2& t) {
    const double d1 = detail::orient(t.a, t.b, s.a);
    const double d2 = detail::orient(t.a, t.b, s.b);
    const double d3 = detail::orient(s.a, s.b, t.a);
    const double d4 = detail::orient(s.a, s.b, t.b);

    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;

    if (d1 == 0 && detail::on_segment(t.a, t.b, s.a)) return true;
    if (d2 == 0 && detail::on_segment(t.a, t.b, s.b)) return true;
    if (d3 == 0 && detail::on_segment(s.a, s.b, t.a)) return true;
    if (d4 == 0 && detail::on_segment(s.a, s.b, t.b)) return true;
    return false;
}

/// Euclidean distance from a point to a segment.
inline double point_segment_distance(const Vec2& p, const Segment2& s) {
    const Vec2 d = s.b - s.a;
    const double len2 = d.norm2();
    if (len2 == 0.0) return (p - s.a).norm();
    double t = (p - s.a).dot(d) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (s.a + d * t)).norm();
}

}  // namespace nlmf
