#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "strutforge/errors.hpp"

namespace strutforge {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double xx, double yy) : x(xx), y(yy) {}

    constexpr Vec2 operator+(Vec2 r) const { return {x + r.x, y + r.y}; }
    constexpr Vec2 operator-(Vec2 r) const { return {x - r.x, y - r.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 r) { x += r.x; y += r.y; return *this; }
    Vec2& operator-=(Vec2 r) { x -= r.x; y -= r.y; return *this; }

    constexpr double dot(Vec2 r) const { return x * r.x + y * r.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

using Point2 = Vec2;

inline constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

// 90 degree counter-clockwise rotation.
inline constexpr Vec2 rot90(Vec2 v) { return {-v.y, v.x}; }

inline constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

// Affine function L(x) = v.x + c.
struct PlaneFunc {
    Vec2 v;
    double c = 0.0;

    double operator()(Point2 p) const { return v.dot(p) + c; }
    bool finite() const { return v.finite() && std::isfinite(c); }
};

struct Segment {
    Point2 a;
    Point2 b;

    double length() const { return (b - a).norm(); }
};

// Relative geometric tolerance applied to all sign tests: 1e-9 of the
// bounding-box diagonal of whatever point set is under consideration.
inline constexpr double kGeomTolRel = 1e-9;

double bbox_diagonal(std::span<const Point2> pts);
inline double geom_tol(std::span<const Point2> pts) {
    return kGeomTolRel * bbox_diagonal(pts);
}

// Strict test: >=3 points, counter-clockwise, every consecutive turn a strict
// left turn (within tolerance), total turning +2*pi. Collinear triples fail.
bool is_ccw_convex(std::span<const Point2> pts, double tol = -1.0);

// Weak variant: points in convex position on the boundary of their hull in CCW
// order; collinear runs are allowed but reflex turns and reversals are not.
bool is_ccw_convex_weak(std::span<const Point2> pts, double tol = -1.0);

class ConvexPolygonCCW {
  public:
    // Validating constructor: throws InputError unless the vertex list is a
    // strictly convex CCW polygon with no repeated vertices.
    static ConvexPolygonCCW from_ccw_vertices(std::vector<Point2> verts);

    // Cleans a clipped vertex chain: merges near-duplicate vertices, drops
    // collinear ones. Returns nullopt when the result is degenerate.
    static std::optional<ConvexPolygonCCW> sanitize(std::vector<Point2> verts,
                                                    double tol);

    const std::vector<Point2>& vertices() const { return verts_; }
    int size() const { return static_cast<int>(verts_.size()); }
    Point2 vertex(int i) const;  // wrapped index

    bool contains(Point2 p, bool strict = false) const;
    double area() const;
    Point2 centroid() const;  // area centroid
    double tol() const { return tol_; }

  private:
    ConvexPolygonCCW(std::vector<Point2> verts, double tol)
        : verts_(std::move(verts)), tol_(tol) {}

    std::vector<Point2> verts_;
    double tol_ = 0.0;
};

// Convex hull (CCW, collinear points dropped). Throws InputError when all
// points are collinear.
ConvexPolygonCCW convex_hull(std::span<const Point2> pts);

bool polygon_contains(const ConvexPolygonCCW& poly, Point2 p, bool strict = false);

// How far p sits outside the polygon: max signed distance over the edge
// half-planes (<= 0 inside).
double polygon_exceed(const ConvexPolygonCCW& poly, Point2 p);

// Closed segment vs closed polygon.
bool segment_intersects_polygon(const Segment& s, const ConvexPolygonCCW& poly);

// True when the segment penetrates the polygon interior by more than tol
// (grazing contact along the boundary does not count).
bool segment_crosses_interior(const Segment& s, const ConvexPolygonCCW& poly,
                              double tol = -1.0);

// Closed-segment intersection test with tolerance.
bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2, double tol);

// One Sutherland-Hodgman step: keep {x : n.x <= rhs}.
std::vector<Point2> clip_halfplane(std::span<const Point2> poly, Vec2 n, double rhs);

// A convex obstacle region. hull_warning marks inputs that were not convex
// and got replaced by their hull.
struct Obstacle {
    ConvexPolygonCCW polygon;
    std::string label;
    bool hull_warning = false;
};

}  // namespace strutforge
