#include "strutforge/geometry.hpp"

#include <algorithm>
#include <limits>

namespace strutforge {

namespace {

void require_finite(std::span<const Point2> pts) {
    for (const auto& p : pts)
        if (!p.finite()) throw InputError("non-finite coordinate");
}

double default_tol(std::span<const Point2> pts, double tol) {
    return tol >= 0.0 ? tol : geom_tol(pts);
}

}  // namespace

double bbox_diagonal(std::span<const Point2> pts) {
    if (pts.empty()) return 0.0;
    double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
    for (const auto& p : pts) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    return Vec2{xmax - xmin, ymax - ymin}.norm();
}

bool is_ccw_convex(std::span<const Point2> pts, double tol) {
    const int n = static_cast<int>(pts.size());
    if (n < 3) throw InputError("is_ccw_convex: need at least 3 points");
    require_finite(pts);
    tol = default_tol(pts, tol);
    double turning = 0.0;
    for (int i = 0; i < n; ++i) {
        Vec2 e1 = pts[(i + 1) % n] - pts[i];
        Vec2 e2 = pts[(i + 2) % n] - pts[(i + 1) % n];
        if (e1.norm() <= tol || e2.norm() <= tol) return false;
        if (cross(e1, e2) <= tol * e1.norm() * e2.norm()) return false;
        turning += std::atan2(cross(e1, e2), e1.dot(e2));
    }
    return std::abs(turning - 2.0 * M_PI) < 1e-6;
}

bool is_ccw_convex_weak(std::span<const Point2> pts, double tol) {
    const int n = static_cast<int>(pts.size());
    if (n < 3) throw InputError("is_ccw_convex_weak: need at least 3 points");
    require_finite(pts);
    tol = default_tol(pts, tol);
    double turning = 0.0;
    for (int i = 0; i < n; ++i) {
        Vec2 e1 = pts[(i + 1) % n] - pts[i];
        Vec2 e2 = pts[(i + 2) % n] - pts[(i + 1) % n];
        if (e1.norm() <= tol || e2.norm() <= tol) return false;
        double c = cross(e1, e2);
        if (c < -tol * e1.norm() * e2.norm()) return false;
        // reversal along a collinear run
        if (c <= tol * e1.norm() * e2.norm() && e1.dot(e2) < 0.0) return false;
        turning += std::atan2(cross(e1, e2), e1.dot(e2));
    }
    return std::abs(turning - 2.0 * M_PI) < 1e-6;
}

ConvexPolygonCCW ConvexPolygonCCW::from_ccw_vertices(std::vector<Point2> verts) {
    if (verts.size() < 3)
        throw InputError("convex polygon: need at least 3 vertices");
    if (!is_ccw_convex(verts))
        throw InputError("convex polygon: vertices not strictly convex CCW");
    return ConvexPolygonCCW(std::move(verts), geom_tol(verts));
}

std::optional<ConvexPolygonCCW> ConvexPolygonCCW::sanitize(
    std::vector<Point2> verts, double tol) {
    // merge near-duplicates
    std::vector<Point2> out;
    for (const auto& p : verts) {
        if (out.empty() || (p - out.back()).norm() > tol) out.push_back(p);
    }
    while (out.size() >= 2 && (out.front() - out.back()).norm() <= tol)
        out.pop_back();
    // drop collinear vertices
    bool changed = true;
    while (changed && out.size() >= 3) {
        changed = false;
        for (size_t i = 0; i < out.size(); ++i) {
            const size_t n = out.size();
            Vec2 e1 = out[(i + 1) % n] - out[i];
            Vec2 e2 = out[(i + 2) % n] - out[(i + 1) % n];
            if (std::abs(cross(e1, e2)) <= tol * (e1.norm() + e2.norm())) {
                out.erase(out.begin() + static_cast<long>((i + 1) % n));
                changed = true;
                break;
            }
        }
    }
    if (out.size() < 3) return std::nullopt;
    if (!is_ccw_convex(out, tol)) return std::nullopt;
    return ConvexPolygonCCW(std::move(out), tol);
}

Point2 ConvexPolygonCCW::vertex(int i) const {
    const int n = size();
    return verts_[static_cast<size_t>(((i % n) + n) % n)];
}

bool ConvexPolygonCCW::contains(Point2 p, bool strict) const {
    const int n = size();
    for (int i = 0; i < n; ++i) {
        Vec2 e = verts_[(i + 1) % n] - verts_[i];
        double c = cross(e, p - verts_[i]);
        double scale = e.norm();
        if (strict) {
            if (c <= tol_ * scale) return false;
        } else {
            if (c < -tol_ * scale) return false;
        }
    }
    return true;
}

double ConvexPolygonCCW::area() const {
    double a = 0.0;
    const int n = size();
    for (int i = 0; i < n; ++i) a += cross(verts_[i], verts_[(i + 1) % n]);
    return 0.5 * a;
}

Point2 ConvexPolygonCCW::centroid() const {
    const int n = size();
    double a = 0.0;
    Vec2 acc{0, 0};
    for (int i = 0; i < n; ++i) {
        double cr = cross(verts_[i], verts_[(i + 1) % n]);
        a += cr;
        acc += (verts_[i] + verts_[(i + 1) % n]) * cr;
    }
    if (std::abs(a) < 1e-300) {  // degenerate: fall back to vertex mean
        Vec2 m{0, 0};
        for (const auto& v : verts_) m += v;
        return m / static_cast<double>(n);
    }
    return acc / (3.0 * a);
}

ConvexPolygonCCW convex_hull(std::span<const Point2> pts) {
    if (pts.size() < 3) throw InputError("convex_hull: need at least 3 points");
    require_finite(pts);
    const double tol = geom_tol(pts);
    std::vector<Point2> s(pts.begin(), pts.end());
    std::sort(s.begin(), s.end(), [](Point2 a, Point2 b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    s.erase(std::unique(s.begin(), s.end(),
                        [&](Point2 a, Point2 b) { return (a - b).norm() <= tol; }),
            s.end());
    const int n = static_cast<int>(s.size());
    if (n < 3) throw InputError("convex_hull: degenerate point set");
    // monotone chain, strict turns so collinear points are dropped
    std::vector<Point2> hull(2 * static_cast<size_t>(n));
    int k = 0;
    for (int i = 0; i < n; ++i) {
        while (k >= 2 &&
               cross(hull[k - 1] - hull[k - 2], s[i] - hull[k - 2]) <= tol)
            --k;
        hull[k++] = s[i];
    }
    const int lower = k + 1;
    for (int i = n - 2; i >= 0; --i) {
        while (k >= lower &&
               cross(hull[k - 1] - hull[k - 2], s[i] - hull[k - 2]) <= tol)
            --k;
        hull[k++] = s[i];
    }
    hull.resize(static_cast<size_t>(k - 1));
    if (hull.size() < 3) throw InputError("convex_hull: all points collinear");
    return ConvexPolygonCCW::from_ccw_vertices(std::move(hull));
}

bool polygon_contains(const ConvexPolygonCCW& poly, Point2 p, bool strict) {
    return poly.contains(p, strict);
}

double polygon_exceed(const ConvexPolygonCCW& poly, Point2 p) {
    const auto& v = poly.vertices();
    const int n = poly.size();
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        Vec2 e = v[static_cast<size_t>((i + 1) % n)] - v[static_cast<size_t>(i)];
        worst = std::max(worst, -cross(e, p - v[static_cast<size_t>(i)]) / e.norm());
    }
    return worst;
}

bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2, double tol) {
    auto orient = [&](Point2 a, Point2 b, Point2 c) {
        double v = cross(b - a, c - a);
        double scale = (b - a).norm() + (c - a).norm();
        if (v > tol * scale) return 1;
        if (v < -tol * scale) return -1;
        return 0;
    };
    int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
    int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    auto on_segment = [&](Point2 a, Point2 b, Point2 c) {
        if (orient(a, b, c) != 0) return false;
        return c.x >= std::min(a.x, b.x) - tol && c.x <= std::max(a.x, b.x) + tol &&
               c.y >= std::min(a.y, b.y) - tol && c.y <= std::max(a.y, b.y) + tol;
    };
    return on_segment(p1, p2, q1) || on_segment(p1, p2, q2) ||
           on_segment(q1, q2, p1) || on_segment(q1, q2, p2);
}

bool segment_intersects_polygon(const Segment& s, const ConvexPolygonCCW& poly) {
    const double tol = poly.tol();
    if (poly.contains(s.a) || poly.contains(s.b)) return true;
    const auto& v = poly.vertices();
    const int n = poly.size();
    for (int i = 0; i < n; ++i)
        if (segments_intersect(s.a, s.b, v[i], v[(i + 1) % n], tol)) return true;
    return false;
}

bool segment_crosses_interior(const Segment& s, const ConvexPolygonCCW& poly,
                              double tol) {
    if (tol < 0.0) tol = std::max(poly.tol(), 1e-12 * bbox_diagonal(poly.vertices()));
    // Clip the segment parameter range against each edge half-plane; the
    // remaining (t0,t1) is the part inside the polygon.
    double t0 = 0.0, t1 = 1.0;
    Vec2 d = s.b - s.a;
    const auto& v = poly.vertices();
    const int n = poly.size();
    for (int i = 0; i < n; ++i) {
        Vec2 e = v[(i + 1) % n] - v[i];
        // inside is cross(e, x - v[i]) >= 0
        double num = cross(e, s.a - v[i]);
        double den = cross(e, d);
        if (std::abs(den) < 1e-300) {
            if (num < 0.0) return false;  // parallel and outside
            continue;
        }
        double t = -num / den;
        if (den > 0.0)
            t0 = std::max(t0, t);
        else
            t1 = std::min(t1, t);
        if (t0 > t1) return false;
    }
    double len = d.norm();
    if ((t1 - t0) * len <= tol) return false;
    Point2 mid = s.a + d * (0.5 * (t0 + t1));
    return poly.contains(mid, /*strict=*/true);
}

std::vector<Point2> clip_halfplane(std::span<const Point2> poly, Vec2 n, double rhs) {
    std::vector<Point2> out;
    const int m = static_cast<int>(poly.size());
    if (m == 0) return out;
    for (int i = 0; i < m; ++i) {
        Point2 cur = poly[i];
        Point2 nxt = poly[(i + 1) % m];
        double dc = n.dot(cur) - rhs;
        double dn = n.dot(nxt) - rhs;
        if (dc <= 0.0) out.push_back(cur);
        if ((dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0)) {
            double t = dc / (dc - dn);
            out.push_back(cur + (nxt - cur) * t);
        }
    }
    return out;
}

}  // namespace strutforge
