#pragma once

// Shared test utilities: deterministic random instances and small independent
// oracles the suites check the library against.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "strutforge/envelope.hpp"
#include "strutforge/equilibrium.hpp"
#include "strutforge/lp.hpp"
#include "strutforge/synthesis.hpp"

namespace sft {

using namespace strutforge;

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Strictly convex CCW polygon: jittered angles on a random rotated ellipse.
inline std::vector<Point2> random_convex_points(Rng& rng, int n) {
    std::vector<double> ang;
    for (;;) {
        ang.clear();
        for (int i = 0; i < n; ++i) ang.push_back(uniform(rng, 0.0, 2.0 * M_PI));
        std::sort(ang.begin(), ang.end());
        bool ok = true;
        for (int i = 0; i < n; ++i) {
            double gap = (i + 1 < n ? ang[i + 1] : ang[0] + 2.0 * M_PI) - ang[i];
            if (gap < 0.15) ok = false;
        }
        if (ok) break;
    }
    double a = uniform(rng, 1.0, 3.0), b = uniform(rng, 1.0, 3.0);
    double rot = uniform(rng, 0.0, M_PI);
    Point2 c{uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0)};
    std::vector<Point2> pts;
    for (double t : ang) {
        Point2 e{a * std::cos(t), b * std::sin(t)};
        pts.push_back({c.x + e.x * std::cos(rot) - e.y * std::sin(rot),
                       c.y + e.x * std::sin(rot) + e.y * std::cos(rot)});
    }
    return pts;
}

// Compressible by construction: loads that a star of struts from an interior
// hub supports. t_i = F_i * unit(hub - p_i) with F_i > 0 solved by LP.
inline ForceSystem random_star_system(Rng& rng, int n) {
    for (;;) {
        std::vector<Point2> pts = random_convex_points(rng, n);
        Point2 hub{0, 0};
        for (const auto& p : pts) hub += p;
        hub = hub / static_cast<double>(n);
        hub += Vec2{uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3)};
        LinProgram lp;
        lp.num_vars = n;
        LinRow ex, ey;
        std::vector<Vec2> dir(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            Vec2 u = hub - pts[static_cast<size_t>(i)];
            dir[static_cast<size_t>(i)] = u / u.norm();
            ex.terms.push_back({i, dir[static_cast<size_t>(i)].x});
            ey.terms.push_back({i, dir[static_cast<size_t>(i)].y});
        }
        lp.equalities = {ex, ey};
        lp.lower.assign(static_cast<size_t>(n), 0.3);
        lp.upper.assign(static_cast<size_t>(n),
                        std::numeric_limits<double>::infinity());
        // random objective varies which balanced star gets picked
        lp.objective.assign(static_cast<size_t>(n), 0.0);
        for (int i = 0; i < n; ++i)
            lp.objective[static_cast<size_t>(i)] = uniform(rng, 0.5, 2.0);
        LpOutcome out = solve_min(lp);
        if (out.status != LpStatus::Feasible) continue;
        ForceSystem fs;
        fs.points = pts;
        for (int i = 0; i < n; ++i)
            fs.forces.push_back(dir[static_cast<size_t>(i)] *
                                out.x[static_cast<size_t>(i)]);
        fs.validate();
        return fs;
    }
}

// Balanced but not necessarily compressible: random forces projected onto the
// balance manifold (mean removed, torque cancelled by a rot90 field).
inline ForceSystem random_balanced_system(Rng& rng, int n) {
    std::vector<Point2> pts = random_convex_points(rng, n);
    std::vector<Vec2> f(static_cast<size_t>(n));
    Vec2 mean{0, 0};
    for (auto& v : f) {
        v = {uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0)};
        mean += v;
    }
    for (auto& v : f) v -= mean / static_cast<double>(n);
    Point2 c{0, 0};
    for (const auto& p : pts) c += p;
    c = c / static_cast<double>(n);
    double torque = 0.0, quad = 0.0;
    for (int i = 0; i < n; ++i) {
        torque += cross(pts[static_cast<size_t>(i)] - c, f[static_cast<size_t>(i)]);
        quad += (pts[static_cast<size_t>(i)] - c).dot(pts[static_cast<size_t>(i)] - c);
    }
    for (int i = 0; i < n; ++i)
        f[static_cast<size_t>(i)] -= rot90(pts[static_cast<size_t>(i)] - c) * (torque / quad);
    ForceSystem fs;
    fs.points = std::move(pts);
    fs.forces = std::move(f);
    return fs;
}

inline Point2 polygon_point(const ConvexPolygonCCW& poly, Rng& rng) {
    // rejection sampling in the bounding box
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& v : poly.vertices()) {
        xmin = std::min(xmin, v.x);
        xmax = std::max(xmax, v.x);
        ymin = std::min(ymin, v.y);
        ymax = std::max(ymax, v.y);
    }
    for (;;) {
        Point2 p{uniform(rng, xmin, xmax), uniform(rng, ymin, ymax)};
        if (poly.contains(p)) return p;
    }
}

// Obstacle guaranteed compatible with a single cleaving plane: one envelope
// cell shrunk toward its centroid.
inline Obstacle shrunk_cell_obstacle(const ConcaveEnvelope& env, Rng& rng,
                                     double factor = 0.5) {
    const auto& cell = env.cells[rng() % env.cells.size()];
    Point2 c = cell.region.centroid();
    std::vector<Point2> verts;
    for (const auto& v : cell.region.vertices())
        verts.push_back(c + (v - c) * factor);
    return obstacle_from_polygon(std::move(verts), "cell");
}

// Brute-force LP oracle: minimum of c.x over all vertices of the feasible
// polyhedron, found by solving every d x d subsystem of tight constraints.
// Returns infinity when no feasible vertex exists. Only for tiny systems.
inline double lp_vertex_enumeration_min(const LinProgram& lp) {
    const int d = lp.num_vars;
    std::vector<std::pair<std::vector<double>, double>> rows;  // dense, rhs
    std::vector<bool> is_eq;
    auto add = [&](const LinRow& r, bool eq) {
        std::vector<double> a(static_cast<size_t>(d), 0.0);
        for (const auto& t : r.terms) a[static_cast<size_t>(t.var)] += t.coef;
        rows.push_back({a, r.rhs});
        is_eq.push_back(eq);
    };
    for (const auto& r : lp.equalities) add(r, true);
    for (const auto& r : lp.inequalities) add(r, false);
    const double inf = std::numeric_limits<double>::infinity();
    for (int j = 0; j < d; ++j) {
        if (!lp.lower.empty() && lp.lower[static_cast<size_t>(j)] > -inf) {
            LinRow r{{{j, -1.0}}, -lp.lower[static_cast<size_t>(j)]};
            add(r, false);
        }
        if (!lp.upper.empty() && lp.upper[static_cast<size_t>(j)] < inf) {
            LinRow r{{{j, 1.0}}, lp.upper[static_cast<size_t>(j)]};
            add(r, false);
        }
    }
    const int m = static_cast<int>(rows.size());
    double best = inf;
    std::vector<int> pick(static_cast<size_t>(d), 0);
    // iterate over all d-subsets of rows
    std::function<void(int, int)> rec = [&](int start, int k) {
        if (k == d) {
            // solve the d x d system by Gaussian elimination
            std::vector<std::vector<double>> A(static_cast<size_t>(d));
            std::vector<double> b(static_cast<size_t>(d));
            for (int i = 0; i < d; ++i) {
                A[static_cast<size_t>(i)] = rows[static_cast<size_t>(pick[static_cast<size_t>(i)])].first;
                b[static_cast<size_t>(i)] = rows[static_cast<size_t>(pick[static_cast<size_t>(i)])].second;
            }
            std::vector<double> x(static_cast<size_t>(d), 0.0);
            for (int col = 0; col < d; ++col) {
                int piv = -1;
                double bestp = 1e-9;
                for (int r = col; r < d; ++r)
                    if (std::abs(A[static_cast<size_t>(r)][static_cast<size_t>(col)]) > bestp) {
                        bestp = std::abs(A[static_cast<size_t>(r)][static_cast<size_t>(col)]);
                        piv = r;
                    }
                if (piv < 0) return;  // singular subset
                std::swap(A[static_cast<size_t>(col)], A[static_cast<size_t>(piv)]);
                std::swap(b[static_cast<size_t>(col)], b[static_cast<size_t>(piv)]);
                for (int r = 0; r < d; ++r) {
                    if (r == col) continue;
                    double fct = A[static_cast<size_t>(r)][static_cast<size_t>(col)] /
                                 A[static_cast<size_t>(col)][static_cast<size_t>(col)];
                    if (fct == 0.0) continue;
                    for (int cc = 0; cc < d; ++cc)
                        A[static_cast<size_t>(r)][static_cast<size_t>(cc)] -=
                            fct * A[static_cast<size_t>(col)][static_cast<size_t>(cc)];
                    b[static_cast<size_t>(r)] -= fct * b[static_cast<size_t>(col)];
                }
            }
            for (int i = 0; i < d; ++i)
                x[static_cast<size_t>(i)] =
                    b[static_cast<size_t>(i)] / A[static_cast<size_t>(i)][static_cast<size_t>(i)];
            // feasibility at this vertex
            for (int r = 0; r < m; ++r) {
                double v = -rows[static_cast<size_t>(r)].second;
                for (int c = 0; c < d; ++c)
                    v += rows[static_cast<size_t>(r)].first[static_cast<size_t>(c)] *
                         x[static_cast<size_t>(c)];
                if (is_eq[static_cast<size_t>(r)] ? std::abs(v) > 1e-6 : v > 1e-6) return;
            }
            double obj = 0.0;
            for (int c = 0; c < d; ++c)
                obj += lp.objective[static_cast<size_t>(c)] * x[static_cast<size_t>(c)];
            best = std::min(best, obj);
            return;
        }
        for (int i = start; i < m; ++i) {
            pick[static_cast<size_t>(k)] = i;
            rec(i + 1, k + 1);
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace sft
