#include "strutforge/enlarge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "strutforge/equilibrium.hpp"

namespace strutforge {

namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

std::optional<ConvexPolygonCCW> try_gamma(const OpenSupport& os,
                                          const PlaneFunc& L) {
    try {
        return gamma_region(os.envelope, L);
    } catch (const InputError&) {
        return std::nullopt;
    }
}

std::vector<int> touching_set(const OpenSupport& os, const PlaneFunc& L) {
    std::vector<int> t;
    for (size_t k = 0; k < os.points.size(); ++k)
        if (std::abs(L(os.points[k]) - os.support[k]) <= os.touch_tol)
            t.push_back(static_cast<int>(k));
    return t;
}

// Affine function vanishing on the line through a and b.
PlaneFunc chord_plane(Point2 a, Point2 b) {
    Vec2 d = b - a;
    return PlaneFunc{rot90(d), -cross(d, a)};
}

PlaneFunc through_three(Point2 p1, double a1, Point2 p2, double a2, Point2 p3,
                        double a3) {
    // solve v.p + c = a at the three lifted points
    double det = (p2.x - p1.x) * (p3.y - p1.y) - (p3.x - p1.x) * (p2.y - p1.y);
    if (std::abs(det) < 1e-300)
        throw InputError("cleaving plane: collinear support points");
    double vx = ((a2 - a1) * (p3.y - p1.y) - (a3 - a1) * (p2.y - p1.y)) / det;
    double vy = ((p2.x - p1.x) * (a3 - a1) - (p3.x - p1.x) * (a2 - a1)) / det;
    return PlaneFunc{{vx, vy}, a1 - vx * p1.x - vy * p1.y};
}

}  // namespace

OpenSupport open_support(const ForceSystem& fs) {
    TangentPlanes tp = tangent_planes(fs);
    OpenSupport os{fs.points, tp.planes, tp.support,
                   min_envelope(tp.planes, convex_hull(fs.points)), 0.0};
    double vscale = 1.0;
    for (double a : os.support) vscale = std::max(vscale, std::abs(a));
    for (const auto& p : os.planes) vscale = std::max(vscale, std::abs(p.c));
    os.touch_tol = std::max(fs.bal_tol, 1e-9) * vscale;
    return os;
}

bool admissible(const OpenSupport& os, const PlaneFunc& L) {
    for (size_t k = 0; k < os.points.size(); ++k)
        if (L(os.points[k]) < os.support[k] - os.touch_tol) return false;
    return true;
}

CleavingState lower_plane(const OpenSupport& os, const PlaneFunc& L) {
    if (!admissible(os, L)) throw InputError("lower_plane: inadmissible plane");
    double off = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < os.points.size(); ++k)
        off = std::min(off, L(os.points[k]) - os.support[k]);
    PlaneFunc lowered{L.v, L.c - std::max(off, 0.0)};
    return {lowered, touching_set(os, lowered), try_gamma(os, lowered)};
}

CleavingState tilt_plane(const OpenSupport& os, const CleavingState& state) {
    if (state.touching.size() >= 2) return state;
    if (state.touching.empty())
        throw InputError("tilt_plane: plane touches no support point");
    const int k = state.touching[0];
    const PlaneFunc& L = state.plane;
    const PlaneFunc& Lk = os.planes[static_cast<size_t>(k)];
    double alpha = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < os.points.size(); ++j) {
        double den = Lk(os.points[j]) - L(os.points[j]);
        if (den <= os.touch_tol) continue;
        alpha = std::min(alpha, (L(os.points[j]) - os.support[j]) / den);
    }
    if (!std::isfinite(alpha))
        throw InputError("tilt_plane: degenerate tilt, plane coincides with L_k");
    PlaneFunc tilted{L.v + (L.v - Lk.v) * alpha, L.c + (L.c - Lk.c) * alpha};
    return {tilted, touching_set(os, tilted), try_gamma(os, tilted)};
}

std::vector<CleavingState> roll_maximal_regions(const ForceSystem& fs) {
    OpenSupport os = open_support(fs);
    const int n = static_cast<int>(os.points.size());
    if (n < 3) throw InputError("roll_maximal_regions: need at least 3 supports");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if ((os.points[static_cast<size_t>(i)] - os.points[static_cast<size_t>(j)])
                    .norm() <= os.envelope.domain.tol())
                throw InputError("roll_maximal_regions: coincident support points");

    std::vector<CleavingState> out;
    std::set<std::vector<int>> seen;

    auto emit = [&](const PlaneFunc& L) {
        std::vector<int> t = touching_set(os, L);
        if (t.size() < 2) return t;  // numerically lost a contact; caller rolls on
        if (seen.insert(t).second) out.push_back({L, t, try_gamma(os, L)});
        return t;
    };

    for (int seed = 0; seed < n; ++seed) {
        // initial plane through lifted seed, seed+1 and a third support with
        // nothing above it
        PlaneFunc L;
        bool found = false;
        for (int step = 2; step < n && !found; ++step) {
            int j = wrap(seed + step, n);
            PlaneFunc cand = through_three(
                os.points[static_cast<size_t>(seed)], os.support[static_cast<size_t>(seed)],
                os.points[static_cast<size_t>(wrap(seed + 1, n))],
                os.support[static_cast<size_t>(wrap(seed + 1, n))],
                os.points[static_cast<size_t>(j)], os.support[static_cast<size_t>(j)]);
            if (admissible(os, cand)) {
                L = cand;
                found = true;
            }
        }
        if (!found)
            throw InternalError("roll_maximal_regions: no admissible seed plane");

        std::vector<int> contacts = emit(L);
        const int target = wrap(seed - 1, n);
        int guard = 0;
        while (std::find(contacts.begin(), contacts.end(), target) == contacts.end()) {
            if (++guard > 4 * n)
                throw InternalError("roll_maximal_regions: rolling did not terminate");
            auto cyc = [&](int j) { return wrap(j - seed, n); };
            int latest = contacts[0];
            for (int c : contacts)
                if (cyc(c) > cyc(latest)) latest = c;
            // pivot line through the seed contact and the latest contact
            PlaneFunc g = chord_plane(os.points[static_cast<size_t>(seed)],
                                      os.points[static_cast<size_t>(latest)]);
            // normalize g to unit gradient so tolerances are scale-free
            double gn = g.v.norm();
            g = PlaneFunc{g.v / gn, g.c / gn};
            // direction: the dropped (middle) contacts must lift off
            double ref = 0.0;
            for (int c : contacts) {
                if (c == seed || c == latest) continue;
                ref = g(os.points[static_cast<size_t>(c)]);
                break;
            }
            if (ref == 0.0 && contacts.size() <= 2) {
                // two contacts only: tilt down on the side of the region
                auto gm = try_gamma(os, L);
                if (!gm)
                    throw InternalError("roll_maximal_regions: ambiguous roll direction");
                ref = -g(gm->centroid());
            }
            if (ref < 0.0) g = PlaneFunc{-g.v, -g.c};
            // largest step keeping admissibility; the argmin supports are hit
            double beta = std::numeric_limits<double>::infinity();
            for (int m = 0; m < n; ++m) {
                double gm = g(os.points[static_cast<size_t>(m)]);
                if (gm >= -1e-12 * (1.0 + os.points[static_cast<size_t>(m)].norm()))
                    continue;
                beta = std::min(beta, (L(os.points[static_cast<size_t>(m)]) -
                                       os.support[static_cast<size_t>(m)]) /
                                          -gm);
            }
            if (!std::isfinite(beta))
                throw InternalError("roll_maximal_regions: unbounded roll");
            L = PlaneFunc{L.v + g.v * beta, L.c + g.c * beta};
            contacts = emit(L);
            if (contacts.size() < 2) break;  // numeric degeneracy; abandon seed
        }
    }
    std::sort(out.begin(), out.end(), [](const CleavingState& a, const CleavingState& b) {
        return a.touching < b.touching;
    });
    return out;
}

bool maximality_certificate(const OpenSupport& os, const CleavingState& state,
                            double delta_rel) {
    if (state.touching.size() < 2) return false;
    if (!state.gamma) return true;  // zero-area region cannot strictly grow
    double vscale = 1.0;
    for (double a : os.support) vscale = std::max(vscale, std::abs(a));
    double diag = bbox_diagonal(os.points);
    const double dv = delta_rel * vscale / std::max(diag, 1e-12);
    const double dc = delta_rel * vscale;
    const double area0 = state.gamma->area();
    const double area_tol = 1e-12 * diag * diag;

    const Vec2 dirs[3] = {{1, 0}, {0, 1}, {0, 0}};
    for (int p = 0; p < 3; ++p) {
        for (double sgn : {1.0, -1.0}) {
            PlaneFunc perturbed = state.plane;
            if (p < 2)
                perturbed.v += dirs[p] * (sgn * dv);
            else
                perturbed.c += sgn * dc;
            if (!admissible(os, perturbed)) continue;
            auto gamma2 = try_gamma(os, perturbed);
            if (!gamma2) continue;
            bool contains_old = true;
            for (const auto& v : state.gamma->vertices())
                if (!gamma2->contains(v)) {
                    contains_old = false;
                    break;
                }
            if (contains_old && gamma2->area() > area0 + area_tol)
                return false;  // found a strict enlargement
        }
    }
    return true;
}

}  // namespace strutforge
