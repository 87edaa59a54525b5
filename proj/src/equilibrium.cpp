#include "strutforge/equilibrium.hpp"

#include <algorithm>
#include <cmath>

namespace strutforge {

namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

}  // namespace

bool ForceSystem::is_reactive(int i) const {
    i = wrap(i, size());
    return std::binary_search(reactive.begin(), reactive.end(), i);
}

Point2 ForceSystem::point(int i) const {
    return points[static_cast<size_t>(wrap(i, size()))];
}

Vec2 ForceSystem::force(int i) const {
    return forces[static_cast<size_t>(wrap(i, size()))];
}

double ForceSystem::force_scale() const {
    double s = 0.0;
    for (int i = 0; i < size(); ++i)
        if (!is_reactive(i)) s = std::max(s, force(i).norm());
    return s;
}

void ForceSystem::validate() const {
    const int n = size();
    if (n < 3) throw InputError("force system: need at least 3 points");
    if (forces.size() != points.size())
        throw InputError("force system: points/forces length mismatch");
    for (const auto& p : points)
        if (!p.finite()) throw InputError("force system: non-finite point");
    for (int i = 0; i < n; ++i)
        if (!is_reactive(i) && !force(i).finite())
            throw InputError("force system: non-finite force");
    for (int r : reactive)
        if (r < 0 || r >= n) throw InputError("force system: reactive index out of range");
    if (!std::is_sorted(reactive.begin(), reactive.end()) ||
        std::adjacent_find(reactive.begin(), reactive.end()) != reactive.end())
        throw InputError("force system: reactive indices must be sorted and unique");
    if (!(bal_tol > 0.0)) throw InputError("force system: bal_tol must be positive");
    if (reactive.empty()) {
        if (!is_ccw_convex(points))
            throw InputError("force system: points not strictly convex CCW");
    } else {
        if (!is_ccw_convex_weak(points))
            throw InputError("force system: points not convex CCW");
    }
}

bool check_balance(const ForceSystem& fs) {
    fs.validate();
    if (!fs.reactive.empty())
        throw InputError("check_balance: undefined until reactions are solved");
    Vec2 fsum{0, 0};
    double fscale = 0.0, tsum = 0.0, tscale = 0.0;
    for (int i = 0; i < fs.size(); ++i) {
        fsum += fs.force(i);
        fscale += fs.force(i).norm();
        tsum += cross(fs.point(i), fs.force(i));
        tscale += fs.point(i).norm() * fs.force(i).norm();
    }
    if (fscale == 0.0) return true;  // all-zero forces balance trivially
    return fsum.norm() <= fs.bal_tol * fscale &&
           std::abs(tsum) <= fs.bal_tol * std::max(tscale, fscale);
}

TangentPlanes tangent_planes(const ForceSystem& fs) {
    if (!check_balance(fs)) throw InputError("tangent_planes: unbalanced force system");
    const int n = fs.size();
    TangentPlanes tp;
    tp.planes.resize(static_cast<size_t>(n));
    tp.planes[0] = PlaneFunc{{0, 0}, 0.0};
    for (int k = 0; k + 1 < n; ++k) {
        Vec2 g = tp.planes[static_cast<size_t>(k)].v + rot90(fs.force(k));
        // continuity at points[k]
        double c = tp.planes[static_cast<size_t>(k)](fs.point(k)) - g.dot(fs.point(k));
        tp.planes[static_cast<size_t>(k + 1)] = PlaneFunc{g, c};
    }
    // cycle closure at points[n-1]: the drift equals the torque imbalance
    double drift = tp.planes[static_cast<size_t>(n - 1)](fs.point(n - 1)) -
                   tp.planes[0](fs.point(n - 1));
    double vscale = 1.0;
    for (const auto& p : tp.planes) vscale = std::max(vscale, std::abs(p.c));
    for (int k = 0; k < n; ++k) vscale = std::max(vscale, std::abs(tp.planes[static_cast<size_t>(k)](fs.point(k))));
    if (std::abs(drift) / static_cast<double>(n) > fs.bal_tol * vscale)
        throw InputError("tangent_planes: offset closure drift exceeds tolerance");
    for (int k = 0; k < n; ++k)
        tp.planes[static_cast<size_t>(k)].c -= drift * static_cast<double>(k) / n;
    tp.closure_residual = std::abs(drift) / static_cast<double>(n);
    tp.support.resize(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k)
        tp.support[static_cast<size_t>(k)] = tp.planes[static_cast<size_t>(k)](fs.point(k));
    return tp;
}

namespace {

// Smallest slack min_j (L_j(x_m) - L_m(x_m)) over all vertices, divided by
// the plane value scale. The continuity partner j = m+1 is an equality by
// construction and is skipped so the margin measures real slack.
double concavity_margin(const ForceSystem& fs, const TangentPlanes& tp) {
    const int n = fs.size();
    double vscale = 1.0;
    for (int k = 0; k < n; ++k)
        vscale = std::max(vscale, std::abs(tp.support[static_cast<size_t>(k)]));
    double margin = std::numeric_limits<double>::infinity();
    for (int m = 0; m < n; ++m) {
        double own = tp.support[static_cast<size_t>(m)];
        for (int j = 0; j < n; ++j) {
            if (j == m || j == wrap(m + 1, n)) continue;
            margin = std::min(margin,
                              (tp.planes[static_cast<size_t>(j)](fs.point(m)) - own));
        }
    }
    return margin / vscale;
}

}  // namespace

double compressibility_margin(const ForceSystem& fs) {
    return concavity_margin(fs, tangent_planes(fs));
}

bool compressible_by_concavity(const ForceSystem& fs) {
    return compressibility_margin(fs) >= -fs.bal_tol;
}

bool compressible_by_torque(const ForceSystem& fs) {
    if (!check_balance(fs)) throw InputError("compressibility: unbalanced force system");
    const int n = fs.size();
    for (int j = 0; j < n; ++j) {
        double s = 0.0, scale = 1.0;
        for (int m = 0; m < n; ++m) {
            int k = wrap(j + m, n);
            s += (fs.point(k) - fs.point(j)).dot(rot90(fs.force(k)));
            scale += (fs.point(k) - fs.point(j)).norm() * fs.force(k).norm();
            if (s > fs.bal_tol * scale) return false;
        }
    }
    return true;
}

bool check_compressibility(const ForceSystem& fs) {
    TangentPlanes tp = tangent_planes(fs);
    double margin = concavity_margin(fs, tp);
    bool concave = margin >= -fs.bal_tol;
    bool torque = compressible_by_torque(fs);
    // The two forms must agree away from the tolerance band; inside the band
    // either verdict is defensible and concavity wins.
    if (torque != concave && std::abs(margin) > 10.0 * fs.bal_tol)
        throw InternalError("compressibility: torque and concavity forms disagree");
    return concave;
}

}  // namespace strutforge
