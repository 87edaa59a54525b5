#pragma once

#include <vector>

#include "strutforge/geometry.hpp"

namespace strutforge {

// Forces applied at the vertices of a convex polygon, numbered CCW.
// Indices are 0-based; accessors wrap modulo n. Entries of `forces` at
// reactive indices are placeholders until the reactions are solved.
struct ForceSystem {
    std::vector<Point2> points;
    std::vector<Vec2> forces;
    std::vector<int> reactive;  // sorted, unique, 0-based
    double bal_tol = 1e-6;      // relative balance tolerance

    int size() const { return static_cast<int>(points.size()); }
    bool is_reactive(int i) const;
    Point2 point(int i) const;  // wrapped
    Vec2 force(int i) const;    // wrapped

    double force_scale() const;  // max given |force|
    // Throws InputError on malformed data. Systems with no reactive indices
    // must be strictly convex; reactive systems may have collinear runs
    // (support points distributed along segments).
    void validate() const;
};

// The affine pieces L of a polyhedral stress-potential along the boundary.
// planes[k] is associated with edge (points[k-1], points[k]); planes[0] == 0.
struct TangentPlanes {
    std::vector<PlaneFunc> planes;
    std::vector<double> support;   // support[k] = planes[k](points[k])
    double closure_residual = 0.0; // per-junction continuity residual left
                                   // after distributing the offset drift
};

// Net force and torque both vanish within bal_tol (relative). Throws
// InputError when reactive indices are present.
bool check_balance(const ForceSystem& fs);

// Builds the plane sequence by forward substitution of the gradient-jump
// relation, offsets fixed by continuity at each vertex, normalized so the
// first plane is identically zero. The small offset drift accumulated around
// the cycle is spread uniformly over the junctions; a drift beyond bal_tol
// is an error. Requires a balanced system with no reactive indices.
TangentPlanes tangent_planes(const ForceSystem& fs);

// Smallest slack of the vertex concavity condition, normalized by the value
// scale of the planes. Positive = compressible with margin.
double compressibility_margin(const ForceSystem& fs);

bool compressible_by_concavity(const ForceSystem& fs);

// Cumulative torque form: anticlockwise partial sums around each start
// vertex stay non-positive (sign fixed so that an inward-pulling square
// passes and its outward mirror fails).
bool compressible_by_torque(const ForceSystem& fs);

// Authoritative predicate: vertex concavity of the tangent planes. Also
// evaluates the torque form; a decisive disagreement between the two is an
// InternalError.
bool check_compressibility(const ForceSystem& fs);

}  // namespace strutforge
