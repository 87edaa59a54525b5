#pragma once

#include <span>
#include <vector>

#include "strutforge/equilibrium.hpp"
#include "strutforge/geometry.hpp"

namespace strutforge {

struct EnvelopeCell {
    int plane = -1;  // index into ConcaveEnvelope::planes
    ConvexPolygonCCW region;
};

// Pointwise minimum of a set of planes over a convex domain, with the induced
// planar cell decomposition. Evaluation is defined on the whole plane; cells
// are clipped to the domain.
struct ConcaveEnvelope {
    std::vector<PlaneFunc> planes;
    ConvexPolygonCCW domain;
    std::vector<EnvelopeCell> cells;

    double value(Point2 p) const;
    int active_plane(Point2 p) const;  // lowest index attaining the min
    const EnvelopeCell* cell_of_plane(int plane_idx) const;
};

ConcaveEnvelope min_envelope(std::vector<PlaneFunc> planes, ConvexPolygonCCW domain);

// min(envelope, extra planes); pointwise <= the input envelope.
ConcaveEnvelope cleave(const ConcaveEnvelope& env, std::span<const PlaneFunc> extra);

// The convex region {x in domain : L(x) <= envelope(x)}. Throws InputError
// when empty or degenerate.
ConvexPolygonCCW gamma_region(const ConcaveEnvelope& env, const PlaneFunc& L);

struct Strut {
    int a = -1;
    int b = -1;
    double force = 0.0;  // >= 0: pushes its endpoints apart
};

struct StrutNet {
    std::vector<Point2> nodes;
    std::vector<Strut> struts;
    std::vector<Vec2> applied;  // external force per node (zero if none)

    Vec2 residual(int node) const;  // applied + sum of strut end-forces
    double max_residual() const;
    double min_strut_force() const;
    double max_strut_force() const;
};

struct AppliedForce {
    Point2 at;
    Vec2 force;
};

// Struts pushing with force below this fraction of the maximum get pruned.
inline constexpr double kStrutPruneRel = 1e-8;

// Reads the net off the cell complex: nodes are cell-complex vertices, struts
// the edges shared by cells of distinct planes, forces the gradient jumps.
// When the boundary points and their tangent planes are given (plane k owns
// edge (pts[k-1], pts[k])), boundary edges whose interior cell carries a
// different plane become boundary struts, exactly as if the domain were
// extended by one quadrilateral per edge. Node equilibrium against the
// applied forces is verified to bal_tol_abs.
StrutNet extract_net(const ConcaveEnvelope& env,
                     std::span<const AppliedForce> applied, double bal_tol_abs,
                     std::span<const Point2> boundary_points = {},
                     std::span<const PlaneFunc> tangent = {});

// Convenience: open strut net of a compressible force system.
StrutNet open_net(const ForceSystem& fs);
ConcaveEnvelope open_envelope(const ForceSystem& fs);

double total_weight(const StrutNet& net);  // sum of force * length

// Equivalent boundary form: -sum over boundary edges of
// (grad L_k . outward normal) * edge length, over the edge tangent planes.
double boundary_weight(std::span<const Point2> boundary_points,
                       std::span<const PlaneFunc> tangent);

}  // namespace strutforge
