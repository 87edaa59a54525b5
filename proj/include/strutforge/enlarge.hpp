#pragma once

#include <optional>
#include <vector>

#include "strutforge/envelope.hpp"

namespace strutforge {

// Tangent-plane data of a compressible system in the form the plane-rolling
// machinery consumes: support points, their planes, the lifted support values
// a_k = L_k(x_k), and the open envelope for region queries.
struct OpenSupport {
    std::vector<Point2> points;
    std::vector<PlaneFunc> planes;
    std::vector<double> support;  // a_k
    ConcaveEnvelope envelope;
    double touch_tol = 0.0;  // absolute tolerance on plane-value equalities
};

OpenSupport open_support(const ForceSystem& fs);

struct CleavingState {
    PlaneFunc plane;
    std::vector<int> touching;  // sorted support indices with L(x_k) = a_k
    std::optional<ConvexPolygonCCW> gamma;
};

// Admissibility: L(x_k) >= a_k for every support point.
bool admissible(const OpenSupport& os, const PlaneFunc& L);

// Drops the plane by min_k (L(x_k) - a_k) so at least one support touches;
// the region grows. Throws InputError for an inadmissible plane.
CleavingState lower_plane(const OpenSupport& os, const PlaneFunc& L);

// With exactly one touching support k, tilts L'' = L' + alpha (L' - L_k) up
// to the first new contact; states already touching two or more supports are
// returned unchanged.
CleavingState tilt_plane(const OpenSupport& os, const CleavingState& state);

// The rolling enumeration: for each seed k, start from the admissible plane
// through the lifted points k, k+1 and a third support, then pivot about the
// seed contact and the latest contact until support k-1 is reached. Every
// emitted state touches at least two supports and its region is maximal.
// Output deduplicated by touching set and sorted by it.
std::vector<CleavingState> roll_maximal_regions(const ForceSystem& fs);

// Perturbation certificate used by the test suites: no +-delta change of the
// three plane parameters stays admissible while strictly enlarging the
// region. delta is relative to the plane value scale.
bool maximality_certificate(const OpenSupport& os, const CleavingState& state,
                            double delta_rel = 1e-4);

}  // namespace strutforge
