#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "strutforge/envelope.hpp"
#include "strutforge/lp.hpp"

namespace strutforge {

// Circumscribed polygonal approximations: the polygon always CONTAINS the
// shape, so feasibility answers stay conservative.
Obstacle approximate_circle(Point2 center, double radius, int sides,
                            std::string label = "");
Obstacle approximate_ellipse(Point2 center, double semi_x, double semi_y,
                             int sides, std::string label = "");
// Flat edge exact on y = center.y, arc circumscribed above it.
Obstacle approximate_halfdisk(Point2 center, double radius, int sides,
                              std::string label = "");
// Convex input is passed through; non-convex input is replaced by its hull
// with hull_warning set.
Obstacle obstacle_from_polygon(std::vector<Point2> verts, std::string label = "");

struct SupportSegment {
    Segment segment;
    int count = 2;  // fixed reactive points to distribute, incl. endpoints
};

// Inserts uniformly spaced reactive points per segment into the CCW order.
// Throws InputError (naming the segment) when the insertion breaks the convex
// position of the full point list.
ForceSystem discretize_supports(const ForceSystem& fs,
                                std::span<const SupportSegment> supports);

// Certified nonexistence test: true when the obstacle both penetrates a strut
// of the open net and has a vertex strictly outside the hull of the points.
bool quick_infeasibility(const ForceSystem& fs, const Obstacle& obs);

enum class ObjectiveKind { None, TotalWeight, CleaveHeight };

struct Objective {
    ObjectiveKind kind = ObjectiveKind::TotalWeight;
    int obstacle = -1;  // for CleaveHeight
};

struct SynthesisResult {
    LpStatus status = LpStatus::Infeasible;
    std::vector<PlaneFunc> tangent;   // one per boundary point
    std::vector<PlaneFunc> cleaving;  // one per obstacle
    std::optional<ConcaveEnvelope> envelope;
    std::optional<StrutNet> net;
    std::vector<std::pair<int, Vec2>> reactive_forces;  // (point index, force)
    std::optional<double> objective_value;
    std::vector<ConvexPolygonCCW> gamma;  // region per obstacle
    bool boundary_contact = false;        // an obstacle vertex sits on a strut
    long lp_iterations = 0;
};

// Single obstacle, all forces given: 3-unknown cleaving-plane feasibility.
SynthesisResult avoid_single(const ForceSystem& fs, const Obstacle& obs);

// Multiple obstacles, all forces given: 3s unknowns with cross-plane rows.
SynthesisResult avoid_multi(const ForceSystem& fs,
                            std::span<const Obstacle> obstacles);

// Reactive program: tangent planes at reactive indices become unknowns;
// solves for planes, cleaving planes and the reactive forces together.
SynthesisResult solve_reactive(const ForceSystem& fs,
                               std::span<const Obstacle> obstacles,
                               Objective objective = {});

// The assembled free-variable program behind solve_reactive, exposed so the
// objective functionals can be inspected and tested. Unknown layout: two
// gradient-jump components per reactive index (in index order), then
// (v.x, v.y, c) per obstacle. The given-force jumps, the normalization and
// the vertex-continuity chain are eliminated by forward substitution; the
// three cycle-closure equalities remain as rows.
class ReactiveProgram {
  public:
    ReactiveProgram(const ForceSystem& fs, std::span<const Obstacle> obstacles);

    int num_unknowns() const { return nu_; }
    int num_points() const { return n_; }
    int num_obstacles() const { return static_cast<int>(obs_verts_.size()); }

    // Closure equalities + seed concavity rows (near-neighbour pairs).
    LinProgram base_program(const Objective& objective) const;

    // All boundary planes (w_k, d_k) at a given unknown vector.
    std::vector<PlaneFunc> planes_at(std::span<const double> g) const;
    std::vector<PlaneFunc> cleaves_at(std::span<const double> g) const;

    // Linear objective coefficient vectors over the unknowns.
    std::vector<double> objective_total_weight() const;
    std::vector<double> objective_cleave_height(int q) const;
    double objective_constant(const Objective& objective) const;

    // Lazy supplier for the concavity/support/obstacle/cross row families.
    class Rows;

    const ForceSystem& system() const { return fs_; }

  private:
    friend class Rows;

    // a row  sum_k alpha_k.w_k + beta_k d_k + (v,c) terms <= rhs  expressed
    // over the unknowns; constants fold into the rhs
    struct WdTerm {
        int k;
        Vec2 alpha;
        double beta;
    };
    LinRow make_row(std::span<const WdTerm> wd,
                    std::span<const LinTerm> cleave_terms, double rhs) const;

    ForceSystem fs_;
    int n_ = 0;
    int nu_ = 0;
    std::vector<int> jump_var_;           // point index -> unknown slot or -1
    std::vector<Vec2> w0_;                // constant part of w_k
    std::vector<double> d0_;              // constant part of d_k
    std::vector<std::vector<Point2>> obs_verts_;
    std::vector<Point2> obs_centroid_;
};

}  // namespace strutforge
