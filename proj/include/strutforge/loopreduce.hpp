#pragma once

#include <vector>

#include "strutforge/envelope.hpp"

namespace strutforge {

// An arbitrary planar strut net under external forces, possibly with
// obstacles sitting in some of its faces. Struts may only meet at shared
// nodes; planarize() prepares nets drawn with crossing struts.
struct GeneralNet {
    std::vector<Point2> nodes;
    std::vector<Strut> struts;
    std::vector<Vec2> applied;  // per node
    std::vector<Obstacle> obstacles;
    double bal_tol = 1e-6;  // relative

    double force_scale() const;
    double bal_tol_abs() const;
    // Throws InputError on bad indices, negative strut forces beyond
    // tolerance, node residuals beyond tolerance, or crossing struts.
    void validate() const;
};

// Splits struts at pairwise proper crossings, inserting self-equilibrated
// nodes; the segments keep the parent compression.
GeneralNet planarize(const GeneralNet& net);

struct LoopInfo {
    std::vector<int> cycle;        // CCW node ids of a bounded face
    std::vector<Vec2> net_forces;  // applied + adjoining external strut pushes
    bool simple = false;           // no repeated nodes along the walk
    bool convex = false;
    bool contains_obstacle = false;
    double area = 0.0;
};

// Bounded faces of the planar subdivision. Throws InputError when struts
// cross away from shared nodes.
std::vector<LoopInfo> find_elementary_loops(const GeneralNet& net);

int count_elementary_loops(const GeneralNet& net);

// Theorem bound q + p - p0: forces strictly inside the hull of loaded nodes,
// obstacle count, and obstacles touching the hull boundary.
int loop_bound(const GeneralNet& net);

// Replaces one convex, obstacle-free elementary loop by the open sub-net of
// its vertex force system. Throws InputError naming the failed precondition.
GeneralNet replace_loop(const GeneralNet& net, const LoopInfo& loop);

// Applies replace_loop (smallest qualifying face first) until no loop
// qualifies. Optional frame capture for step-by-step output.
GeneralNet reduce(const GeneralNet& net, std::vector<GeneralNet>* frames = nullptr);

}  // namespace strutforge
