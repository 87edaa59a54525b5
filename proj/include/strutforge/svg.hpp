#pragma once

#include <optional>
#include <string>
#include <vector>

#include "strutforge/envelope.hpp"
#include "strutforge/geometry.hpp"

namespace strutforge {

// What a figure shows: domain outline, gray obstacles, struts with width
// proportional to force, applied-force arrows and reactive points.
struct SvgScene {
    std::optional<ConvexPolygonCCW> hull;
    std::vector<Obstacle> obstacles;
    std::optional<StrutNet> net;
    std::vector<std::pair<Point2, Vec2>> arrows;
    std::vector<Point2> reactive_points;
    std::vector<ConvexPolygonCCW> gamma;  // loop-region outlines
    double force_scale = 1.0;             // arrow length multiplier
};

std::string render_svg(const SvgScene& scene);
void write_svg(const std::string& path, const SvgScene& scene);

}  // namespace strutforge
