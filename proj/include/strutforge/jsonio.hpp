#pragma once

#include <optional>
#include <string>
#include <vector>

#include "strutforge/loopreduce.hpp"
#include "strutforge/synthesis.hpp"

namespace strutforge {

// A problem file bundles a force system (or a net, for loop reduction) with
// obstacles, an optional objective and tolerance overrides.
struct ProblemFile {
    std::string description;
    std::optional<ForceSystem> system;
    std::vector<SupportSegment> supports;
    std::vector<Obstacle> obstacles;
    Objective objective{ObjectiveKind::TotalWeight, -1};
    bool objective_given = false;
    std::optional<GeneralNet> net;
    std::optional<double> lp_tol;
    std::optional<double> bal_tol;
};

// Parses and validates a problem file. Schema violations raise InputError
// with a JSON-path prefix, e.g. "/forces/3: expected [fx, fy] or null".
ProblemFile load_problem(const std::string& path);
ProblemFile parse_problem(const std::string& text);

// Report emission: deterministic key order and float formatting.
std::string report_to_json(const struct Report& report);

struct Report {
    std::string command;
    std::string status;  // "ok" | "feasible" | "infeasible" | "unbounded"
    std::string reason;
    std::optional<bool> balanced;
    std::optional<bool> compressible;
    std::vector<PlaneFunc> tangent;
    std::vector<PlaneFunc> cleaving;
    std::optional<StrutNet> net;
    std::vector<std::pair<int, Vec2>> reactive_forces;
    std::optional<double> objective_value;
    std::vector<ConvexPolygonCCW> gamma;
    std::vector<std::vector<int>> touching_sets;
    std::optional<int> loop_count_initial;
    std::optional<int> loop_count_final;
    std::optional<int> loop_bound_value;
    std::optional<double> max_residual;
    std::optional<bool> boundary_contact;
    std::optional<long> lp_iterations;
};

// Re-loads the net block of a report (round-trip verification).
StrutNet net_from_report_json(const std::string& text);

}  // namespace strutforge
