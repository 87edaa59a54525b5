#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/testers.hpp"
#include "strutforge/loopreduce.hpp"
#include "strutforge/synthesis.hpp"

using namespace strutforge;

namespace {

ForceSystem inward_square() {
    ForceSystem fs;
    fs.points = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    fs.forces = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
    return fs;
}

Obstacle square_obstacle(double x0, double x1, double y0, double y1) {
    return obstacle_from_polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, "box");
}

int net_loops(const StrutNet& net) {
    GeneralNet g{net.nodes, net.struts, net.applied, {}, 1e-6};
    return count_elementary_loops(g);
}

}  // namespace

TEST_CASE("approximate_circle circumscribes") {
    Obstacle obs = approximate_circle({0, 0}, 1.0, 4);
    REQUIRE(obs.polygon.size() == 4);
    for (const auto& v : obs.polygon.vertices())
        CHECK(v.norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    for (int k = 0; k < 64; ++k) {
        double t = 2 * M_PI * k / 64;
        CHECK(obs.polygon.contains({std::cos(t), std::sin(t)}));
    }
}

TEST_CASE("approximate_ellipse circumscribes the hole shapes") {
    Obstacle obs = approximate_ellipse({1.2, 3.5}, 0.25, 0.40, 20);
    REQUIRE(obs.polygon.size() == 20);
    for (int k = 0; k < 256; ++k) {
        double t = 2 * M_PI * k / 256;
        CHECK(obs.polygon.contains({1.2 + 0.25 * std::cos(t), 3.5 + 0.40 * std::sin(t)}));
    }
}

TEST_CASE("approximate_halfdisk: flat edge exact, arc circumscribed") {
    Obstacle obs = approximate_halfdisk({0, 0}, 2.9, 101);
    CHECK(obs.polygon.size() == 101);
    for (int k = 0; k <= 200; ++k) {
        double t = M_PI * k / 200;
        CHECK(obs.polygon.contains({2.9 * std::cos(t), 2.9 * std::sin(t)}));
    }
    // nothing below the flat edge
    for (const auto& v : obs.polygon.vertices()) CHECK(v.y >= -1e-12);
}

TEST_CASE("obstacle_from_polygon: convex passthrough, non-convex hull + warning") {
    Obstacle ok = square_obstacle(0, 1, 0, 1);
    CHECK_FALSE(ok.hull_warning);
    CHECK(ok.polygon.size() == 4);
    Obstacle fixed = obstacle_from_polygon({{0, 0}, {2, 0}, {1, 0.2}, {1, 2}}, "dent");
    CHECK(fixed.hull_warning);
    CHECK(fixed.polygon.size() == 3);
}

TEST_CASE("discretize_supports basics") {
    ForceSystem fs;
    fs.points = {{0, 4}};
    fs.forces = {{0, -1}};
    SupportSegment segs[2] = {{{{-4, 0}, {-3, 0}}, 2}, {{{3, 0}, {4, 0}}, 2}};
    ForceSystem out = discretize_supports(fs, segs);
    CHECK(out.size() == 5);
    CHECK(out.reactive.size() == 4);
    // count=2 puts points exactly at the segment endpoints
    int found = 0;
    for (const auto& p : out.points)
        for (Point2 q : {Point2{-4, 0}, Point2{-3, 0}, Point2{3, 0}, Point2{4, 0}})
            if ((p - q).norm() < 1e-12) ++found;
    CHECK(found == 4);
    CHECK(is_ccw_convex_weak(out.points));
}

TEST_CASE("discretize_supports: 100-point segments stay in convex position") {
    ForceSystem fs;
    fs.points = {{0, 4}};
    fs.forces = {{0, -1}};
    SupportSegment segs[2] = {{{{-4, 0}, {-3, 0}}, 100}, {{{3, 0}, {4, 0}}, 100}};
    ForceSystem out = discretize_supports(fs, segs);
    CHECK(out.size() == 201);
    CHECK(static_cast<int>(out.reactive.size()) == 200);
    CHECK(is_ccw_convex_weak(out.points));
}

TEST_CASE("discretize_supports rejects a segment whose points fall inside") {
    ForceSystem fs;
    fs.points = {{0, 4}};
    fs.forces = {{0, -1}};
    // slanted variant: interior points of the long chord end up strictly
    // inside the hull
    SupportSegment segs[2] = {{{{-4, 0}, {3, 4}}, 100}, {{{3, 0}, {4, 0}}, 100}};
    CHECK_THROWS_WITH_AS(discretize_supports(fs, segs),
                         doctest::Contains("segment 0"), InputError);
}

TEST_CASE("discretize_supports rejects an interior segment") {
    ForceSystem fs = inward_square();
    SupportSegment seg{{{0.2, 0.5}, {0.8, 0.5}}, 4};
    CHECK_THROWS_AS(discretize_supports(fs, std::span<const SupportSegment>(&seg, 1)),
                    InputError);
}

TEST_CASE("quick_infeasibility on the square fixtures") {
    ForceSystem fs = inward_square();
    // crosses both diagonals and pokes out past x=1
    CHECK(quick_infeasibility(fs, square_obstacle(0.4, 1.2, 0.45, 0.55)));
    // interior obstacle: not certified
    CHECK_FALSE(quick_infeasibility(fs, square_obstacle(0.4, 0.6, 0.4, 0.6)));
    // fully outside the hull, away from the net
    CHECK_FALSE(quick_infeasibility(fs, square_obstacle(2.0, 3.0, 0.0, 1.0)));
}

TEST_CASE("avoid_single: interior obstacle is feasible with one loop") {
    ForceSystem fs = inward_square();
    SynthesisResult res = avoid_single(fs, square_obstacle(0.4, 0.6, 0.4, 0.6));
    REQUIRE(res.status == LpStatus::Feasible);
    REQUIRE(res.net);
    CHECK(res.net->min_strut_force() >= -1e-9);
    CHECK(res.net->max_residual() <= 2e-6);
    CHECK(net_loops(*res.net) == 1);
    REQUIRE(res.gamma.size() == 1);
    for (const auto& v : square_obstacle(0.4, 0.6, 0.4, 0.6).polygon.vertices())
        CHECK(res.gamma[0].contains(v));
}

TEST_CASE("avoid_single: the bar across the net is infeasible") {
    ForceSystem fs = inward_square();
    SynthesisResult res = avoid_single(fs, square_obstacle(0.4, 1.2, 0.45, 0.55));
    CHECK(res.status == LpStatus::Infeasible);
}

TEST_CASE("avoid_single: obstacle inside one facet cell is feasible") {
    sft::Rng rng(51);
    for (int it = 0; it < 20; ++it) {
        ForceSystem fs = sft::random_star_system(rng, 3 + static_cast<int>(rng() % 6));
        ConcaveEnvelope env = open_envelope(fs);
        Obstacle obs = sft::shrunk_cell_obstacle(env, rng);
        SynthesisResult res = avoid_single(fs, obs);
        CHECK(res.status == LpStatus::Feasible);
    }
}

TEST_CASE("avoid_multi with one obstacle matches avoid_single") {
    sft::Rng rng(52);
    int done = 0;
    while (done < 20) {
        ForceSystem fs = sft::random_star_system(rng, 3 + static_cast<int>(rng() % 6));
        ConcaveEnvelope env = open_envelope(fs);
        Obstacle obs = sft::shrunk_cell_obstacle(env, rng);
        SynthesisResult a = avoid_single(fs, obs);
        SynthesisResult b = avoid_multi(fs, std::span<const Obstacle>(&obs, 1));
        REQUIRE(a.status == b.status);
        if (a.status == LpStatus::Feasible) {
            CHECK(a.cleaving[0].v.x == doctest::Approx(b.cleaving[0].v.x).epsilon(1e-12));
            CHECK(a.cleaving[0].v.y == doctest::Approx(b.cleaving[0].v.y).epsilon(1e-12));
            CHECK(a.cleaving[0].c == doctest::Approx(b.cleaving[0].c).epsilon(1e-12));
        }
        ++done;
    }
}

TEST_CASE("avoid_multi: two obstacles in opposite cells give two loops") {
    ForceSystem fs = inward_square();
    Obstacle obs[2] = {square_obstacle(0.15, 0.3, 0.42, 0.58),
                       square_obstacle(0.7, 0.85, 0.42, 0.58)};
    SynthesisResult res = avoid_multi(fs, obs);
    REQUIRE(res.status == LpStatus::Feasible);
    CHECK(net_loops(*res.net) == 2);
    for (int q = 0; q < 2; ++q)
        for (const auto& v : obs[q].polygon.vertices())
            CHECK(res.gamma[static_cast<size_t>(q)].contains(v));
}

TEST_CASE("avoid_multi: adding a hopeless obstacle turns infeasible") {
    ForceSystem fs = inward_square();
    Obstacle obs[2] = {square_obstacle(0.4, 0.6, 0.4, 0.6),
                       square_obstacle(0.4, 1.2, 0.45, 0.55)};
    CHECK(avoid_multi(fs, obs).status == LpStatus::Infeasible);
}

TEST_CASE("quick_infeasibility is conservative wrt the LP") {
    sft::Rng rng(53);
    int certified = 0;
    for (int it = 0; it < 60; ++it) {
        ForceSystem fs = sft::random_star_system(rng, 3 + static_cast<int>(rng() % 6));
        StrutNet net = open_net(fs);
        // a thin bar through a strut midpoint, pushed out past the hull
        const Strut& s = net.struts[rng() % net.struts.size()];
        Point2 mid = (net.nodes[static_cast<size_t>(s.a)] +
                      net.nodes[static_cast<size_t>(s.b)]) *
                     0.5;
        Vec2 dir = rot90(net.nodes[static_cast<size_t>(s.b)] -
                         net.nodes[static_cast<size_t>(s.a)]);
        dir = dir / dir.norm();
        double reach = 3.0 * bbox_diagonal(fs.points);
        Vec2 width = rot90(dir) * 0.05;
        Obstacle obs = obstacle_from_polygon({mid - width, mid - width + dir * reach,
                                              mid + width + dir * reach, mid + width},
                                             "bar");
        if (!quick_infeasibility(fs, obs)) continue;
        ++certified;
        CHECK(avoid_single(fs, obs).status == LpStatus::Infeasible);
    }
    CHECK(certified >= 40);
}

TEST_CASE("feasibility is monotone under obstacle shrinking") {
    sft::Rng rng(54);
    int feasible_seen = 0;
    for (int it = 0; it < 60 && feasible_seen < 15; ++it) {
        ForceSystem fs = sft::random_star_system(rng, 4 + static_cast<int>(rng() % 5));
        ConcaveEnvelope env = open_envelope(fs);
        Obstacle obs = sft::shrunk_cell_obstacle(env, rng, 0.8);
        SynthesisResult big = avoid_single(fs, obs);
        if (big.status != LpStatus::Feasible) continue;
        ++feasible_seen;
        Point2 c = obs.polygon.centroid();
        std::vector<Point2> small;
        for (const auto& v : obs.polygon.vertices()) small.push_back(c + (v - c) * 0.5);
        SynthesisResult sm = avoid_single(fs, obstacle_from_polygon(small, "small"));
        CHECK(sm.status == LpStatus::Feasible);
    }
    CHECK(feasible_seen >= 15);
}

TEST_CASE("solve_reactive with everything given reduces to the open net") {
    sft::Rng rng(55);
    for (int it = 0; it < 10; ++it) {
        ForceSystem fs = sft::random_star_system(rng, 3 + static_cast<int>(rng() % 6));
        TangentPlanes tp = tangent_planes(fs);
        SynthesisResult res = solve_reactive(fs, {}, {ObjectiveKind::None, -1});
        REQUIRE(res.status == LpStatus::Feasible);
        REQUIRE(res.tangent.size() == tp.planes.size());
        for (size_t k = 0; k < tp.planes.size(); ++k) {
            CHECK(res.tangent[k].v.x == doctest::Approx(tp.planes[k].v.x).epsilon(1e-9));
            CHECK(res.tangent[k].v.y == doctest::Approx(tp.planes[k].v.y).epsilon(1e-9));
            CHECK(res.tangent[k].c == doctest::Approx(tp.planes[k].c).epsilon(1e-9));
        }
        CHECK(net_loops(*res.net) == 0);
    }
}

TEST_CASE("arch rim: reactive ends give an open funicular net") {
    ForceSystem fs;
    fs.points.push_back({9, 0});
    fs.forces.push_back({0, 0});
    for (int k = 4; k >= -4; --k) {
        double th = M_PI / 2 - k * M_PI / 20;
        fs.points.push_back({9 * std::cos(th), 9 * std::sin(th)});
        fs.forces.push_back({0, -1});
    }
    fs.points.push_back({-9, 0});
    fs.forces.push_back({0, 0});
    fs.reactive = {0, 10};
    SynthesisResult res = solve_reactive(fs, {}, {ObjectiveKind::TotalWeight, -1});
    REQUIRE(res.status == LpStatus::Feasible);
    REQUIRE(res.net);
    CHECK(net_loops(*res.net) == 0);
    CHECK(res.net->min_strut_force() >= -1e-9);
    // reactions balance the nine unit loads
    Vec2 rsum{0, 0};
    for (const auto& [i, f] : res.reactive_forces) rsum += f;
    CHECK(rsum.x == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(rsum.y == doctest::Approx(9.0).epsilon(1e-6));
}

TEST_CASE("single load on two discretized supports avoiding four blocks") {
    ForceSystem base;
    base.points = {{0, 4}};
    base.forces = {{0, -1}};
    SupportSegment segs[2] = {{{{-4, 0}, {-3, 0}}, 100}, {{{3, 0}, {4, 0}}, 100}};
    ForceSystem fs = discretize_supports(base, segs);
    std::vector<Obstacle> obstacles{
        obstacle_from_polygon({{1, 2}, {3, 2}, {3, 3}}, "T1"),
        obstacle_from_polygon({{0, 1.3}, {0.2, 3.5}, {-0.2, 3.5}}, "T2"),
        obstacle_from_polygon({{-2.5, 0.5}, {-1, 0.5}, {-1, 2}}, "T3"),
        obstacle_from_polygon({{-2, 1.2}, {-2, 3}, {-3, 3}, {-3, 1.2}}, "R")};
    SynthesisResult res =
        solve_reactive(fs, obstacles, {ObjectiveKind::TotalWeight, -1});
    REQUIRE(res.status == LpStatus::Feasible);
    REQUIRE(res.objective_value);
    // minimized boundary functional equals the strut-sum weight
    CHECK(*res.objective_value ==
          doctest::Approx(total_weight(*res.net)).epsilon(1e-6));
    CHECK(res.net->min_strut_force() >= -1e-6);
    for (const auto& s : res.net->struts) {
        Segment seg{res.net->nodes[static_cast<size_t>(s.a)],
                    res.net->nodes[static_cast<size_t>(s.b)]};
        for (const auto& o : obstacles)
            CHECK_FALSE(segment_crosses_interior(seg, o.polygon));
    }

    // minimizing the cleaving-plane height over T3 also solves
    SynthesisResult res3 =
        solve_reactive(fs, obstacles, {ObjectiveKind::CleaveHeight, 2});
    CHECK(res3.status == LpStatus::Feasible);
}

TEST_CASE("objective functionals over the reactive program") {
    ForceSystem fs = inward_square();
    fs.reactive = {1};
    fs.forces[1] = {0, 0};
    ReactiveProgram rp(fs, {});
    // one reactive index: the only unknowns are its two jump components
    CHECK(rp.num_unknowns() == 2);
    std::vector<double> w = rp.objective_total_weight();
    REQUIRE(w.size() == 2);
    CHECK((w[0] != 0.0 || w[1] != 0.0));

    Obstacle obs = square_obstacle(0.4, 0.6, 0.4, 0.6);
    ReactiveProgram rp2(fs, std::span<const Obstacle>(&obs, 1));
    std::vector<double> ch = rp2.objective_cleave_height(0);
    REQUIRE(ch.size() == 5);
    // the functional evaluates the cleaving plane at the obstacle centroid
    CHECK(ch[2] == doctest::Approx(0.5));
    CHECK(ch[3] == doctest::Approx(0.5));
    CHECK(ch[4] == doctest::Approx(1.0));
    CHECK_THROWS_AS(rp2.objective_cleave_height(3), InputError);
}

TEST_CASE("soundness of feasible synthesis results (randomized)") {
    sft::Rng rng(56);
    int feasible = 0;
    for (int it = 0; it < 30; ++it) {
        ForceSystem fs = sft::random_star_system(rng, 4 + static_cast<int>(rng() % 5));
        ConcaveEnvelope env = open_envelope(fs);
        Obstacle obs = sft::shrunk_cell_obstacle(env, rng, 0.6);
        SynthesisResult res = avoid_single(fs, obs);
        if (res.status != LpStatus::Feasible) continue;
        ++feasible;
        double tol = fs.bal_tol * std::max(fs.force_scale(), 1.0);
        CHECK(res.net->max_residual() <= tol);
        CHECK(res.net->min_strut_force() >= -tol);
        for (const auto& s : res.net->struts) {
            Segment seg{res.net->nodes[static_cast<size_t>(s.a)],
                        res.net->nodes[static_cast<size_t>(s.b)]};
            CHECK_FALSE(segment_crosses_interior(seg, obs.polygon));
        }
        for (const auto& v : obs.polygon.vertices())
            CHECK(res.gamma[0].contains(v));
    }
    CHECK(feasible >= 25);
}
