#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/testers.hpp"
#include "strutforge/equilibrium.hpp"

using namespace strutforge;

namespace {

ForceSystem inward_square() {
    ForceSystem fs;
    fs.points = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    fs.forces = {{1, 1}, {-1, 1}, {-1, -1}, {1, -1}};
    return fs;
}

ForceSystem outward_square() {
    ForceSystem fs = inward_square();
    for (auto& f : fs.forces) f = -f;
    return fs;
}

ForceSystem seven_force() {
    ForceSystem fs;
    fs.points = {{0, 0}, {16, 7}, {13, 16}, {-2, 20}, {-12, 19}, {-12, 13}, {-10, 0}};
    fs.forces = {{-1, 4}, {-3, 1}, {-2, -2}, {-3, -5}, {1, -1}, {6, -2}, {2, 5}};
    fs.bal_tol = 5e-3;  // listed torque residual is 2 against a scale of ~428
    return fs;
}

}  // namespace

TEST_CASE("check_balance") {
    CHECK(check_balance(inward_square()));
    ForceSystem thrust = inward_square();
    thrust.forces = {{1, 0}, {1, 0}, {1, 0}, {1, 0}};
    CHECK_FALSE(check_balance(thrust));
    CHECK(check_balance(seven_force()));

    ForceSystem reactive = inward_square();
    reactive.reactive = {0};
    CHECK_THROWS_AS(check_balance(reactive), InputError);
}

TEST_CASE("seven-force component sums are exactly zero") {
    ForceSystem fs = seven_force();
    double sx = 0.0, sy = 0.0;
    for (const auto& f : fs.forces) {
        sx += f.x;
        sy += f.y;
    }
    CHECK(sx == 0.0);
    CHECK(sy == 0.0);
}

TEST_CASE("tangent planes of the inward square") {
    TangentPlanes tp = tangent_planes(inward_square());
    REQUIRE(tp.planes.size() == 4);
    // {0, -x+y, -2x+1, -x-y+1}
    const double expect[4][3] = {
        {0, 0, 0}, {-1, 1, 0}, {-2, 0, 1}, {-1, -1, 1}};
    for (int k = 0; k < 4; ++k) {
        CHECK(tp.planes[k].v.x == doctest::Approx(expect[k][0]).epsilon(1e-12));
        CHECK(tp.planes[k].v.y == doctest::Approx(expect[k][1]).epsilon(1e-12));
        CHECK(tp.planes[k].c == doctest::Approx(expect[k][2]).epsilon(1e-12));
    }
    CHECK(tp.support[0] == doctest::Approx(0.0));
    CHECK(tp.support[1] == doctest::Approx(-1.0));
    CHECK(tp.support[2] == doctest::Approx(-1.0));
    CHECK(tp.support[3] == doctest::Approx(0.0));
}

TEST_CASE("tangent planes scale linearly with the forces") {
    ForceSystem fs = inward_square();
    TangentPlanes tp1 = tangent_planes(fs);
    for (auto& f : fs.forces) f = f * 3.5;
    TangentPlanes tp2 = tangent_planes(fs);
    for (size_t k = 0; k < tp1.planes.size(); ++k) {
        CHECK(tp2.planes[k].v.x == doctest::Approx(3.5 * tp1.planes[k].v.x));
        CHECK(tp2.planes[k].v.y == doctest::Approx(3.5 * tp1.planes[k].v.y));
        CHECK(tp2.planes[k].c == doctest::Approx(3.5 * tp1.planes[k].c));
    }
}

TEST_CASE("tangent planes reject unbalanced systems") {
    ForceSystem fs = inward_square();
    fs.forces[0] = {5, 5};
    CHECK_THROWS_AS(tangent_planes(fs), InputError);
}

TEST_CASE("gradient closure on random balanced systems") {
    sft::Rng rng(31);
    for (int it = 0; it < 100; ++it) {
        ForceSystem fs = sft::random_balanced_system(rng, 3 + static_cast<int>(rng() % 8));
        TangentPlanes tp = tangent_planes(fs);
        // cycling all n jumps returns the starting gradient
        Vec2 g{0, 0};
        double scale = 0.0;
        for (int i = 0; i < fs.size(); ++i) {
            g += rot90(fs.force(i));
            scale += fs.force(i).norm();
        }
        CHECK(g.norm() <= 1e-12 * scale);
        CHECK(tp.closure_residual <= fs.bal_tol * 100);
    }
}

TEST_CASE("compressibility of the squares") {
    CHECK(check_compressibility(inward_square()));
    CHECK_FALSE(check_compressibility(outward_square()));
    CHECK(compressible_by_torque(inward_square()));
    CHECK_FALSE(compressible_by_torque(outward_square()));
}

TEST_CASE("seven-force system is compressible") {
    CHECK(check_compressibility(seven_force()));
    CHECK(compressible_by_torque(seven_force()));
    CHECK(compressibility_margin(seven_force()) > 0.0);
}

TEST_CASE("star systems are compressible") {
    sft::Rng rng(33);
    for (int it = 0; it < 50; ++it) {
        ForceSystem fs = sft::random_star_system(rng, 3 + static_cast<int>(rng() % 8));
        CHECK(check_compressibility(fs));
    }
}

TEST_CASE("torque and concavity forms agree on random balanced systems") {
    sft::Rng rng(34);
    int decisive = 0;
    for (int it = 0; it < 1000; ++it) {
        ForceSystem fs = sft::random_balanced_system(rng, 3 + static_cast<int>(rng() % 8));
        double margin = compressibility_margin(fs);
        if (std::abs(margin) <= 10 * fs.bal_tol) continue;  // tolerance band
        ++decisive;
        CHECK(compressible_by_concavity(fs) == compressible_by_torque(fs));
    }
    CHECK(decisive > 900);
}

TEST_CASE("compressibility is translation and rotation invariant") {
    sft::Rng rng(35);
    for (int it = 0; it < 60; ++it) {
        ForceSystem fs = (it % 2 == 0)
                             ? sft::random_star_system(rng, 4 + static_cast<int>(rng() % 5))
                             : sft::random_balanced_system(rng, 4 + static_cast<int>(rng() % 5));
        bool base = check_compressibility(fs);

        ForceSystem shifted = fs;
        Vec2 t{sft::uniform(rng, -20, 20), sft::uniform(rng, -20, 20)};
        for (auto& p : shifted.points) p += t;
        CHECK(check_compressibility(shifted) == base);

        ForceSystem rotated = fs;
        double th = sft::uniform(rng, 0, 2 * M_PI);
        auto rot = [&](Vec2 v) {
            return Vec2{v.x * std::cos(th) - v.y * std::sin(th),
                        v.x * std::sin(th) + v.y * std::cos(th)};
        };
        for (auto& p : rotated.points) p = rot(p);
        for (auto& f : rotated.forces) f = rot(f);
        CHECK(check_compressibility(rotated) == base);
    }
}
