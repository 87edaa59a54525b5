#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/testers.hpp"
#include "strutforge/lp.hpp"

using namespace strutforge;

namespace {

LinProgram one_var(double lo, double hi) {
    LinProgram lp;
    lp.num_vars = 1;
    lp.inequalities.push_back({{{0, -1.0}}, -lo});  // x >= lo
    lp.inequalities.push_back({{{0, 1.0}}, hi});    // x <= hi
    return lp;
}

}  // namespace

TEST_CASE("feasibility on an interval") {
    LpOutcome out = solve_feasibility(one_var(1.0, 2.0));
    REQUIRE(out.status == LpStatus::Feasible);
    CHECK(out.x[0] >= 1.0 - 1e-8);
    CHECK(out.x[0] <= 2.0 + 1e-8);
}

TEST_CASE("infeasible interval") {
    LpOutcome out = solve_feasibility(one_var(1.0, 0.0));
    CHECK(out.status == LpStatus::Infeasible);
}

TEST_CASE("minimize over an interval") {
    LinProgram lp = one_var(1.0, 2.0);
    lp.objective = {1.0};
    LpOutcome out = solve_min(lp);
    REQUIRE(out.status == LpStatus::Feasible);
    CHECK(out.x[0] == doctest::Approx(1.0).epsilon(1e-8));

    lp.objective = {-1.0};
    out = solve_min(lp);
    REQUIRE(out.status == LpStatus::Feasible);
    CHECK(out.x[0] == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("unbounded below is detected") {
    LinProgram lp;
    lp.num_vars = 1;
    lp.inequalities.push_back({{{0, 1.0}}, 2.0});  // x <= 2
    lp.objective = {1.0};                          // minimize x
    CHECK(solve_min(lp).status == LpStatus::Unbounded);
}

TEST_CASE("single-obstacle system for the inward square is feasible") {
    // unknowns (vx, vy, c); support values a = (0,-1,-1,0) at the corners,
    // obstacle [0.4,0.6]^2 with envelope values (0,-0.2,-0.2,0)
    LinProgram lp;
    lp.num_vars = 3;
    const double px[4] = {0, 1, 1, 0}, py[4] = {0, 0, 1, 1};
    const double a[4] = {0, -1, -1, 0};
    for (int i = 0; i < 4; ++i)
        lp.inequalities.push_back(
            {{{0, -px[i]}, {1, -py[i]}, {2, -1.0}}, -a[i]});
    const double ox[4] = {0.4, 0.6, 0.6, 0.4}, oy[4] = {0.4, 0.4, 0.6, 0.6};
    const double b[4] = {0, -0.2, -0.2, 0};
    for (int i = 0; i < 4; ++i)
        lp.inequalities.push_back({{{0, ox[i]}, {1, oy[i]}, {2, 1.0}}, b[i]});
    LpOutcome out = solve_feasibility(lp);
    REQUIRE(out.status == LpStatus::Feasible);
    CHECK(out.max_violation <= lp_tolerance(lp));
    // the known witness satisfies the same rows
    CHECK(max_violation(lp, std::vector<double>{-1.0 / 3.0, 0.0, 0.0}) <= 1e-12);
}

TEST_CASE("equalities with artificials") {
    // x + y = 2, x - y = 0, minimize x  ->  x = y = 1
    LinProgram lp;
    lp.num_vars = 2;
    lp.equalities.push_back({{{0, 1.0}, {1, 1.0}}, 2.0});
    lp.equalities.push_back({{{0, 1.0}, {1, -1.0}}, 0.0});
    lp.objective = {1.0, 0.0};
    LpOutcome out = solve_min(lp);
    REQUIRE(out.status == LpStatus::Feasible);
    CHECK(out.x[0] == doctest::Approx(1.0));
    CHECK(out.x[1] == doctest::Approx(1.0));
}

TEST_CASE("witness verification is part of the return path") {
    sft::Rng rng(21);
    for (int it = 0; it < 300; ++it) {
        int d = 2 + static_cast<int>(rng() % 4);
        int m = d + static_cast<int>(rng() % 8);
        // rows through a known interior point keep the instance feasible
        std::vector<double> x0(static_cast<size_t>(d));
        for (auto& v : x0) v = sft::uniform(rng, -3, 3);
        LinProgram lp;
        lp.num_vars = d;
        for (int r = 0; r < m; ++r) {
            LinRow row;
            double lhs = 0.0;
            for (int j = 0; j < d; ++j) {
                double c = sft::uniform(rng, -2, 2);
                row.terms.push_back({j, c});
                lhs += c * x0[static_cast<size_t>(j)];
            }
            row.rhs = lhs + sft::uniform(rng, 0.0, 2.0);
            lp.inequalities.push_back(row);
        }
        LpOutcome out = solve_feasibility(lp);
        REQUIRE(out.status == LpStatus::Feasible);
        CHECK(out.max_violation <= lp_tolerance(lp));
        CHECK(max_violation(lp, out.x) <= lp_tolerance(lp));
    }
}

TEST_CASE("objective agrees with vertex enumeration oracle") {
    sft::Rng rng(22);
    int done = 0;
    while (done < 120) {
        int d = 2 + static_cast<int>(rng() % 3);
        LinProgram lp;
        lp.num_vars = d;
        // box keeps everything bounded
        lp.lower.assign(static_cast<size_t>(d), -4.0);
        lp.upper.assign(static_cast<size_t>(d), 4.0);
        int m = 1 + static_cast<int>(rng() % 6);
        for (int r = 0; r < m; ++r) {
            LinRow row;
            for (int j = 0; j < d; ++j) row.terms.push_back({j, sft::uniform(rng, -2, 2)});
            row.rhs = sft::uniform(rng, -1, 3);
            lp.inequalities.push_back(row);
        }
        lp.objective.clear();
        for (int j = 0; j < d; ++j) lp.objective.push_back(sft::uniform(rng, -1, 1));
        double oracle = sft::lp_vertex_enumeration_min(lp);
        LpOutcome out = solve_min(lp);
        if (out.status == LpStatus::Infeasible) {
            CHECK(oracle == std::numeric_limits<double>::infinity());
            continue;
        }
        REQUIRE(out.status == LpStatus::Feasible);
        REQUIRE(oracle < std::numeric_limits<double>::infinity());
        CHECK(out.objective == doctest::Approx(oracle).epsilon(1e-6));
        ++done;
    }
}

TEST_CASE("determinism: identical inputs give identical witnesses") {
    sft::Rng rng(23);
    LinProgram lp;
    int d = 5;
    lp.num_vars = d;
    lp.lower.assign(static_cast<size_t>(d), -2.0);
    lp.upper.assign(static_cast<size_t>(d), 2.0);
    for (int r = 0; r < 12; ++r) {
        LinRow row;
        for (int j = 0; j < d; ++j) row.terms.push_back({j, sft::uniform(rng, -2, 2)});
        row.rhs = sft::uniform(rng, 0, 3);
        lp.inequalities.push_back(row);
    }
    lp.objective.assign(static_cast<size_t>(d), 1.0);
    LpOutcome a = solve_min(lp);
    LpOutcome b = solve_min(lp);
    REQUIRE(a.status == b.status);
    for (int j = 0; j < d; ++j) CHECK(a.x[static_cast<size_t>(j)] == b.x[static_cast<size_t>(j)]);
}

TEST_CASE("dump_lp emits all rows") {
    LinProgram lp = one_var(0.0, 1.0);
    lp.objective = {1.0};
    std::string text = dump_lp(lp);
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("Subject To") != std::string::npos);
    CHECK(text.find("x0") != std::string::npos);
}
