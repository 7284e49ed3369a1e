#include "doctest.h"

#include "drmdp/lp.hpp"
#include "random_lp.hpp"

#include <cmath>
#include <sstream>

using namespace drmdp;
using namespace drmdp::lp;

TEST_CASE("lp: maximize over a simplex face") {
    LinearProgram p(Objective::Maximize);
    const int x1 = p.add_variable(0, kInf, 1);
    const int x2 = p.add_variable(0, kInf, 1);
    p.add_row({{x1, 1}, {x2, 1}}, Sense::Le, 1);
    const auto s = solve_lp(p);
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.certificates.worst() <= 1e-8);
}

TEST_CASE("lp: contradictory bounds are infeasible with a Farkas vector") {
    LinearProgram p;
    const int x = p.add_variable(-kInf, kInf, 0);
    p.add_row({{x, 1}}, Sense::Le, -1);
    p.add_row({{x, 1}}, Sense::Ge, 0);
    const auto s = solve_lp(p);
    CHECK(s.status == Status::Infeasible);
    REQUIRE(s.farkas.size() == 2);
    // A'u = 0, u <= 0 on the <= row, u >= 0 on the >= row, b'u > 0.
    CHECK(std::abs(s.farkas[0] + s.farkas[1]) <= 1e-12);
    CHECK(s.farkas[0] < 0.0);
    CHECK(s.farkas[1] > 0.0);
    CHECK(-1.0 * s.farkas[0] > 0.0);
}

TEST_CASE("lp: pentagon example") {
    // Vertices (0,0), (2,0), (2,0.5), (1.5,1), (0,1): objective 0, 4, 5.5, 6, 3.
    LinearProgram p(Objective::Maximize);
    const int x1 = p.add_variable(0, kInf, 2);
    const int x2 = p.add_variable(0, kInf, 3);
    p.add_row({{x1, 1}}, Sense::Le, 2);
    p.add_row({{x2, 1}}, Sense::Le, 1);
    p.add_row({{x1, 1}, {x2, 1}}, Sense::Le, 2.5);
    const auto s = solve_lp(p);
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(s.primal[0] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(s.primal[1] == doctest::Approx(1.0).epsilon(1e-12));
    // Max problem: multipliers on <= rows are nonnegative.
    for (double y : s.dual) CHECK(y >= -1e-12);
}

TEST_CASE("lp: unbounded problems are reported") {
    LinearProgram p(Objective::Maximize);
    const int x = p.add_variable(0, kInf, 1);
    p.add_row({{x, -1}}, Sense::Le, 0);
    CHECK(solve_lp(p).status == Status::Unbounded);
}

TEST_CASE("lp: structural errors") {
    LinearProgram p;
    p.add_variable(0, 1, 0);
    p.add_row({{3, 1.0}}, Sense::Le, 1);
    CHECK_THROWS_AS(solve_lp(p), Error);
    LinearProgram q;
    q.add_variable(2, 1, 0);
    CHECK_THROWS_AS(solve_lp(q), Error);
}

TEST_CASE("lp: dual is the objective sensitivity to the right-hand side") {
    LinearProgram p(Objective::Minimize);
    const int x = p.add_variable(0, kInf, 1);
    const int y = p.add_variable(0, kInf, 2);
    p.add_row({{x, 1}, {y, 1}}, Sense::Ge, 3);
    p.add_row({{y, 1}}, Sense::Ge, 1);
    const auto s = solve_lp(p);
    REQUIRE(s.optimal());
    CHECK(s.objective == doctest::Approx(4.0));
    LinearProgram q(Objective::Minimize);
    q.add_variable(0, kInf, 1);
    q.add_variable(0, kInf, 2);
    q.add_row({{0, 1}, {1, 1}}, Sense::Ge, 3.5);
    q.add_row({{1, 1}}, Sense::Ge, 1);
    const auto s2 = solve_lp(q);
    CHECK(s2.objective - s.objective == doctest::Approx(0.5 * s.dual[0]));
}

TEST_CASE("lp: random bounded programs match vertex enumeration") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        const auto r = testsupport::random_bounded_lp(rng, 6);
        const auto s = solve_lp(r.program);
        INFO("trial " << trial);
        REQUIRE(s.optimal());
        CHECK(std::abs(s.objective - testsupport::vertex_optimum(r)) <= 1e-7);
        CHECK(s.certificates.worst() <= 1e-8);
        const auto again = compute_certificates(r.program, s.primal, s.dual);
        CHECK(again.worst() <= 1e-8);
    }
}

TEST_CASE("lp: re-solving is deterministic") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto r = testsupport::random_bounded_lp(rng, 6);
        const auto a = solve_lp(r.program);
        const auto b = solve_lp(r.program);
        CHECK(a.status == b.status);
        CHECK(a.objective == b.objective);
        CHECK(a.primal == b.primal);
    }
}

TEST_CASE("lp: MPS export lists every section") {
    LinearProgram p(Objective::Maximize);
    const int x1 = p.add_variable(0, 4, 2, "x1");
    const int x2 = p.add_variable(-kInf, kInf, 3, "x2");
    p.add_row({{x1, 1}, {x2, 1}}, Sense::Le, 2.5, "cap");
    p.add_row({{x2, 1}}, Sense::Eq, 1, "fix");
    std::ostringstream os;
    write_mps(p, os, "TEST");
    const auto text = os.str();
    for (const char* section : {"NAME", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"})
        CHECK(text.find(section) != std::string::npos);
    CHECK(text.find(" FR ") != std::string::npos);
}
