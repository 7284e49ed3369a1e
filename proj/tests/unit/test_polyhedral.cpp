#include "doctest.h"

#include "drmdp/polyhedral.hpp"

#include <algorithm>
#include <random>

using namespace drmdp;
using namespace drmdp::geom;

namespace {

bool has_point(const VertexList& vl, const numvec& p) {
    return std::any_of(vl.vertices.begin(), vl.vertices.end(), [&](const numvec& v) {
        for (std::size_t i = 0; i < p.size(); ++i)
            if (std::abs(v[i] - p[i]) > 1e-9) return false;
        return true;
    });
}

} // namespace

TEST_CASE("feasibility: unit box has the center as witness") {
    const auto r = feasibility_check(PolyhedralSet::box({0, 0}, {1, 1}));
    REQUIRE(r.feasible);
    CHECK(PolyhedralSet::box({0, 0}, {1, 1}).contains(r.witness));
    CHECK(r.witness[0] == doctest::Approx(0.5));
    CHECK(r.witness[1] == doctest::Approx(0.5));
}

TEST_CASE("feasibility: contradictory bounds give a certificate") {
    const PolyhedralSet s(1, {{{1.0}, 0.0}, {{-1.0}, -1.0}});
    const auto r = feasibility_check(s);
    REQUIRE_FALSE(r.feasible);
    REQUIRE(r.farkas_ineq.size() == 2);
    // u >= 0, A'u = 0, b'u < 0.
    CHECK(r.farkas_ineq[0] >= 0.0);
    CHECK(r.farkas_ineq[1] >= 0.0);
    CHECK(std::abs(r.farkas_ineq[0] - r.farkas_ineq[1]) <= 1e-9);
    CHECK(0.0 * r.farkas_ineq[0] - 1.0 * r.farkas_ineq[1] < 0.0);
}

TEST_CASE("feasibility: simplex in dimension 5") {
    const auto r = feasibility_check(PolyhedralSet::simplex(5));
    REQUIRE(r.feasible);
    CHECK(PolyhedralSet::simplex(5).contains(r.witness));
}

TEST_CASE("feasibility: dimension mismatch is structural") {
    CHECK_THROWS_AS(PolyhedralSet(2, {{{1.0}, 0.0}}), Error);
}

TEST_CASE("bounding box examples") {
    for (const auto& iv : bounding_box(PolyhedralSet::simplex(3))) {
        CHECK(iv.lo == doctest::Approx(0.0));
        CHECK(iv.hi == doctest::Approx(1.0));
    }
    const auto b = bounding_box(PolyhedralSet::box({-1, 0}, {2, 5}));
    CHECK(b[0].lo == doctest::Approx(-1.0));
    CHECK(b[0].hi == doctest::Approx(2.0));
    CHECK(b[1].lo == doctest::Approx(0.0));
    CHECK(b[1].hi == doctest::Approx(5.0));

    const PolyhedralSet s(2, {{{1, 1}, 1}, {{-1, 0}, 0}, {{0, -1}, 0}, {{-1, 0}, -0.25}});
    const auto c = bounding_box(s);
    CHECK(c[0].lo == doctest::Approx(0.25));
    CHECK(c[0].hi == doctest::Approx(1.0));
    CHECK(c[1].lo == doctest::Approx(0.0));
    CHECK(c[1].hi == doctest::Approx(0.75));
}

TEST_CASE("bounding box rejects unbounded sets") {
    const PolyhedralSet half(1, {{{-1.0}, 0.0}});
    try {
        bounding_box(half);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotCompact);
    }
}

TEST_CASE("vertex enumeration examples") {
    const auto s3 = enumerate_vertices(PolyhedralSet::simplex(3));
    CHECK(s3.vertices.size() == 3);
    CHECK(has_point(s3, {1, 0, 0}));
    CHECK(has_point(s3, {0, 1, 0}));
    CHECK(has_point(s3, {0, 0, 1}));

    const auto box = enumerate_vertices(PolyhedralSet::box({0, 0}, {1, 1}));
    CHECK(box.vertices.size() == 4);

    const auto cut = enumerate_vertices(PolyhedralSet::simplex(3).with({{{1, 0, 0}, 0.5}}));
    CHECK(cut.vertices.size() == 4);
    for (const numvec& p : std::vector<numvec>{{0.5, 0.5, 0}, {0.5, 0, 0.5}, {0, 1, 0}, {0, 0, 1}})
        CHECK(has_point(cut, p));
}

TEST_CASE("vertex enumeration guards its dimension") {
    try {
        enumerate_vertices(PolyhedralSet::simplex(9));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Guard);
    }
}

TEST_CASE("pwl evaluation examples") {
    CHECK(pwl_eval(PwlConvexFn::l1_distance({0, 0}), {1, -2}) == doctest::Approx(3.0));
    CHECK(pwl_eval(PwlConvexFn::linf_distance({1, 1}), {1, 1}) == doctest::Approx(0.0));
    CHECK(pwl_eval(PwlConvexFn::affine({2, -1}, 1), {3, 4}) == doctest::Approx(3.0));
    CHECK(pwl_eval(PwlConvexFn::abs_affine({1, 0}, -2), {0, 7}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(pwl_eval(PwlConvexFn::affine({1, 1}, 0), {1}), Error);
}

TEST_CASE("pwl functions are midpoint convex") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int f = 0; f < 10; ++f) {
        const int dim = 1 + f % 4;
        std::vector<std::vector<AffinePiece>> blocks(1 + f % 3);
        for (auto& blk : blocks)
            for (int k = 0; k < 1 + (f + 1) % 4; ++k) {
                numvec a(dim);
                for (auto& x : a) x = u(rng);
                blk.push_back({a, u(rng)});
            }
        const PwlConvexFn fn(dim, blocks);
        for (int t = 0; t < 100; ++t) {
            numvec x(dim), y(dim), m(dim);
            for (int i = 0; i < dim; ++i) {
                x[i] = u(rng);
                y[i] = u(rng);
                m[i] = 0.5 * (x[i] + y[i]);
            }
            CHECK(fn(m) <= 0.5 * (fn(x) + fn(y)) + 1e-12);
        }
    }
}

TEST_CASE("enumerated vertices are feasible and inside the bounding box") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 40; ++trial) {
        const int dim = 2 + trial % 3;
        std::vector<Halfspace> rows;
        for (int i = 0; i < dim; ++i) {
            numvec a(dim, 0.0);
            a[i] = 1;
            rows.push_back({a, 1});
            a[i] = -1;
            rows.push_back({a, 1});
        }
        for (int r = 0; r < 3; ++r) {
            numvec a(dim);
            for (auto& x : a) x = u(rng);
            rows.push_back({a, 0.3 + 0.5 * (u(rng) + 1)});
        }
        const PolyhedralSet s(dim, rows);
        const auto verts = enumerate_vertices(s);
        const auto box = bounding_box(s);
        REQUIRE_FALSE(verts.vertices.empty());
        for (const auto& v : verts.vertices) {
            CHECK(s.contains(v, 1e-9));
            for (int i = 0; i < dim; ++i) {
                CHECK(v[i] >= box[i].lo - 1e-9);
                CHECK(v[i] <= box[i].hi + 1e-9);
            }
        }
    }
}
