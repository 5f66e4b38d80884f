#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dinc/cut.hpp"
#include "dinc/planar.hpp"
#include "dinc/rng.hpp"

using namespace dinc;

TEST_CASE("planar phases hit the target orbit") {
    CounterRng rng(7, 0);
    int found = 0;
    for (int it = 0; it < 2000; ++it) {
        const Mat2 A = rng.next_matrix(-1.5, 1.5);
        const double th = rng.next(0, 3.14159);
        const Vec2 n{std::cos(th), std::sin(th)};
        const KPoint k{1, 2};
        for (Vec2 c : planar_phases(A, n, k)) {
            const SVPair s = singular_values(A + Mat2::outer(c, n));
            CHECK(std::abs(s.l1 - 1) < 1e-9);
            CHECK(std::abs(s.l2 - 2) < 1e-9);
            ++found;
        }
    }
    CHECK(found > 1000);
}

TEST_CASE("min enclosing radius") {
    std::vector<Vec2> p{{0, 0}, {2, 0}, {1, 0.1}};
    Vec2 c;
    CHECK(min_enclosing_radius(p, &c) == doctest::Approx(1.0));
    CHECK(c.x == doctest::Approx(1.0));
    p = {{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}};
    CHECK(min_enclosing_radius(p) == doctest::Approx(1 / std::sqrt(3.0)));
    p = {{3, 4}};
    CHECK(min_enclosing_radius(p) == 0.0);
}

TEST_CASE("plan_planar produces a verified single-normal laminate") {
    const std::vector<KPoint> K{{1, 2}};
    const Mat2 A = Mat2::diag(0.5, 1.5);
    auto t = plan_planar(A, K);
    REQUIRE(t.has_value());
    CHECK(t->is_planar());
    const LaminateStats st = verify_tree(*t);
    CHECK(st.max_leaf_error <= 1e-9);
    const PlanarProfile prof = planar_profile(*t);
    CHECK(prof.frontier.size() >= 2);
    double wsum = 0.0;
    Vec2 bary{0, 0};
    for (std::size_t i = 0; i < prof.phase.size(); ++i) {
        wsum += prof.fraction[i];
        bary += prof.phase[i] * prof.fraction[i];
        CHECK(prof.fraction[i] >= 0.02 - 1e-12);
    }
    CHECK(wsum == doctest::Approx(1.0));
    CHECK(bary.norm() < 1e-10);
    CHECK(prof.rank_one_residual < 1e-10);
    CHECK(prof.radius > 0.0);
}

TEST_CASE("plan_planar over random hull interiors") {
    CounterRng rng(11, 0);
    const std::vector<KPoint> K{{1, 2}, {2, 3}};
    const IsoSet iso(K);
    int planned = 0, tried = 0;
    for (int it = 0; it < 300; ++it) {
        const Mat2 A = rng.next_matrix(-2.0, 2.0);
        if (in_hull(A, iso).cls != HullClass::Interior) continue;
        ++tried;
        auto t = plan_planar(A, K);
        if (!t) continue;
        ++planned;
        CHECK_NOTHROW(verify_tree(*t));
        CHECK(t->is_planar());
        for (const LaminateNode* f : planar_profile(*t).frontier) {
            CHECK(f->is_leaf());
            CHECK(in_E(f->matrix, iso, 1e-8));
        }
    }
    CHECK(tried > 20);
    CHECK(planned > tried / 2);
}

TEST_CASE("plan_bridge") {
    const std::vector<KPoint> K{{1, 1.2}, {0.2, 3}};
    const Mat2 A = Mat2::diag(0.2, 1.2);
    auto t = plan_bridge(A, K);
    if (t) {
        CHECK_NOTHROW(verify_tree(*t));
        CHECK((t->matrix - A).max_abs() < 1e-12);
    }
}

TEST_CASE("polygon cutter keeps shared edges conforming") {
    std::vector<Vec2> pts{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    PolygonCutter cut(pts, 1e-12);
    std::vector<int> lo, hi;
    cut.split({0, 1, 2}, {{1, 0}, 0.5}, 0, lo, hi);
    CHECK(lo.size() == 3);
    CHECK(hi.size() == 4);
    std::vector<int> lo2, hi2;
    cut.split({0, 2, 3}, {{1, 0}, 0.5}, 0, lo2, hi2);
    // diagonal 0-2 is shared and cut once
    CHECK(pts.size() == 7);
    CHECK(polygon_area(pts, lo) + polygon_area(pts, hi) == doctest::Approx(0.5));
    std::vector<std::vector<int>> slabs;
    cut.slice({0, 1, 2, 3}, {0, 1}, {0.25, 0.5, 0.75}, 10, slabs);
    CHECK(slabs.size() == 4);
    double a = 0;
    for (auto& s : slabs) a += polygon_area(pts, s);
    CHECK(a == doctest::Approx(1.0));
}
