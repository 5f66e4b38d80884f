#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "dinc/oracle.hpp"
#include "dinc/simplex.hpp"

using namespace dinc;

TEST_CASE("simplex small programs") {
    // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
    const std::vector<std::vector<double>> A{{1, 2, 1, 0}, {3, 1, 0, 1}};
    LPResult r = simplex_solve(A, {4, 6}, {-1, -1, 0, 0});
    REQUIRE(r.status == LPResult::Status::Optimal);
    CHECK(r.objective == doctest::Approx(-2.8));
    CHECK(r.x[0] == doctest::Approx(1.6));
    CHECK(r.x[1] == doctest::Approx(1.2));

    r = simplex_solve({{1, 1}}, {-1}, {0, 0});
    CHECK(r.status == LPResult::Status::Infeasible);
    CHECK(r.infeasibility == doctest::Approx(1.0));

    r = simplex_solve({{1, -1}}, {1}, {0, -1});
    CHECK(r.status == LPResult::Status::Unbounded);

    CHECK_THROWS_AS(simplex_solve({{1, 2}}, {1, 2}, {0, 0}), PreconditionError);
}

TEST_CASE("simplex terminates on a degenerate cycling example") {
    // Beale's example cycles under the textbook largest-coefficient rule.
    const std::vector<std::vector<double>> A{{0.25, -8, -1, 9, 1, 0, 0}, {0.5, -12, -0.5, 3, 0, 1, 0}, {0, 0, 1, 0, 0, 0, 1}};
    const LPResult r = simplex_solve(A, {0, 0, 1}, {-0.75, 20, -0.5, 6, 0, 0, 0});
    REQUIRE(r.status == LPResult::Status::Optimal);
    CHECK(r.objective == doctest::Approx(-1.25));
}

TEST_CASE("lambda grid") {
    CHECK_THROWS_AS(LambdaGrid(1, 0.1, 1, 0.1, 1), PreconditionError);
    CHECK_THROWS_AS(LambdaGrid(10, 0.0, 1, 0.1, 1), PreconditionError);
    CHECK_THROWS_AS(LambdaGrid(10, 2, 3, 0.1, 1), PreconditionError);
    LambdaGrid g(10, 0.1, 1.1, 0.1, 1.1);
    CHECK(g.cell_of(0.15, 0.15) == 0);
    CHECK(g.cell_of(1.1, 1.1) == 99);
    CHECK(g.cell_of(0.05, 0.5) == -1);
    CHECK(g.mark(0.55, 0.75));
    CHECK_FALSE(g.mark(0.56, 0.76));
    CHECK(g.witness(g.cell_of(0.56, 0.76)).l1 == 0.55);
    CHECK(g.count() == 1);
}

TEST_CASE("closure of a singleton stays in the analytic hull and covers it") {
    const LambdaGrid g(200, 0.01, 2.2, 0.01, 2.2);
    const SVPair seed{1, 2};
    const ClosureResult r = laminate_closure(std::span<const SVPair>(&seed, 1), g, 50);
    CHECK(r.converged);
    CHECK(r.iterations <= 50);
    std::size_t hull = 0, hit = 0;
    for (int c = 0; c < static_cast<int>(r.grid.cells()); ++c) {
        if (r.grid.occupied(c)) {
            const SVPair w = r.grid.witness(c);
            CHECK(w.l1 * w.l2 <= 2 + 1e-12);
            CHECK(w.l2 <= 2 + 1e-12);
            CHECK(w.l1 <= w.l2);
        }
        const SVPair ctr = r.grid.center(c);
        if (ctr.l1 <= ctr.l2 && ctr.l1 * ctr.l2 <= 2 && ctr.l2 <= 2) {
            ++hull;
            hit += r.grid.occupied(c);
        }
    }
    CHECK(static_cast<double>(hit) / static_cast<double>(hull) >= 0.95);
}

TEST_CASE("one shear iteration rasterizes the constant-det arc") {
    const LambdaGrid g(200, 0.01, 2.2, 0.01, 2.2);
    const SVPair seed{1, 2};
    ClosureOptions opt;
    opt.box = false;
    const ClosureResult r = laminate_closure(std::span<const SVPair>(&seed, 1), g, 1, opt);
    CHECK_FALSE(r.converged);
    for (double y = std::sqrt(2.0); y <= 2.0; y += 0.001) CHECK(r.grid.occupied_at(2 / y, y));
    for (int c = 0; c < static_cast<int>(r.grid.cells()); ++c) {
        if (r.grid.occupied(c)) CHECK(r.grid.witness(c).l1 * r.grid.witness(c).l2 == doctest::Approx(2.0));
    }
}

TEST_CASE("conformal seed stays in the unit hull") {
    const LambdaGrid g(100, 0.01, 1.1, 0.01, 1.1);
    const SVPair seed{1, 1};
    const ClosureResult r = laminate_closure(std::span<const SVPair>(&seed, 1), g, 50);
    CHECK(r.converged);
    for (int c = 0; c < static_cast<int>(r.grid.cells()); ++c) {
        if (!r.grid.occupied(c)) continue;
        const SVPair w = r.grid.witness(c);
        CHECK(w.l2 <= 1 + 1e-12);
    }
    CHECK(r.grid.occupied_at(0.5, 0.9));
    CHECK_FALSE(r.grid.occupied_at(0.5, 1.05));
}

TEST_CASE("closure precondition") {
    const LambdaGrid g(20, 0.01, 2.2, 0.01, 2.2);
    const SVPair bad{3, 4};
    CHECK_THROWS_AS(laminate_closure(std::span<const SVPair>(&bad, 1), g, 5), PreconditionError);
}

namespace {

std::vector<Mat2> orbit400() {
    std::vector<Mat2> s;
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 10; ++j) {
            const Mat2 R = Mat2::rotation(2 * std::numbers::pi * i / 20), S = Mat2::rotation(2 * std::numbers::pi * j / 10);
            s.push_back(R * Mat2::diag(1, 2) * S);
            s.push_back(R * Mat2::diag(1, -2) * S);
        }
    }
    return s;
}

}  // namespace

TEST_CASE("polyconvex membership examples") {
    const std::vector<Mat2> s = orbit400();
    REQUIRE(s.size() == 400);
    CHECK(pco_membership_lp(s[17], s, 1e-6));
    const MembershipLP m = pco_membership(Mat2::diag(0.5, 2), s, 1e-6);
    CHECK(m.feasible);
    CHECK(m.weight_sum == doctest::Approx(1.0));
    CHECK(m.residual <= 1e-6);
    for (double w : m.weights) CHECK(w >= -1e-12);
    CHECK_FALSE(pco_membership_lp(Mat2::diag(1.5, 2), s, 1e-6));
    CHECK(pco_membership_lp(Mat2::diag(0.3, 0.5), s, 1e-6));
    CHECK_THROWS_AS(pco_membership_lp(Mat2::identity(), {}, 1e-6), PreconditionError);
}

TEST_CASE("LP feasible points are in the analytic hull") {
    const IsoSet K({{1, 2}, {2, 3}});
    const std::vector<Mat2> s = orbit_samples(K, 12);
    CHECK(s.size() == 2 * 2 * 144);
    for (int i = 0; i < 60; ++i) {
        const double x = 0.05 * i, y = 3.2 - 0.02 * i;
        const Mat2 xi = Mat2::rotation(0.1 * i) * Mat2::diag(x, y);
        if (pco_membership_lp(xi, s, 1e-6)) CHECK(in_hull(xi, K).cls != HullClass::Outside);
    }
}

TEST_CASE("cross check containments") {
    for (const IsoSet& K : {IsoSet({{1, 2}}), IsoSet({{1, 2}, {2, 3}}), IsoSet({{1, 1}})}) {
        const CrossCheckReport r = cross_check(K, default_grid(K, 200), 600, 5);
        CHECK(r.containment_ok());
        CHECK(r.closure_converged);
        CHECK(r.coverage >= 0.95);
        CHECK(r.agreement >= 0.97);
        CHECK(r.samples == 600);
    }
}

TEST_CASE("cross check is deterministic") {
    const IsoSet K({{1, 2}});
    const CrossCheckReport a = cross_check(K, default_grid(K, 64), 200, 9);
    const CrossCheckReport b = cross_check(K, default_grid(K, 64), 200, 9);
    CHECK(a.agreement == b.agreement);
    CHECK(a.band_excluded == b.band_excluded);
}
