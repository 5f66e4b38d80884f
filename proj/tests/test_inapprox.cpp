#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dinc/inapprox.hpp"
#include "dinc/rng.hpp"

using namespace dinc;

namespace {

// Schedule with ε(1) = 0.2 for K = {(1, 2)}.
Schedule sched02() {
    Schedule s;
    s.eps1 = 0.2;
    s.rho = 0.5;
    s.delta_frac = 0.125;
    return s;
}

// max over θ-grid of f_θ on the two α/β corners of every closed rect.
double grid_level_margin(SVPair sv, const IsoSet& K, const Schedule& s, int n, int pts) {
    const double e = s.eps(n), d = s.delta(n);
    double ymax = 0;
    for (const KPoint& p : K.points()) ymax = std::max(ymax, p.b - 0.5 * e - d);
    double m = 1e300;
    for (int i = 0; i <= pts; ++i) {
        const double th = ymax * i / pts;
        double env = -1e300;
        for (const KPoint& p : K.points()) {
            const double y = p.b - 0.5 * e - d;
            for (double x : {p.a - 2 * e + d, p.a - e - d}) env = std::max(env, x * y + th * (y - x));
        }
        m = std::min(m, env - (sv.l1 * sv.l2 + th * (sv.l2 - sv.l1)));
    }
    return m;
}

}  // namespace

TEST_CASE("schedule validation") {
    const IsoSet K = IsoSet::singleton(1, 2);
    Schedule s = Schedule::defaults(K);
    CHECK(s.eps1 == 0.25);
    CHECK(s.eps(3) == doctest::Approx(0.0625));
    CHECK(s.delta(1) == doctest::Approx(0.03125));
    s.eps1 = 0.5;
    CHECK_THROWS_AS(s.validate(K), PreconditionError);
    CHECK_THROWS_AS(level(K, s, 1), PreconditionError);
    s = Schedule::defaults(K);
    s.rho = 1.0;
    CHECK_THROWS_AS(s.validate(K), PreconditionError);
    s = Schedule::defaults(K);
    s.delta_frac = 0.25;
    CHECK_THROWS_AS(s.validate(K), PreconditionError);
}

TEST_CASE("level rectangles") {
    const ApproxLevel lvl = level(IsoSet::singleton(1, 2), sched02(), 1);
    const LambdaRect& o = lvl.rects_open[0];
    CHECK(o.x_lo == doctest::Approx(0.6));
    CHECK(o.x_hi == doctest::Approx(0.8));
    CHECK(o.y_lo == doctest::Approx(1.8));
    CHECK(o.y_hi == doctest::Approx(1.9));
    const LambdaRect& c = lvl.rects_closed[0];
    CHECK(lvl.delta == doctest::Approx(0.025));
    CHECK(c.x_lo == doctest::Approx(0.625));
    CHECK(c.x_hi == doctest::Approx(0.775));
    CHECK(c.y_lo == doctest::Approx(1.825));
    CHECK(c.y_hi == doctest::Approx(1.875));
    CHECK_FALSE(c.open);

    const LambdaRect o1 = level(IsoSet::singleton(1, 1), sched02(), 1).rects_open[0];
    CHECK(o1.x_hi == doctest::Approx(0.8));
    CHECK(o1.y_lo == doctest::Approx(0.8));
    CHECK(o1.x_hi <= o1.y_lo);
}

TEST_CASE("in_level membership") {
    const ApproxLevel lvl = level(IsoSet::singleton(1, 2), sched02(), 1);
    CHECK(in_level(Mat2::diag(0.7, 1.85), lvl));
    CHECK_FALSE(in_level(Mat2::diag(0.8, 1.85), lvl));
    CounterRng rng(1, 0);
    for (int i = 0; i < 100; ++i) {
        CHECK(in_level(rng.next_orthogonal() * Mat2::diag(0.7, 1.85) * rng.next_orthogonal(), lvl));
    }
}

TEST_CASE("nesting target lies in the next level") {
    const IsoSet K = IsoSet::singleton(1, 2);
    const KPoint t = nesting_target(K[0], sched02(), 1);
    CHECK(t.a == doctest::Approx(0.85));
    CHECK(t.b == doctest::Approx(1.925));
    CHECK(level(K, sched02(), 2).rects_open[0].contains(t.a, t.b));
}

TEST_CASE("check_nesting passes for valid schedules") {
    const IsoSet K = IsoSet::singleton(1, 2);
    const NestingReport r = check_nesting(K, sched02(), 1, 1000, 7);
    CHECK(r.samples == 1000);
    CHECK(r.ok());
    CHECK(r.witnesses.empty());

    const IsoSet K2({{1, 2}, {2, 3}, {1.5, 1.5}});
    const Schedule s = Schedule::defaults(K2);
    for (int n = 1; n <= 6; ++n) CHECK(check_nesting(K2, s, n, 300, 1).ok());
    CHECK_THROWS_AS(check_nesting(K, sched02(), 1, 0), PreconditionError);
}

TEST_CASE("check_nesting flags an adversarial schedule") {
    // ρ close to 1: the level-(n+1) rectangle nearly coincides with level n,
    // so the upper-right part of level n is not in the target's hull.
    const IsoSet K = IsoSet::singleton(1, 2);
    Schedule s = sched02();
    s.rho = 0.99;
    const NestingReport r = check_nesting(K, s, 1, 1000, 3);
    CHECK_FALSE(r.ok());
    CHECK(r.failed > 0);
    CHECK_FALSE(r.corner_ok);
    REQUIRE_FALSE(r.witnesses.empty());
    CHECK_FALSE(singleton_hull_test_sv(r.witnesses[0].sv, r.witnesses[0].target.a, r.witnesses[0].target.b));
}

TEST_CASE("check_nesting is deterministic given the seed") {
    const IsoSet K = IsoSet::singleton(1, 2);
    Schedule s = sched02();
    s.rho = 0.9;
    const NestingReport a = check_nesting(K, s, 1, 500, 42);
    const NestingReport b = check_nesting(K, s, 1, 500, 42);
    CHECK(a.failed == b.failed);
    REQUIRE(a.witnesses.size() == b.witnesses.size());
    for (std::size_t i = 0; i < a.witnesses.size(); ++i) CHECK(a.witnesses[i].xi == b.witnesses[i].xi);
}

TEST_CASE("dist_bound") {
    const IsoSet K = IsoSet::singleton(1, 2);
    const double d = dist_bound(level(K, sched02(), 1), K);
    CHECK(d == doctest::Approx(std::sqrt(0.2)));
    CHECK(d <= 3 * std::sqrt(2.0) * 0.2);

    const IsoSet K2({{1, 2}, {2, 3}, {1.5, 1.5}});
    const Schedule s = Schedule::defaults(K2);
    double prev = 1e300;
    for (int n = 1; n <= 12; ++n) {
        const ApproxLevel lvl = level(K2, s, n);
        const double b = dist_bound(lvl, K2);
        CHECK(b <= prev);
        CHECK(b <= 3 * std::sqrt(2.0) * lvl.eps);
        prev = b;
    }
}

TEST_CASE("rectangle algebra") {
    CounterRng rng(4, 0);
    for (int t = 0; t < 200; ++t) {
        std::vector<KPoint> pts;
        for (int i = 0; i < 3; ++i) {
            const double a = rng.next(0.2, 2);
            pts.push_back({a, a + rng.next(0, 2)});
        }
        const IsoSet K(pts);
        Schedule s;
        s.eps1 = rng.next(0.01, 0.49) * K.a0();
        s.rho = rng.next(0.1, 0.9);
        s.delta_frac = rng.next(0.01, 0.24);
        for (int n = 1; n <= 6; ++n) {
            const ApproxLevel lvl = level(K, s, n);
            for (std::size_t k = 0; k < K.size(); ++k) {
                const LambdaRect& o = lvl.rects_open[k];
                const LambdaRect& c = lvl.rects_closed[k];
                CHECK(o.contains_rect(c));
                CHECK(c.x_lo > o.x_lo);
                CHECK(o.x_lo > 0.0);
                CHECK(o.x_hi <= o.y_lo);
            }
        }
    }
}

TEST_CASE("find_start_index") {
    const IsoSet K = IsoSet::singleton(1, 2);
    const Schedule s = sched02();
    const int n = find_start_index(Mat2::diag(0.5, 1.5), K, s, 20);
    CHECK(n >= 1);
    CHECK(grid_level_margin({0.5, 1.5}, K, s, n, 10000) > 0.0);
    CHECK(level_hull_margin({0.5, 1.5}, K, s, n) > 0.0);
    if (n > 1) CHECK(level_hull_margin({0.5, 1.5}, K, s, n - 1) <= 1e-12 * 5);

    Schedule fine = s;
    fine.eps1 = 0.01;
    CHECK(find_start_index(Mat2::diag(0.9, 1.9), K, fine, 20) == 1);
    CHECK_THROWS_AS(find_start_index(Mat2::diag(1, 2), K, s, 20), PreconditionError);
    CHECK_THROWS_AS(find_start_index(Mat2::diag(0.5, 2), K, s, 20), PreconditionError);
    // Very close to the boundary: levels run out.
    CHECK_THROWS_AS(find_start_index(Mat2::diag(0.99, 1.99), K, s, 2), NumericalError);
}

TEST_CASE("find_start_index is monotone in the margin") {
    const IsoSet K({{1, 2}, {2, 3}});
    const Schedule s = Schedule::defaults(K);
    CounterRng rng(6, 0);
    for (int i = 0; i < 300; ++i) {
        // Shrinking both singular values raises g(θ) pointwise.
        const double x = rng.next(0.1, 1.9);
        const SVPair sv{x, x + rng.next(0, 1)};
        if (in_hull_sv(sv, K, build_envelope(K)).cls != HullClass::Interior) continue;
        const double f = rng.next(0.5, 1.0);
        const int n1 = find_start_index(Mat2::diag(sv.l1, sv.l2), K, s, 40);
        const int n2 = find_start_index(Mat2::diag(f * sv.l1, f * sv.l2), K, s, 40);
        CHECK(n2 <= n1);
    }
}
