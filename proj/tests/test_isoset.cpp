#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "dinc/isoset.hpp"
#include "dinc/rng.hpp"

using namespace dinc;

namespace {

double grid_envelope(const IsoSet& K, double theta) {
    double m = -std::numeric_limits<double>::infinity();
    for (const KPoint& p : K.points()) m = std::max(m, f_theta(p.a, p.b, theta));
    return m;
}

// Minimum of g over a uniform θ grid.
double grid_margin(SVPair sv, const IsoSet& K, int n) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
        const double th = K.bmax() * i / n;
        m = std::min(m, grid_envelope(K, th) - (sv.l1 * sv.l2 + th * (sv.l2 - sv.l1)));
    }
    return m;
}

Mat2 dressed(CounterRng& rng, double x, double y) { return rng.next_orthogonal() * Mat2::diag(x, y) * rng.next_orthogonal(); }

}  // namespace

TEST_CASE("IsoSet validation and dedup") {
    CHECK_THROWS_AS(IsoSet({}), ConfigError);
    CHECK_THROWS_AS(IsoSet({{0, 1}}), ConfigError);
    CHECK_THROWS_AS(IsoSet({{2, 1}}), ConfigError);
    try {
        IsoSet({{1, 2}, {3, 1}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("pair 1") != std::string::npos);
    }
    const IsoSet K({{1, 2}, {2, 3}, {1, 2}});
    CHECK(K.size() == 2);
    CHECK(K.a0() == 1.0);
    CHECK(K.bmax() == 3.0);
    CHECK(K.max_product() == 6.0);
}

TEST_CASE("K loads from JSON") {
    const IsoSet K = load_isoset_json("[[1, 2], [2, 3]]");
    CHECK(K.size() == 2);
    CHECK(load_isoset_json(R"({"k": [[1, 1]]})").bmax() == 1.0);
    CHECK_THROWS_AS(load_isoset_json("[[1, 2], [3]]"), ConfigError);
    CHECK_THROWS_AS(load_isoset_json("[[1, 2"), ConfigError);
    CHECK_THROWS_AS(load_isoset_json("[[1, 2], [0.5, -1]]"), ConfigError);
    CHECK_THROWS_AS(load_isoset_file("/nonexistent/k.json"), ConfigError);
}

TEST_CASE("f_theta") {
    CHECK(f_theta(1, 3, 0) == 3.0);
    CHECK(f_theta(1, 3, 2) == 7.0);
    CHECK(f_theta(2, 2, 5) == 4.0);
    CHECK_THROWS_AS(f_theta(0, 1, 0), PreconditionError);
    CHECK_THROWS_AS(f_theta(2, 1, 0), PreconditionError);
    CHECK_THROWS_AS(f_theta(1, 2, -1), PreconditionError);
}

TEST_CASE("envelope examples") {
    ThetaEnvelope e = build_envelope(IsoSet::singleton(1, 2));
    CHECK(e.segments().size() == 1);
    CHECK(e.value(0.0) == 2.0);
    CHECK(e.value(1.5) == 3.5);

    e = build_envelope(IsoSet({{1, 2}, {2, 2}}));
    // max(2 + θ, 4): the lines cross at θ = 2 = bmax, the right end of the
    // domain, so the constant line is active throughout.
    CHECK(e.breakpoints().empty());
    CHECK(e.segments()[0].tag == 1);
    CHECK(e.value(1.0) == 4.0);
    CHECK(e.value(2.0) == 4.0);
    const Line lines[] = {f_theta_line(1, 2), f_theta_line(2, 2)};
    const UpperEnvelope wide(lines, 0.0, 3.0);
    REQUIRE(wide.breakpoints().size() == 1);
    CHECK(wide.breakpoints()[0] == 2.0);

    e = build_envelope(IsoSet::singleton(1, 1));
    CHECK(e.value(0.0) == 1.0);
    CHECK(e.value(1.0) == 1.0);
}

TEST_CASE("envelope matches dense grid max") {
    CounterRng rng(5, 0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<KPoint> pts;
        const int m = 1 + trial % 7;
        for (int i = 0; i < m; ++i) {
            const double a = rng.next(0.2, 2);
            pts.push_back({a, a + rng.next(0, 2)});
        }
        const IsoSet K(pts);
        const ThetaEnvelope e = build_envelope(K);
        CHECK(e.value(0.0) == doctest::Approx(K.max_product()).epsilon(1e-14));
        for (std::size_t s = 1; s < e.segments().size(); ++s) {
            CHECK(e.segments()[s].slope >= e.segments()[s - 1].slope);
        }
        for (int i = 0; i <= 10000; ++i) {
            const double th = K.bmax() * i / 10000.0;
            CHECK(std::abs(e.value(th) - grid_envelope(K, th)) <= 1e-12);
        }
    }
}

TEST_CASE("in_E and dist_to_E") {
    const IsoSet K = IsoSet::singleton(1, 2);
    CHECK(in_E(Mat2::diag(1, 2), K, 0));
    CounterRng rng(8, 0);
    for (int i = 0; i < 100; ++i) CHECK(in_E(dressed(rng, 1, 2), K, 1e-12));
    CHECK_FALSE(in_E(Mat2::diag(1.1, 2), K, 0.05));
    CHECK_THROWS_AS(in_E(Mat2::diag(1, 2), K, -1), PreconditionError);

    CHECK(dist_to_E(Mat2::diag(1, 2), K) == 0.0);
    CHECK(dist_to_E(Mat2::diag(1, 2), IsoSet::singleton(3, 4)) == doctest::Approx(std::sqrt(8.0)));
}

TEST_CASE("dist_to_E matches brute-force orbit sampling") {
    const IsoSet K = IsoSet::singleton(1, 2);
    CounterRng rng(9, 0);
    const int na = 400;
    for (int trial = 0; trial < 5; ++trial) {
        const Mat2 xi = rng.next_matrix(-2, 2);
        double best = std::numeric_limits<double>::infinity();
        // R(α) diag(±1, 1) diag(1, 2) R(β) on a 400×400 angle grid.
        for (int s = 0; s < 2; ++s) {
            for (int i = 0; i < na; ++i) {
                const Mat2 r = Mat2::rotation(2 * M_PI * i / na) * Mat2::diag(s ? -1 : 1, 1) * Mat2::diag(1, 2);
                for (int j = 0; j < na; ++j) best = std::min(best, (xi - r * Mat2::rotation(2 * M_PI * j / na)).norm());
            }
        }
        const double d = dist_to_E(xi, K);
        CHECK(d <= best + 1e-12);
        CHECK(best - d <= 1e-3);
    }
}

TEST_CASE("in_hull examples") {
    const IsoSet K = IsoSet::singleton(1, 2);
    CHECK(in_hull(Mat2::diag(0.5, 2), K).cls == HullClass::Boundary);
    CHECK(in_hull(Mat2::diag(1.5, 2), K).cls == HullClass::Outside);
    const HullResult r = in_hull(Mat2::diag(0.5, 1.5), K);
    CHECK(r.cls == HullClass::Interior);
    CHECK(grid_margin({0.5, 1.5}, K, 10000) > 0.0);
    CHECK(r.margin == doctest::Approx(1.25));
    CHECK(r.tol_band == doctest::Approx(5e-9));
}

TEST_CASE("singleton_hull_test examples") {
    CHECK(singleton_hull_test(Mat2::diag(1, 2), 1, 2));
    CHECK(singleton_hull_test(Mat2::diag(2, 2), 1, 4));
    CHECK_FALSE(singleton_hull_test(Mat2::diag(0.1, 5), 1, 4));
    CHECK_THROWS_AS(singleton_hull_test(Mat2::diag(1, 1), 2, 1), PreconditionError);
}

TEST_CASE("singular matrices are classified by continuity") {
    const IsoSet K = IsoSet::singleton(1, 2);
    CHECK(in_hull(Mat2::diag(0, 1), K).cls == HullClass::Interior);
    CHECK(in_hull(Mat2::diag(0, 2), K).cls == HullClass::Boundary);
    CHECK(in_hull(Mat2::diag(0, 2.5), K).cls == HullClass::Outside);
    CHECK(in_hull(Mat2::diag(0, 0), K).cls == HullClass::Interior);
}

TEST_CASE("property: singleton agreement with the closed form") {
    CounterRng rng(21, 0);
    int compared = 0;
    for (int i = 0; i < 20000; ++i) {
        const double a = rng.next(0.2, 2);
        const IsoSet K = IsoSet::singleton(a, a + rng.next(0, 2));
        const Mat2 xi = rng.next_matrix(-3, 3);
        const HullResult h = in_hull(xi, K);
        if (std::abs(h.margin) <= 1e-8) continue;
        ++compared;
        CHECK((h.cls != HullClass::Outside) == singleton_hull_test(xi, K[0].a, K[0].b));
    }
    CHECK(compared > 19000);
}

TEST_CASE("property: isotropy, E inside hull, monotonicity, breakpoint reduction") {
    CounterRng rng(22, 0);
    const IsoSet K({{1, 2}, {2, 3}, {0.5, 3.5}});
    const IsoSet Kbig({{1, 2}, {2, 3}, {0.5, 3.5}, {2.5, 2.5}});
    const ThetaEnvelope env = build_envelope(K);
    for (int i = 0; i < 5000; ++i) {
        const Mat2 xi = rng.next_matrix(-3, 3);
        const HullResult h = in_hull(xi, K, env);
        const Mat2 rot = rng.next_orthogonal() * xi * rng.next_orthogonal();
        const HullResult hr = in_hull(rot, K, env);
        if (std::abs(h.margin) > 1e-8) CHECK(hr.cls == h.cls);
        if (h.cls != HullClass::Outside) CHECK(in_hull(xi, Kbig).cls != HullClass::Outside);
        if (i < 200) CHECK(std::abs(h.margin - grid_margin(singular_values(xi), K, 10000)) <= 1e-9 * (1 + 3.5 * 3.5) + 1e-3);
    }
    for (const KPoint& p : K.points()) {
        for (int i = 0; i < 50; ++i) {
            const Mat2 xi = dressed(rng, p.a, p.b);
            REQUIRE(in_E(xi, K, 1e-12));
            CHECK(in_hull(xi, K, env).cls != HullClass::Outside);
        }
    }
}

TEST_CASE("breakpoint minimum equals dense-grid minimum on exact breakpoints") {
    // Breakpoints of {(1,2),(2,3),(0.5,3.5)} are rational, so include them in the grid.
    const IsoSet K({{1, 2}, {2, 3}, {0.5, 3.5}});
    const ThetaEnvelope env = build_envelope(K);
    CounterRng rng(23, 0);
    for (int i = 0; i < 300; ++i) {
        const double x = rng.next(0.1, 3);
        const SVPair sv{x, x + rng.next(0, 1)};
        double dense = grid_margin(sv, K, 10000);
        for (double b : env.breakpoints()) dense = std::min(dense, env.value(b) - (sv.l1 * sv.l2 + b * (sv.l2 - sv.l1)));
        CHECK(std::abs(in_hull_sv(sv, K, env).margin - dense) <= 1e-9);
    }
}
