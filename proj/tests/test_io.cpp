#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dinc/io.hpp"

using namespace dinc;
using nlohmann::json;

namespace {

std::filesystem::path scratch(const char* name) {
    auto p = std::filesystem::temp_directory_path() / "dinc_test_io" / name;
    std::filesystem::create_directories(p.parent_path());
    return p;
}

PAField small_field() {
    PAField f;
    f.points = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    f.values = {{0, 0}, {0.5, 0.1}, {0.5, 1.6}, {0, 1.5}};
    f.tris = {{0, 1, 2}, {0, 2, 3}};
    return f;
}

}  // namespace

TEST_CASE("config defaults and overrides") {
    const RunConfig c = parse_config(json::parse(R"({"k": [[1, 2]]})"), ".");
    REQUIRE(c.k.size() == 1);
    CHECK(c.domain.size() == 4);
    CHECK(c.tol == 0.05);
    CHECK(c.eta == 0.05);
    CHECK(c.boundary_type == "affine");
    CHECK(c.schedule().eps1 == doctest::Approx(0.25));

    const RunConfig d = parse_config(json::parse(R"({
        "k": [[1, 2], [2, 3]], "tol": 0.1, "eta": 0.2, "seed": 9, "mesh_h": 0.125,
        "schedule": {"eps1": 0.2, "rho": 0.25, "n_max": 7},
        "boundary": {"type": "affine", "xi": [0.5, 0.1, 0, 1.5], "offset": [1, 2]},
        "solver": {"max_triangles": 1000, "pgm_resolution": 64}
    })"),
                                     ".");
    CHECK(d.k.size() == 2);
    CHECK(d.seed == 9);
    CHECK(d.schedule().rho == 0.25);
    CHECK(d.schedule().n_max == 7);
    CHECK(d.xi0.m12() == 0.1);
    CHECK(d.offset.y == 2);
    CHECK(d.solve_options().max_triangles == 1000);
    CHECK(d.solve_options().mesh_h == 0.125);
    CHECK(d.pgm_resolution == 64);
}

TEST_CASE("config rejects malformed input") {
    auto bad = [](const char* text) { CHECK_THROWS_AS(parse_config(json::parse(text), "."), ConfigError); };
    bad(R"([1, 2])");
    bad(R"({"k": [[1, 2]], "colour": 3})");
    bad(R"({"k": [[1, 2]], "tol": -1})");
    bad(R"({"k": [[1, 2]], "eta": 1.5})");
    bad(R"({"k": [[2, 1]]})");
    bad(R"({"k": [[1, 2]], "k_path": "x.json"})");
    bad(R"({"k": [[1, 2]], "boundary": {"type": "spline"}})");
    bad(R"({"k": [[1, 2]], "boundary": {"type": "affine", "xi": [1, 2, 3]}})");
    bad(R"({"k": [[1, 2]], "boundary": {"type": "builtin", "name": "no_such_map"}})");
    bad(R"({"k": [[1, 2]], "schedule": {"n_max": 0}})");
    bad(R"({"k": [[1, 2]], "seed": -3})");
    bad(R"({"k_path": "does_not_exist.json"})");
    CHECK_THROWS_AS(parse_config(json::parse(R"({"k": [[1, 2]], "schedule": {"rho": 2}})"), ".").schedule(),
                    ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/dinc.json"), ConfigError);
}

TEST_CASE("k_path resolves relative to the config file") {
    const auto dir = scratch("cfg");
    std::filesystem::create_directories(dir);
    write_text((dir / "k.json").string(), "[[1, 3]]");
    write_text((dir / "run.json").string(), R"({"k_path": "k.json", "out": "o"})");
    const RunConfig c = load_config((dir / "run.json").string());
    REQUIRE(c.k.size() == 1);
    CHECK(c.k[0].b == 3);
    write_text((dir / "broken.json").string(), "{\"k\": ");
    CHECK_THROWS_AS(load_config((dir / "broken.json").string()), ConfigError);
}

TEST_CASE("format_double round-trips") {
    for (double v : {0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, 2.5e-300, -1.7976931348623157e308, 6.02214076e23}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("field csv layout") {
    const PAField f = small_field();
    std::ostringstream os;
    write_field_csv(os, f, IsoSet({{1, 2}}));
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "tri_id,x1,y1,x2,y2,x3,y3,g11,g12,g21,g22,dist");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 11);
    }
    CHECK(rows == 2);
}

TEST_CASE("nodes and elements round-trip exactly") {
    PAField f = small_field();
    f.values[2] = {1.0 / 3.0, 2.0 / 7.0};
    const auto n = scratch("nodes.csv"), e = scratch("elements.csv");
    {
        std::ofstream a(n), b(e);
        write_nodes_csv(a, f);
        write_elements_csv(b, f);
    }
    const PAField g = read_field(n.string(), e.string());
    REQUIRE(g.points.size() == f.points.size());
    REQUIRE(g.tris.size() == f.tris.size());
    for (std::size_t i = 0; i < f.points.size(); ++i) {
        CHECK(g.points[i].x == f.points[i].x);
        CHECK(g.values[i].x == f.values[i].x);
        CHECK(g.values[i].y == f.values[i].y);
    }
    for (std::size_t t = 0; t < f.tris.size(); ++t) CHECK(g.tris[t] == f.tris[t]);

    write_text(e.string(), "id,v1,v2,v3\n0,0,1,9\n");
    CHECK_THROWS_AS(read_field(n.string(), e.string()), ConfigError);
    write_text(n.string(), "id,x,y\n");
    CHECK_THROWS_AS(read_field(n.string(), e.string()), ConfigError);
}

TEST_CASE("pgm header and payload") {
    const auto p = scratch("img.pgm");
    write_pgm(p.string(), 3, 2, {0, 1, 2, 3, 4, 255});
    std::ifstream in(p, std::ios::binary);
    const std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(s == std::string("P5\n3 2\n255\n\x00\x01\x02\x03\x04\xff", 17));
    CHECK_THROWS_AS(write_pgm(p.string(), 3, 3, {0}), PreconditionError);
}

TEST_CASE("phase map shades") {
    const IsoSet K({{1, 2}});
    PAField f;
    f.points = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    // Lower triangle has gradient diag(1, 2), upper triangle is far from E.
    f.values = {{0, 0}, {1, 0}, {1, 2}, {0, 0}};
    f.tris = {{0, 1, 2}, {0, 2, 3}};
    const Raster r = phase_map(f, Domain2({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), K, 0.05, 8);
    REQUIRE(r.width == 8);
    REQUIRE(r.height == 8);
    // Bottom-right pixel (last row) is in phase 0, top-left is bad.
    CHECK(r.pixels[7 * 8 + 7] == 254);
    CHECK(r.pixels[0] == 255);
}

TEST_CASE("hull mask layout") {
    const Raster r = hull_mask(IsoSet({{1, 2}}), 22);
    // Cells are 0.1 wide; (0.55, 1.05) is inside, (1.95, 2.15) is in the cone outside, (1.05, 0.15) below the diagonal.
    auto at = [&](int i, int j) { return r.pixels[static_cast<std::size_t>(21 - j) * 22 + static_cast<std::size_t>(i)]; };
    CHECK(at(5, 10) == 255);
    CHECK(at(19, 21) == 96);
    CHECK(at(10, 1) == 0);
}

TEST_CASE("json reports") {
    DistHistogram h = dist_histogram({0.0, 1.0}, {0.5, 0.5}, 0.1);
    const json j = to_json(h);
    CHECK(j["edges"].size() + 1 == h.edges.size());
    CHECK(j["area_fraction"].size() == h.area_fraction.size());
    CHECK(j.dump().find("inf") == std::string::npos);
    CHECK(j.dump().find("null") == std::string::npos);
}
