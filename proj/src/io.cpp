#include "dinc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace dinc {

using nlohmann::json;

namespace {

double num(const json& j, const char* what) {
    if (!j.is_number()) throw ConfigError(std::string("config: ") + what + " must be a number");
    return j.get<double>();
}

Vec2 vec2(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2) throw ConfigError(std::string("config: ") + what + " must be [x, y]");
    return {num(j[0], what), num(j[1], what)};
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw ConfigError(std::string("config: unknown key '") + key + "' in " + where);
        }
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ConfigError(where + ": bad number '" + s + "'");
    return v;
}

}  // namespace

Schedule RunConfig::schedule() const {
    const IsoSet K = isoset();
    Schedule s = Schedule::defaults(K);
    if (eps1) s.eps1 = *eps1;
    s.rho = rho;
    s.delta_frac = delta_frac;
    s.n_max = n_max;
    try {
        s.validate(K);
    } catch (const PreconditionError& e) {
        throw ConfigError(std::string("config: schedule: ") + e.what());
    }
    return s;
}

BoundaryData RunConfig::boundary() const {
    if (boundary_type == "affine") return BoundaryData::affine(xi0, offset);
    return BoundaryData::builtin(builtin);
}

SolveOptions RunConfig::solve_options() const {
    SolveOptions o;
    o.tol = tol;
    o.eta = eta;
    o.mesh_h = mesh_h;
    o.seed = seed;
    o.max_triangles = max_triangles;
    return o;
}

RunConfig parse_config(const json& j, const std::string& base_dir) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    check_keys(j, {"k", "k_path", "domain", "schedule", "tol", "eta", "mesh_h", "seed", "boundary", "out", "solver"},
               "config");
    RunConfig c;
    if (j.contains("k") && j.contains("k_path")) throw ConfigError("config: give either k or k_path, not both");
    if (j.contains("k")) {
        c.k = load_isoset_json(j["k"].dump()).points();
    } else if (j.contains("k_path")) {
        if (!j["k_path"].is_string()) throw ConfigError("config: k_path must be a string");
        std::filesystem::path p = j["k_path"].get<std::string>();
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        c.k = load_isoset_file(p.string()).points();
    }
    if (j.contains("domain")) {
        if (!j["domain"].is_array()) throw ConfigError("config: domain must be a list of [x, y]");
        c.domain.clear();
        for (const auto& v : j["domain"]) c.domain.push_back(vec2(v, "domain vertex"));
        Domain2 check(c.domain);
        (void)check;
    }
    if (j.contains("schedule")) {
        const json& s = j["schedule"];
        if (!s.is_object()) throw ConfigError("config: schedule must be an object");
        check_keys(s, {"eps1", "rho", "delta_frac", "n_max"}, "schedule");
        if (s.contains("eps1")) c.eps1 = num(s["eps1"], "schedule.eps1");
        if (s.contains("rho")) c.rho = num(s["rho"], "schedule.rho");
        if (s.contains("delta_frac")) c.delta_frac = num(s["delta_frac"], "schedule.delta_frac");
        if (s.contains("n_max")) {
            if (!s["n_max"].is_number_integer() || s["n_max"].get<int>() < 1) {
                throw ConfigError("config: schedule.n_max must be a positive integer");
            }
            c.n_max = s["n_max"].get<int>();
        }
    }
    if (j.contains("tol")) c.tol = num(j["tol"], "tol");
    if (j.contains("eta")) c.eta = num(j["eta"], "eta");
    if (j.contains("mesh_h")) c.mesh_h = num(j["mesh_h"], "mesh_h");
    if (!(c.tol > 0.0)) throw ConfigError("config: tol must be > 0");
    if (!(c.eta > 0.0 && c.eta < 1.0)) throw ConfigError("config: eta must lie in (0, 1)");
    if (!(c.mesh_h >= 0.0)) throw ConfigError("config: mesh_h must be >= 0");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw ConfigError("config: seed must be a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("boundary")) {
        const json& b = j["boundary"];
        if (!b.is_object() || !b.contains("type") || !b["type"].is_string()) {
            throw ConfigError("config: boundary needs a string 'type'");
        }
        c.boundary_type = b["type"].get<std::string>();
        if (c.boundary_type == "affine") {
            check_keys(b, {"type", "xi", "offset"}, "boundary");
            if (!b.contains("xi") || !b["xi"].is_array() || b["xi"].size() != 4) {
                throw ConfigError("config: affine boundary needs xi = [a, b, c, d]");
            }
            const json& x = b["xi"];
            c.xi0 = Mat2(num(x[0], "xi"), num(x[1], "xi"), num(x[2], "xi"), num(x[3], "xi"));
            if (b.contains("offset")) c.offset = vec2(b["offset"], "boundary.offset");
        } else if (c.boundary_type == "builtin") {
            check_keys(b, {"type", "name"}, "boundary");
            if (!b.contains("name") || !b["name"].is_string()) throw ConfigError("config: builtin boundary needs a name");
            c.builtin = b["name"].get<std::string>();
            BoundaryData::builtin(c.builtin);
        } else {
            throw ConfigError("config: boundary type must be 'affine' or 'builtin'");
        }
    }
    if (j.contains("out")) {
        if (!j["out"].is_string()) throw ConfigError("config: out must be a string");
        c.out = j["out"].get<std::string>();
    }
    if (j.contains("solver")) {
        const json& s = j["solver"];
        if (!s.is_object()) throw ConfigError("config: solver must be an object");
        check_keys(s, {"max_triangles", "pgm_resolution"}, "solver");
        if (s.contains("max_triangles")) {
            if (!s["max_triangles"].is_number_unsigned()) throw ConfigError("config: solver.max_triangles must be a positive integer");
            c.max_triangles = s["max_triangles"].get<std::size_t>();
        }
        if (s.contains("pgm_resolution")) {
            if (!s["pgm_resolution"].is_number_integer() || s["pgm_resolution"].get<int>() < 2 ||
                s["pgm_resolution"].get<int>() > 8192) {
                throw ConfigError("config: solver.pgm_resolution must be an integer in [2, 8192]");
            }
            c.pgm_resolution = s["pgm_resolution"].get<int>();
        }
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse error: ") + e.what());
    }
    return parse_config(j, std::filesystem::path(path).parent_path().string());
}

std::string format_double(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

void write_field_csv(std::ostream& os, const PAField& field, const IsoSet& K) {
    os << "tri_id,x1,y1,x2,y2,x3,y3,g11,g12,g21,g22,dist\n";
    for (std::size_t t = 0; t < field.tris.size(); ++t) {
        os << t;
        for (int v : field.tris[t]) {
            const Vec2 p = field.points[static_cast<std::size_t>(v)];
            os << ',' << format_double(p.x) << ',' << format_double(p.y);
        }
        const Mat2 g = field.gradient(t);
        os << ',' << format_double(g.m11()) << ',' << format_double(g.m12()) << ',' << format_double(g.m21()) << ','
           << format_double(g.m22()) << ',' << format_double(dist_to_E(g, K)) << '\n';
    }
}

void write_nodes_csv(std::ostream& os, const PAField& field) {
    os << "id,x,y,u1,u2\n";
    for (std::size_t v = 0; v < field.points.size(); ++v) {
        os << v << ',' << format_double(field.points[v].x) << ',' << format_double(field.points[v].y) << ','
           << format_double(field.values[v].x) << ',' << format_double(field.values[v].y) << '\n';
    }
}

void write_elements_csv(std::ostream& os, const PAField& field) {
    os << "id,v1,v2,v3\n";
    for (std::size_t t = 0; t < field.tris.size(); ++t) {
        os << t << ',' << field.tris[t][0] << ',' << field.tris[t][1] << ',' << field.tris[t][2] << '\n';
    }
}

PAField read_field(const std::string& nodes_path, const std::string& elements_path) {
    PAField f;
    std::ifstream nodes(nodes_path);
    if (!nodes) throw ConfigError("cannot open " + nodes_path);
    std::string line;
    std::getline(nodes, line);
    if (line != "id,x,y,u1,u2") throw ConfigError(nodes_path + ": unexpected header");
    while (std::getline(nodes, line)) {
        if (line.empty()) continue;
        const auto c = split_csv_line(line);
        if (c.size() != 5) throw ConfigError(nodes_path + ": expected 5 columns");
        if (static_cast<std::size_t>(parse_double(c[0], nodes_path)) != f.points.size()) {
            throw ConfigError(nodes_path + ": node ids must be consecutive from 0");
        }
        f.points.push_back({parse_double(c[1], nodes_path), parse_double(c[2], nodes_path)});
        f.values.push_back({parse_double(c[3], nodes_path), parse_double(c[4], nodes_path)});
    }
    std::ifstream elems(elements_path);
    if (!elems) throw ConfigError("cannot open " + elements_path);
    std::getline(elems, line);
    if (line != "id,v1,v2,v3") throw ConfigError(elements_path + ": unexpected header");
    while (std::getline(elems, line)) {
        if (line.empty()) continue;
        const auto c = split_csv_line(line);
        if (c.size() != 4) throw ConfigError(elements_path + ": expected 4 columns");
        std::array<int, 3> t{};
        for (int k = 0; k < 3; ++k) {
            const double v = parse_double(c[static_cast<std::size_t>(k + 1)], elements_path);
            if (v < 0 || v >= static_cast<double>(f.points.size()) || v != std::floor(v)) {
                throw ConfigError(elements_path + ": vertex index out of range");
            }
            t[static_cast<std::size_t>(k)] = static_cast<int>(v);
        }
        f.tris.push_back(t);
    }
    return f;
}

json to_json(const DistHistogram& h) {
    json edges = json::array();
    for (double e : h.edges) {
        if (std::isfinite(e)) edges.push_back(e);
    }
    return {{"edges", edges}, {"area_fraction", h.area_fraction}, {"last_bin_unbounded", true}};
}

json to_json(const StageRecord& s) {
    return {{"n", s.n},
            {"eps", s.eps},
            {"max_phase_dist", s.max_phase_dist},
            {"dist_bound", s.dist_bound},
            {"bad_area_fraction", s.bad_area_fraction},
            {"transition_area_fraction", s.transition_area_fraction},
            {"lipschitz_bound", s.lipschitz_bound},
            {"triangles", s.triangles},
            {"displacement", s.displacement},
            {"min_period", s.min_period},
            {"min_band_width", s.min_band_width},
            {"histogram", to_json(s.histogram)}};
}

json to_json(const SolveReport& r) {
    json stages = json::array();
    for (const StageRecord& s : r.stages) stages.push_back(to_json(s));
    return {{"status", r.status},
            {"success", r.success},
            {"message", r.message},
            {"feasibility", r.feasibility},
            {"tol", r.tol},
            {"eta", r.eta},
            {"seed", r.seed},
            {"bad_area_fraction", r.bad_area_fraction},
            {"lipschitz_bound", r.lipschitz_bound},
            {"lipschitz_limit", r.lipschitz_limit},
            {"stages_run", r.stages_run},
            {"frozen_area_fraction", r.frozen_area_fraction},
            {"boundary_residual", r.boundary_residual},
            {"area_error", r.area_error},
            {"continuity_defect", r.continuity_defect},
            {"nonpositive_triangles", r.nonpositive_triangles},
            {"triangles", r.triangles},
            {"vertices", r.vertices},
            {"histogram", to_json(r.histogram)},
            {"stages", stages}};
}

json to_json(const LaminateNode& node) {
    json j = {{"matrix", {node.matrix.m11(), node.matrix.m12(), node.matrix.m21(), node.matrix.m22()}}};
    if (node.is_leaf()) {
        j["target"] = {node.target.a, node.target.b};
        return j;
    }
    j["weight"] = node.weight;
    j["normal"] = {node.normal.x, node.normal.y};
    j["amplitude"] = {node.amplitude.x, node.amplitude.y};
    j["children"] = {to_json(node.plus()), to_json(node.minus())};
    return j;
}

json to_json(const NestingReport& r) {
    json w = json::array();
    for (const NestingWitness& x : r.witnesses) {
        w.push_back({{"level", x.level},
                     {"rect", x.rect},
                     {"singular_values", {x.sv.l1, x.sv.l2}},
                     {"target", {x.target.a, x.target.b}}});
    }
    return {{"n", r.n},
            {"samples", r.samples},
            {"passed", r.passed},
            {"failed", r.failed},
            {"corner_ok", r.corner_ok},
            {"target_in_next", r.target_in_next},
            {"ok", r.ok()},
            {"witnesses", w}};
}

json to_json(const CrossCheckReport& r) {
    json counts = json::array();
    for (int a = 0; a < 2; ++a) {
        for (int c = 0; c < 2; ++c) {
            for (int l = 0; l < 2; ++l) {
                counts.push_back({{"analytic", a == 1}, {"closure", c == 1}, {"lp", l == 1}, {"count", r.counts[a][c][l]}});
            }
        }
    }
    return {{"samples", r.samples},
            {"band_excluded", r.band_excluded},
            {"agreement", r.agreement},
            {"coverage", r.coverage},
            {"closure_violations", r.closure_violations},
            {"lp_violations", r.lp_violations},
            {"witness_violations", r.witness_violations},
            {"containment_ok", r.containment_ok()},
            {"closure_iterations", r.closure_iterations},
            {"closure_converged", r.closure_converged},
            {"lp_angles", r.lp_angles},
            {"lp_samples", r.lp_samples},
            {"counts", counts}};
}

void write_pgm(const std::string& path, int width, int height, const std::vector<std::uint8_t>& pixels) {
    if (width < 1 || height < 1 || pixels.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw PreconditionError("write_pgm: pixel count does not match the size");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << "P5\n" << width << ' ' << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
}

Raster phase_map(const PAField& field, const Domain2& dom, const IsoSet& K, double tol, int resolution) {
    if (resolution < 2) throw PreconditionError("phase_map: resolution must be >= 2");
    Vec2 lo, hi;
    dom.bbox(lo, hi);
    const double span = std::max(hi.x - lo.x, hi.y - lo.y);
    const double px = span / resolution;
    Raster r;
    r.width = std::max(1, static_cast<int>(std::lround((hi.x - lo.x) / px)));
    r.height = std::max(1, static_cast<int>(std::lround((hi.y - lo.y) / px)));
    r.pixels.assign(static_cast<std::size_t>(r.width) * static_cast<std::size_t>(r.height), 0);
    const double sx = (hi.x - lo.x) / r.width, sy = (hi.y - lo.y) / r.height;

    std::vector<std::uint8_t> shade(field.tris.size());
    const auto step = static_cast<std::uint8_t>(254 / K.size());
    for (std::size_t t = 0; t < field.tris.size(); ++t) {
        const Mat2 g = field.gradient(t);
        shade[t] = dist_to_E(g, K) > tol ? std::uint8_t{255}
                                         : static_cast<std::uint8_t>((nearest_point(g, K) + 1) * step);
    }
    // Pixel-aligned buckets of triangles.
    std::vector<std::vector<std::uint32_t>> bucket(r.pixels.size());
    auto clampi = [](double v, int n) { return std::clamp(static_cast<int>(std::floor(v)), 0, n - 1); };
    for (std::size_t t = 0; t < field.tris.size(); ++t) {
        Vec2 a = field.points[static_cast<std::size_t>(field.tris[t][0])], b = a;
        for (int v : field.tris[t]) {
            const Vec2 p = field.points[static_cast<std::size_t>(v)];
            a = {std::min(a.x, p.x), std::min(a.y, p.y)};
            b = {std::max(b.x, p.x), std::max(b.y, p.y)};
        }
        // Only pixels whose centre falls in the box can hit the triangle.
        const int i0 = clampi((a.x - lo.x) / sx - 0.5, r.width), i1 = clampi((b.x - lo.x) / sx - 0.5 + 1, r.width);
        const int j0 = clampi((a.y - lo.y) / sy - 0.5, r.height), j1 = clampi((b.y - lo.y) / sy - 0.5 + 1, r.height);
        for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) {
                bucket[static_cast<std::size_t>(j) * static_cast<std::size_t>(r.width) + static_cast<std::size_t>(i)]
                    .push_back(static_cast<std::uint32_t>(t));
            }
        }
    }
    for (int j = 0; j < r.height; ++j) {
        for (int i = 0; i < r.width; ++i) {
            const Vec2 c{lo.x + (i + 0.5) * sx, lo.y + (j + 0.5) * sy};
            if (!dom.contains(c)) continue;
            const auto& cand = bucket[static_cast<std::size_t>(j) * static_cast<std::size_t>(r.width) + static_cast<std::size_t>(i)];
            std::uint8_t val = 0;
            for (std::uint32_t t : cand) {
                const auto& tri = field.tris[t];
                const Vec2 p0 = field.points[static_cast<std::size_t>(tri[0])];
                const Vec2 p1 = field.points[static_cast<std::size_t>(tri[1])];
                const Vec2 p2 = field.points[static_cast<std::size_t>(tri[2])];
                const double s = field.area(t) >= 0 ? 1.0 : -1.0;
                if (s * signed_area(p0, p1, c) >= 0 && s * signed_area(p1, p2, c) >= 0 && s * signed_area(p2, p0, c) >= 0) {
                    val = shade[t];
                    break;
                }
            }
            // Image rows run top to bottom.
            r.pixels[static_cast<std::size_t>(r.height - 1 - j) * static_cast<std::size_t>(r.width) + static_cast<std::size_t>(i)] = val;
        }
    }
    return r;
}

Raster hull_mask(const IsoSet& K, int resolution) {
    if (resolution < 2) throw PreconditionError("hull_mask: resolution must be >= 2");
    const ThetaEnvelope env = build_envelope(K);
    const double hi = 1.1 * K.bmax(), h = hi / resolution;
    Raster r{resolution, resolution, std::vector<std::uint8_t>(static_cast<std::size_t>(resolution) * resolution, 0)};
    for (int j = 0; j < resolution; ++j) {
        for (int i = 0; i < resolution; ++i) {
            const double x = (i + 0.5) * h, y = (j + 0.5) * h;
            std::uint8_t v = 0;
            if (x <= y) v = in_hull_sv({x, y}, K, env).cls == HullClass::Outside ? 96 : 255;
            r.pixels[static_cast<std::size_t>(resolution - 1 - j) * resolution + static_cast<std::size_t>(i)] = v;
        }
    }
    return r;
}

Raster grid_mask(const LambdaGrid& grid) {
    const int n = grid.resolution();
    Raster r{n, n, std::vector<std::uint8_t>(static_cast<std::size_t>(n) * n, 0)};
    for (int c = 0; c < static_cast<int>(grid.cells()); ++c) {
        const int i = c % n, j = c / n;
        const SVPair ctr = grid.center(c);
        std::uint8_t v = ctr.l1 <= ctr.l2 ? 96 : 0;
        if (grid.occupied(c)) v = 255;
        r.pixels[static_cast<std::size_t>(n - 1 - j) * n + static_cast<std::size_t>(i)] = v;
    }
    return r;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

}  // namespace dinc
