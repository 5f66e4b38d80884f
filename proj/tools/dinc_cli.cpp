#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dinc/error.hpp"
#include "dinc/io.hpp"

using namespace dinc;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUnexpected = 1, kConfig = 2, kInfeasible = 3, kUnmet = 4 };

struct Common {
    std::string config;
    std::string k_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<double> eta;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "run configuration (JSON)");
    app->add_option("--k", c.k_path, "K file: list of [a, b] pairs");
    app->add_option("--out", c.out, "output directory");
    app->add_option("--seed", c.seed, "random seed");
    app->add_option("--tol", c.tol, "distance tolerance to E");
    app->add_option("--eta", c.eta, "allowed bad-area fraction");
}

// Config file first, then flag overrides.
RunConfig resolve(const Common& c) {
    RunConfig cfg;
    if (!c.config.empty()) cfg = load_config(c.config);
    if (!c.k_path.empty()) cfg.k = load_isoset_file(c.k_path).points();
    if (cfg.k.empty()) throw ConfigError("no K given: use --k or a config with k / k_path");
    if (!c.out.empty()) cfg.out = c.out;
    if (c.seed) cfg.seed = *c.seed;
    if (c.tol) {
        if (!(*c.tol > 0.0)) throw ConfigError("--tol must be > 0");
        cfg.tol = *c.tol;
    }
    if (c.eta) {
        if (!(*c.eta > 0.0 && *c.eta < 1.0)) throw ConfigError("--eta must lie in (0, 1)");
        cfg.eta = *c.eta;
    }
    return cfg;
}

Mat2 parse_xi(const std::string& s) {
    std::stringstream ss(s);
    std::string cell;
    double v[4];
    int n = 0;
    while (std::getline(ss, cell, ',')) {
        if (n == 4) throw ConfigError("--xi expects four comma-separated numbers");
        try {
            std::size_t used = 0;
            v[n] = std::stod(cell, &used);
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw ConfigError("--xi: bad number '" + cell + "'");
        }
        ++n;
    }
    if (n != 4) throw ConfigError("--xi expects four comma-separated numbers");
    return Mat2(v[0], v[1], v[2], v[3]);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
}

std::string join(const std::string& dir, const char* name) { return (std::filesystem::path(dir) / name).string(); }

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

int cmd_hull(const Common& c, const std::string& xi, int grid) {
    const RunConfig cfg = resolve(c);
    const IsoSet K = cfg.isoset();
    if (xi.empty() == (grid == 0)) throw ConfigError("hull: give exactly one of --xi or --grid");
    if (!xi.empty()) {
        const Mat2 m = parse_xi(xi);
        const HullResult r = in_hull(m, K);
        const SVPair sv = singular_values(m);
        const json out = {{"class", to_string(r.cls)},
                          {"margin", r.margin},
                          {"tol_band", r.tol_band},
                          {"theta_star", r.theta_star},
                          {"singular_values", {sv.l1, sv.l2}},
                          {"in_E", in_E(m, K, 1e-12)}};
        std::cout << out.dump(2) << "\n";
        return kOk;
    }
    if (grid < 2 || grid > 8192) throw ConfigError("--grid must lie in [2, 8192]");
    ensure_dir(cfg.out);
    const Raster r = hull_mask(K, grid);
    const std::string path = join(cfg.out, "hull.pgm");
    write_pgm(path, r.width, r.height, r.pixels);
    std::cout << json{{"pgm", path}, {"width", r.width}, {"height", r.height}, {"lambda_max", 1.1 * K.bmax()}}.dump(2)
              << "\n";
    return kOk;
}

int cmd_solve(const Common& c, const std::string& xi) {
    RunConfig cfg = resolve(c);
    if (!xi.empty()) {
        cfg.boundary_type = "affine";
        cfg.xi0 = parse_xi(xi);
    }
    const IsoSet K = cfg.isoset();
    const Domain2 dom = cfg.domain2();
    const Schedule sched = cfg.schedule();
    const BoundaryData phi = cfg.boundary();
    ensure_dir(cfg.out);
    SolveResult res;
    try {
        res = solve(phi, dom, K, sched, cfg.solve_options());
    } catch (const InfeasibleError& e) {
        json rep = {{"status", "infeasible"}, {"success", false}, {"message", e.what()}};
        if (phi.is_affine()) rep["feasibility"] = to_string(check_feasibility(phi.xi0(), K));
        write_json(join(cfg.out, "report.json"), rep);
        std::cerr << "dinc: " << e.what() << "\n";
        return kInfeasible;
    }
    {
        std::ofstream f(join(cfg.out, "field.csv"), std::ios::binary);
        write_field_csv(f, res.field, K);
        std::ofstream n(join(cfg.out, "nodes.csv"), std::ios::binary);
        write_nodes_csv(n, res.field);
        std::ofstream e(join(cfg.out, "elements.csv"), std::ios::binary);
        write_elements_csv(e, res.field);
        if (!f || !n || !e) throw ConfigError("cannot write field files in " + cfg.out);
    }
    write_json(join(cfg.out, "report.json"), to_json(res.report));
    json trees = json::array();
    for (const LaminateNode& t : res.trees) trees.push_back(to_json(t));
    write_json(join(cfg.out, "laminate.json"), trees);
    const Raster map = phase_map(res.field, dom, K, cfg.tol, cfg.pgm_resolution);
    write_pgm(join(cfg.out, "phase.pgm"), map.width, map.height, map.pixels);

    const SolveReport& r = res.report;
    std::cout << json{{"status", r.status},
                      {"bad_area_fraction", r.bad_area_fraction},
                      {"lipschitz_bound", r.lipschitz_bound},
                      {"stages_run", r.stages_run},
                      {"triangles", r.triangles},
                      {"out", cfg.out}}
                     .dump(2)
              << "\n";
    if (!r.success) std::cerr << "dinc: " << r.message << "\n";
    return r.success ? kOk : kUnmet;
}

int cmd_verify(const Common& c, const std::string& field_dir, bool nesting, bool oracle, int levels,
               std::int64_t n) {
    const RunConfig cfg = resolve(c);
    const IsoSet K = cfg.isoset();
    if (static_cast<int>(!field_dir.empty()) + static_cast<int>(nesting) + static_cast<int>(oracle) != 1) {
        throw ConfigError("verify: give exactly one of --field, --nesting, --oracle");
    }
    if (n < 1) throw ConfigError("--n must be >= 1");
    json out;
    bool ok = true;
    if (!field_dir.empty()) {
        const PAField field = read_field(join(field_dir, "nodes.csv"), join(field_dir, "elements.csv"));
        const BoundaryData phi = cfg.boundary();
        const SolveReport r = verify_field(field, cfg.domain2(), phi, K, cfg.tol, cfg.eta);
        out = to_json(r);
        if (phi.is_affine()) out["feasibility"] = to_string(check_feasibility(phi.xi0(), K));
        ok = r.success;
    } else if (nesting) {
        if (levels < 1) throw ConfigError("--levels must be >= 1");
        const Schedule sched = cfg.schedule();
        out = {{"levels", json::array()}};
        for (int l = 1; l <= levels; ++l) {
            const NestingReport r = check_nesting(K, sched, l, n, cfg.seed);
            json j = to_json(r);
            j.erase("witnesses");
            const ApproxLevel lvl = level(K, sched, l);
            const double bound = 3.0 * std::sqrt(2.0) * lvl.eps;
            try {
                j["dist_sup"] = dist_bound(lvl, K);
                j["dist_bound_ok"] = true;
            } catch (const VerificationError& e) {
                j["dist_bound_ok"] = false;
                j["dist_bound_error"] = e.what();
                ok = false;
            }
            j["dist_limit"] = bound;
            ok = ok && r.ok();
            out["levels"].push_back(j);
        }
        out["ok"] = ok;
    } else {
        const CrossCheckReport r = cross_check(K, default_grid(K, 256), n, cfg.seed);
        out = to_json(r);
        ok = r.containment_ok() && r.agreement >= 0.97;
        out["ok"] = ok;
    }
    const std::string text = out.dump(2) + "\n";
    std::cout << text;
    if (!c.out.empty()) {
        ensure_dir(c.out);
        write_text(join(c.out, "verify.json"), text);
    }
    return ok ? kOk : kUnmet;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dinc: piecewise-affine solutions of isotropic differential inclusions"};
    app.require_subcommand(1);

    Common hc, sc, vc;
    std::string hull_xi, solve_xi, field_dir;
    int grid = 0, levels = 6;
    std::int64_t n = 1000;
    bool nesting = false, oracle = false;

    CLI::App* hull = app.add_subcommand("hull", "classify a matrix against the hull, or rasterize the hull mask");
    add_common(hull, hc);
    hull->add_option("--xi", hull_xi, "matrix a,b,c,d (row major)");
    hull->add_option("--grid", grid, "write an RxR hull mask PGM");

    CLI::App* slv = app.add_subcommand("solve", "construct a piecewise-affine solution");
    add_common(slv, sc);
    slv->add_option("--xi", solve_xi, "affine boundary gradient a,b,c,d (overrides the config)");

    CLI::App* ver = app.add_subcommand("verify", "recheck a solution, the in-approximation or the hull oracles");
    add_common(ver, vc);
    ver->add_option("--field", field_dir, "directory holding nodes.csv and elements.csv");
    ver->add_flag("--nesting", nesting, "check nesting of the in-approximation levels");
    ver->add_flag("--oracle", oracle, "cross-check the hull against closure and LP oracles");
    ver->add_option("--levels", levels, "levels for --nesting");
    ver->add_option("--n", n, "samples (per level for --nesting)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (hull->parsed()) return cmd_hull(hc, hull_xi, grid);
        if (slv->parsed()) return cmd_solve(sc, solve_xi);
        return cmd_verify(vc, field_dir, nesting, oracle, levels, n);
    } catch (const ConfigError& e) {
        std::cerr << "dinc: " << e.what() << "\n";
        return kConfig;
    } catch (const PreconditionError& e) {
        std::cerr << "dinc: " << e.what() << "\n";
        return kConfig;
    } catch (const InfeasibleError& e) {
        std::cerr << "dinc: " << e.what() << "\n";
        return kInfeasible;
    } catch (const VerificationError& e) {
        std::cerr << "dinc: " << e.what() << "\n";
        return kUnmet;
    } catch (const BudgetError& e) {
        std::cerr << "dinc: " << e.what() << "\n";
        return kUnmet;
    } catch (const NumericalError& e) {
        std::cerr << "dinc: " << e.what() << "\n";
        return kUnmet;
    } catch (const std::exception& e) {
        std::cerr << "dinc: unexpected error: " << e.what() << "\n";
        return kUnexpected;
    }
}
