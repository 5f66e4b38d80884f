#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dinc/inapprox.hpp"
#include "dinc/laminate.hpp"
#include "dinc/mesh.hpp"
#include "dinc/oracle.hpp"
#include "dinc/solver.hpp"

namespace dinc {

/// Run configuration (JSON file).
///
///   {
///     "k": [[1, 2]]            or "k_path": "k.json" (relative to the file)
///     "domain": [[0,0],[1,0],[1,1],[0,1]],
///     "schedule": {"eps1": 0.25, "rho": 0.5, "delta_frac": 0.125, "n_max": 20},
///     "tol": 0.05, "eta": 0.05, "mesh_h": 0.0625, "seed": 0,
///     "boundary": {"type": "affine", "xi": [a, b, c, d], "offset": [0, 0]}
///              or {"type": "builtin", "name": "smooth_shear"},
///     "out": "out",
///     "solver": {"max_triangles": 4000000, "pgm_resolution": 256}
///   }
///
/// Omitted keys take their defaults; unknown keys are rejected.
struct RunConfig {
    std::vector<KPoint> k;
    std::vector<Vec2> domain{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    std::optional<double> eps1;
    double rho = 0.5;
    double delta_frac = 0.125;
    int n_max = 20;
    double tol = 0.05;
    double eta = 0.05;
    /// 0 selects diam(Ω)/16.
    double mesh_h = 0.0;
    std::uint64_t seed = 0;
    std::string boundary_type = "affine";
    Mat2 xi0 = Mat2::identity();
    Vec2 offset{0, 0};
    std::string builtin;
    std::string out = "out";
    std::size_t max_triangles = 4'000'000;
    int pgm_resolution = 256;

    IsoSet isoset() const { return IsoSet(k); }
    Domain2 domain2() const { return Domain2(domain); }
    Schedule schedule() const;
    BoundaryData boundary() const;
    SolveOptions solve_options() const;
};

/// Throws ConfigError on malformed input. base_dir resolves k_path.
RunConfig parse_config(const nlohmann::json& j, const std::string& base_dir);
RunConfig load_config(const std::string& path);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

/// tri_id,x1,y1,x2,y2,x3,y3,g11,g12,g21,g22,dist
void write_field_csv(std::ostream& os, const PAField& field, const IsoSet& K);
/// id,x,y,u1,u2
void write_nodes_csv(std::ostream& os, const PAField& field);
/// id,v1,v2,v3
void write_elements_csv(std::ostream& os, const PAField& field);
/// Rebuild a field from node and element files.
PAField read_field(const std::string& nodes_path, const std::string& elements_path);

nlohmann::json to_json(const SolveReport& r);
nlohmann::json to_json(const StageRecord& s);
nlohmann::json to_json(const DistHistogram& h);
nlohmann::json to_json(const LaminateNode& node);
nlohmann::json to_json(const NestingReport& r);
nlohmann::json to_json(const CrossCheckReport& r);

/// 8-bit binary PGM (P5), rows top to bottom.
void write_pgm(const std::string& path, int width, int height, const std::vector<std::uint8_t>& pixels);

struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
};

/// Per-pixel phase over the domain's bounding box: 0 outside Ω, 255 where
/// dist_to_E > tol, otherwise (k+1)·⌊254/|K|⌋ for the nearest point k of K.
/// `resolution` is the pixel count along the longer side.
Raster phase_map(const PAField& field, const Domain2& dom, const IsoSet& K, double tol, int resolution);

/// Hull mask on [0, 1.1·bmax]² in (λ1, λ2), λ2 upwards: 255 inside the hull,
/// 96 in the cone outside it, 0 below the diagonal.
Raster hull_mask(const IsoSet& K, int resolution);

/// Closure occupancy, same layout as hull_mask.
Raster grid_mask(const LambdaGrid& grid);

void write_text(const std::string& path, const std::string& text);

}  // namespace dinc
