#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "dinc/isoset.hpp"
#include "dinc/mat2.hpp"

namespace dinc {

/// Simple polygon, stored counter-clockwise.
class Domain2 {
public:
    /// Clockwise input is reversed; self-intersecting or degenerate input
    /// throws ConfigError.
    explicit Domain2(std::vector<Vec2> vertices);
    static Domain2 unit_square() { return Domain2({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

    const std::vector<Vec2>& vertices() const { return v_; }
    double area() const { return area_; }
    double perimeter() const;
    double diameter() const;
    bool is_convex() const;
    bool contains(Vec2 p) const;
    /// Distance from p to the polygon boundary.
    double boundary_distance(Vec2 p) const;
    bool on_boundary(Vec2 p, double tol) const;
    void bbox(Vec2& lo, Vec2& hi) const;

private:
    std::vector<Vec2> v_;
    double area_ = 0.0;
};

/// Boundary datum φ: an affine map or a named C¹ sampler.
class BoundaryData {
public:
    using Sampler = std::function<Vec2(Vec2)>;

    static BoundaryData affine(const Mat2& xi0, Vec2 offset);
    /// `pieces` lists the sub-polygons ω_i on which φ is C¹; empty means
    /// one piece covering the domain.
    static BoundaryData piecewise(std::string name, Sampler f, std::vector<Domain2> pieces = {});
    /// Builtin samplers: "smooth_shear" (x + 0.05 sin y, 1.5 y) and
    /// "quadratic_stretch" (x + x²/2, 1.5 y).
    static BoundaryData builtin(const std::string& name);

    bool is_affine() const { return affine_; }
    const Mat2& xi0() const { return xi0_; }
    Vec2 offset() const { return offset_; }
    const std::string& name() const { return name_; }
    const std::vector<Domain2>& pieces() const { return pieces_; }
    Vec2 operator()(Vec2 x) const;

private:
    bool affine_ = true;
    Mat2 xi0_;
    Vec2 offset_;
    std::string name_;
    Sampler f_;
    std::vector<Domain2> pieces_;
};

/// Triangle area in the plane, positive for counter-clockwise order.
inline double signed_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * cross(b - a, c - a); }

/// Gradient of the affine interpolant of values ua, ub, uc at a, b, c.
Mat2 affine_gradient(Vec2 a, Vec2 b, Vec2 c, Vec2 ua, Vec2 ub, Vec2 uc);

/// Piecewise-affine map on a triangulated planar domain.
///
/// Vertices may hang on the edges of neighbouring triangles; continuity
/// then requires the hanging value to equal the edge's linear trace, which
/// verify_field checks.
struct PAField {
    std::vector<Vec2> points;
    std::vector<Vec2> values;
    std::vector<std::array<int, 3>> tris;

    std::size_t num_triangles() const { return tris.size(); }
    Mat2 gradient(std::size_t t) const;
    double area(std::size_t t) const;
    double total_area() const;
    int add_point(Vec2 p, Vec2 u);
};

/// Convex polygons (index lists into `points`) tiling a domain.
struct PolygonSet {
    std::vector<Vec2> points;
    std::vector<std::vector<int>> polys;
};

/// Cells of the domain's edge-line arrangement that lie inside it; a convex
/// domain comes back as one polygon.
PolygonSet convex_pieces(const Domain2& dom);

/// Structured right-triangle mesh of the polygon's bounding box at spacing h,
/// clipped to the polygon. Values are left at zero.
PAField structured_mesh(const Domain2& dom, double h);

/// Interpolate φ on a mesh of the domain and check that every triangle
/// gradient lies in E ∪ int E^rc, halving h up to three times. Throws
/// InfeasibleError naming the offending triangle when refinement fails.
PAField piecewise_affine_reduce(const BoundaryData& phi, const Domain2& dom, const IsoSet& K, double mesh_h);

}  // namespace dinc
