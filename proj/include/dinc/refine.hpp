#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "dinc/laminate.hpp"
#include "dinc/mesh.hpp"
#include "dinc/planar.hpp"

namespace dinc {

struct RefineOptions {
    /// Boundary band width w = bl_frac · area / perimeter of the patch.
    double bl_frac = 0.05;
    /// Ceiling on λ2 of every gradient produced in the band.
    double lip_budget = std::numeric_limits<double>::infinity();
    /// Profile amplitude kept below amp_frac · (lip_budget − λ2 bound) · w.
    double amp_frac = 0.5;
    std::size_t max_triangles = 4'000'000;
    int max_depth = 4;
};

struct RefineStats {
    std::size_t patches = 0;
    std::size_t cells = 0;
    std::size_t ladder_fallbacks = 0;
    double min_period = std::numeric_limits<double>::infinity();
    double min_band_width = std::numeric_limits<double>::infinity();
    /// sup over new vertices of |u − u0| with u0 the patch's affine data.
    double displacement = 0.0;
};

/// Replaces an affine patch by the laminate `node` realized in space.
///
/// Inside the patch u = u0 + ψ·h(x·n): h is the periodic profile whose
/// slopes are the top-layer phases, ψ = min(1, dist(x, ∂patch)/w) a cutoff.
/// The cells are cut by the profile's kink lines, the band offset lines and
/// the bisectors where ψ switches edge; every band triangle keeps an edge
/// along a kink-parallel line so its gradient is A + s c⊗n + h⊗∇ψ for some
/// s ∈ [0, 1]. Cells of a phase that splits again in another direction
/// become patches of their own.
class Refiner {
public:
    Refiner(PAField& out, RefineOptions opt) : out_(out), opt_(opt) {}

    /// poly: counter-clockwise convex polygon of point ids in `out`, whose
    /// values must equal A x + b.
    void refine_patch(const std::vector<int>& poly, const Mat2& A, Vec2 b, const LaminateNode& node);

    /// Estimate of the triangles refine_patch would add, top layer only.
    double estimate_triangles(const std::vector<int>& poly, const Mat2& A, const LaminateNode& node) const;

    const RefineStats& stats() const { return stats_; }

private:
    void patch(const std::vector<int>& poly, const Mat2& A, Vec2 b, const LaminateNode& node, int depth,
               const Mat2& A0, Vec2 b0);
    void emit_fan(const std::vector<int>& poly);
    void emit_ladder(const std::vector<int>& poly, Vec2 n, double tolz);
    void push_tri(int a, int b, int c);

    PAField& out_;
    RefineOptions opt_;
    RefineStats stats_;
    double area_tol_ = 0.0;
};

/// Refine a single triangle of `field` whose gradient equals node.matrix.
/// The band gradients stay on the split's rank-one plane; strip width is at
/// most bl_frac times the triangle diameter.
PAField refine_cell(const PAField& field, std::size_t tri, const LaminateNode& node, double bl_frac,
                    RefineOptions opt = {});

}  // namespace dinc
