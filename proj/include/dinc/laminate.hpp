#pragma once

#include <vector>

#include "dinc/inapprox.hpp"
#include "dinc/isoset.hpp"
#include "dinc/mat2.hpp"

namespace dinc {

/// Binary tree of rank-one splits.
///
/// An internal node's matrix is the weighted average
/// weight·plus + (1 − weight)·minus of its two children, and
/// plus − minus = amplitude ⊗ normal with |normal| = 1.
/// Leaves carry the singular-value pair they were built to hit.
struct LaminateNode {
    Mat2 matrix;
    double weight = 1.0;
    Vec2 amplitude;
    Vec2 normal;
    KPoint target;
    std::vector<LaminateNode> children;  // empty, or {plus, minus}

    static LaminateNode leaf(const Mat2& m, KPoint target);
    /// Internal node; the split direction is recovered from plus − minus.
    static LaminateNode split(const Mat2& m, double weight, LaminateNode plus, LaminateNode minus);

    bool is_leaf() const { return children.empty(); }
    const LaminateNode& plus() const { return children.at(0); }
    const LaminateNode& minus() const { return children.at(1); }
    int depth() const;
    int leaf_count() const;
    /// True when every split in the subtree shares this node's normal
    /// (up to sign), so the whole laminate is a function of x·normal.
    bool is_planar(double tol = 1e-9) const;
};

struct LaminateStats {
    int depth = 0;
    int leaf_count = 0;
    double max_intermediate_l2 = 0.0;
    double barycenter_residual = 0.0;
    double max_rank_one_defect = 0.0;
    double max_leaf_error = 0.0;
};

/// Two-stage laminate from ξ onto the orbit with singular values (p, q):
/// a constant-determinant shear raising λ2 to q, then a split of the first
/// diagonal entry to ±p. Requires ξ in the singleton hull of (p, q).
LaminateNode split_to_target(const Mat2& xi, double p, double q);

/// Laminate from a point of level n onto the nesting target in level n+1.
LaminateNode split_to_level(const Mat2& xi, const IsoSet& K, const Schedule& sched, int n);

/// Recompute every tree invariant; throws VerificationError on violation.
LaminateStats verify_tree(const LaminateNode& node);

}  // namespace dinc
