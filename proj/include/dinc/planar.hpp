#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dinc/laminate.hpp"

namespace dinc {

/// Vectors c with sv(A + c ⊗ n) = (p, q), |n| = 1: the circle
/// |A + c⊗n|² = p² + q² cut by the lines det(A + c⊗n) = ±pq.
std::vector<Vec2> planar_phases(const Mat2& A, Vec2 n, KPoint target);

/// Radius of the smallest disc containing the points, and its center.
double min_enclosing_radius(std::span<const Vec2> pts, Vec2* center = nullptr);

struct PlanarOptions {
    int angle_samples = 720;
    /// Smallest admissible phase volume fraction.
    double min_weight = 0.02;
};

/// Single-normal laminate from A onto the given targets: two or three leaves
/// A + c_i ⊗ n with Σ w_i c_i = 0. Among all normals the one with the
/// smallest profile amplitude is kept. Empty when no normal works (0 is
/// outside the convex hull of the phases for every sampled n).
std::optional<LaminateNode> plan_planar(const Mat2& A, std::span<const KPoint> targets,
                                        const PlanarOptions& opt = {});

/// Two-target bridge: a rank-one segment through A whose endpoints lie in
/// the singleton hulls of two different targets, each finished with
/// split_to_target. Used when A is in no singleton hull.
std::optional<LaminateNode> plan_bridge(const Mat2& A, std::span<const KPoint> targets, int angle_samples = 48);

/// Periodic profile of a laminate's single-normal top layer.
///
/// The frontier is the list of descendants reached through splits sharing
/// the root normal; frontier i occupies the fraction `fraction[i]` of each
/// period, with gradient A + phase[i] ⊗ normal.
struct PlanarProfile {
    Vec2 normal;
    std::vector<double> fraction;
    std::vector<Vec2> phase;
    std::vector<const LaminateNode*> frontier;
    /// Smallest disc around the partial sums Σ_{j<i} fraction_j·phase_j; the
    /// profile amplitude per unit period is `radius`.
    Vec2 center;
    double radius = 0.0;
    /// Max deviation of frontier matrices from A + phase ⊗ normal.
    double rank_one_residual = 0.0;
};

PlanarProfile planar_profile(const LaminateNode& root);

}  // namespace dinc
