#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "dinc/isoset.hpp"
#include "dinc/mat2.hpp"

namespace dinc {

/// Occupancy grid over a rectangle of the (λ1, λ2) plane. Every occupied
/// cell stores a witness: an exact λ-pair inside the cell that was reached
/// by rank-one moves.
class LambdaGrid {
public:
    LambdaGrid(int resolution, double x_lo, double x_hi, double y_lo, double y_hi);

    int resolution() const { return res_; }
    double x_lo() const { return x_lo_; }
    double x_hi() const { return x_hi_; }
    double y_lo() const { return y_lo_; }
    double y_hi() const { return y_hi_; }
    double cell_width() const { return (x_hi_ - x_lo_) / res_; }
    double cell_height() const { return (y_hi_ - y_lo_) / res_; }

    /// Cell index of (x, y), or -1 outside the bounds.
    int cell_of(double x, double y) const;
    SVPair center(int cell) const;
    bool occupied(int cell) const { return occ_[static_cast<std::size_t>(cell)] != 0; }
    /// Lookup of a λ-pair; false outside the bounds.
    bool occupied_at(double x, double y) const;
    SVPair witness(int cell) const { return wit_[static_cast<std::size_t>(cell)]; }
    /// Marks the cell containing (x, y) with that witness; false if it was
    /// already occupied or lies outside.
    bool mark(double x, double y);
    std::size_t count() const;
    std::size_t cells() const { return occ_.size(); }

private:
    int res_;
    double x_lo_, x_hi_, y_lo_, y_hi_;
    std::vector<std::uint8_t> occ_;
    std::vector<SVPair> wit_;
};

struct ClosureOptions {
    /// Constant-determinant shear [[x, t], [0, y]].
    bool shear = true;
    /// Single diagonal entry moving through zero, diag(s, y) and diag(x, s).
    bool box = true;
};

struct ClosureResult {
    LambdaGrid grid;
    int iterations = 0;
    bool converged = false;
};

/// Iterated rank-one closure of the seed pairs in λ-coordinates: an inner
/// approximation of the rank-one convex hull.
ClosureResult laminate_closure(std::span<const SVPair> seeds, LambdaGrid grid, int max_iter,
                               const ClosureOptions& opt = {});

/// Minors map T(ξ) = (ξ11, ξ12, ξ21, ξ22, det ξ).
using MinorsPoint = std::array<double, 5>;
MinorsPoint minors(const Mat2& xi);

/// R(α) diag(a, ±b) R(β) on an m×m angle grid, for every point of K.
std::vector<Mat2> orbit_samples(const IsoSet& K, int m);

struct MembershipLP {
    bool feasible = false;
    std::vector<double> weights;
    /// max over the five coordinates of |Σ t_i T(ξ_i) − T(ξ)|.
    double residual = 0.0;
    double weight_sum = 0.0;
};

/// Weights t_i >= 0 with Σ t_i = 1 and Σ t_i T(ξ_i) = T(ξ) within tol.
MembershipLP pco_membership(const Mat2& xi, std::span<const Mat2> sample_E, double tol);
bool pco_membership_lp(const Mat2& xi, std::span<const Mat2> sample_E, double tol);

struct CrossCheckReport {
    std::int64_t samples = 0;
    std::int64_t band_excluded = 0;
    /// counts[a][c][l]: analytic, closure, LP verdicts (1 = inside).
    std::int64_t counts[2][2][2] = {};
    std::int64_t closure_violations = 0;
    std::int64_t lp_violations = 0;
    /// Occupied cells whose witness fails the analytic test.
    std::int64_t witness_violations = 0;
    double agreement = 0.0;
    /// Share of analytic-hull cells (by center) reached by the closure.
    double coverage = 0.0;
    int closure_iterations = 0;
    bool closure_converged = false;
    int lp_angles = 0;
    std::size_t lp_samples = 0;

    bool containment_ok() const { return closure_violations == 0 && lp_violations == 0 && witness_violations == 0; }
};

struct CrossCheckOptions {
    int max_iter = 50;
    int lp_angles = 32;
    double lp_tol = 1e-6;
    /// Samples within this many cells of the analytic boundary are excluded
    /// from the agreement figure.
    double band_cells = 2.0;
};

/// Classify n_mat random matrices (λ-pairs uniform in the grid bounds,
/// random orthogonal dressing) by in_hull, the closure grid and the LP.
CrossCheckReport cross_check(const IsoSet& K, const LambdaGrid& grid, std::int64_t n_mat, std::uint64_t seed,
                             const CrossCheckOptions& opt = {});

/// Default λ-window for K: [0.01, 1.1·bmax]².
LambdaGrid default_grid(const IsoSet& K, int resolution);

}  // namespace dinc
