#pragma once

#include <cstdint>
#include <vector>

#include "dinc/isoset.hpp"

namespace dinc {

/// Geometric schedule ε(n) = eps1·ρ^(n−1), δ(n) = delta_frac·ε(n).
struct Schedule {
    double eps1 = 0.0;
    double rho = 0.5;
    double delta_frac = 0.125;
    int n_max = 20;

    /// eps1 = a0/4, ρ = 1/2, δ = ε/8.
    static Schedule defaults(const IsoSet& K);

    double eps(int n) const;
    double delta(int n) const { return delta_frac * eps(n); }
    /// Throws PreconditionError unless 0 < eps1 < a0/2, 0 < ρ < 1, 0 < delta_frac < 1/4.
    void validate(const IsoSet& K) const;
};

/// Axis-aligned rectangle in the (λ1, λ2) plane.
struct LambdaRect {
    double x_lo = 0.0, x_hi = 0.0, y_lo = 0.0, y_hi = 0.0;
    bool open = true;

    bool contains(double x, double y) const;
    bool contains_rect(const LambdaRect& inner) const;
    /// Corners, counter-clockwise from (x_lo, y_lo).
    std::vector<std::pair<double, double>> corners() const;
};

/// One level of the in-approximation: an open rectangle per K point (union O_n)
/// and the inset closed rectangle (union K_n).
struct ApproxLevel {
    int n = 1;
    double eps = 0.0;
    double delta = 0.0;
    std::vector<LambdaRect> rects_open;
    std::vector<LambdaRect> rects_closed;
};

ApproxLevel level(const IsoSet& K, const Schedule& sched, int n);

/// Membership of (λ1, λ2) in the open union.
bool in_level(const Mat2& xi, const ApproxLevel& lvl);
/// Index of the lowest-index open rectangle containing (λ1, λ2), or -1.
int containing_rect(SVPair sv, const ApproxLevel& lvl);

/// Lamination target inside level n+1 for a point of level n's rectangle
/// around (a, b): (a − ε' − δ, b − ε'/2 − δ/2) with δ = ε'/2, ε' = ε(n+1).
KPoint nesting_target(const KPoint& ab, const Schedule& sched, int n);

struct NestingWitness {
    int level = 0;
    int rect = 0;
    Mat2 xi;
    SVPair sv;
    KPoint target;
};

struct NestingReport {
    int n = 0;
    std::int64_t samples = 0;
    std::int64_t passed = 0;
    std::int64_t failed = 0;
    /// Worst corner (sup of the open rectangle) also checked per rectangle.
    bool corner_ok = true;
    /// Target lies in the level-(n+1) open rectangle.
    bool target_in_next = true;
    std::vector<NestingWitness> witnesses;

    bool ok() const { return failed == 0 && corner_ok && target_in_next; }
};

/// Sample `samples` matrices per rectangle of level n (random orthogonal
/// dressing) and test each against the singleton hull of its nesting target.
NestingReport check_nesting(const IsoSet& K, const Schedule& sched, int n, std::int64_t samples,
                            std::uint64_t seed = 0);

/// sup over the level's open rectangles of the λ-distance to their own K
/// point, found by corner enumeration. Throws VerificationError when the
/// result exceeds 3√2·ε(n).
double dist_bound(const ApproxLevel& lvl, const IsoSet& K);

/// Smallest N <= n_max with ξ in the hull of the level-N compact set C_N.
/// Requires ξ in the interior of E^rc.
int find_start_index(const Mat2& xi, const IsoSet& K, const Schedule& sched, int n_max);

/// Hull margin of ξ relative to C_n (positive when strictly inside).
double level_hull_margin(SVPair sv, const IsoSet& K, const Schedule& sched, int n);

}  // namespace dinc
