#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dinc/envelope.hpp"
#include "dinc/mat2.hpp"

namespace dinc {

/// Admissible singular-value pair (a, b) with 0 < a <= b.
struct KPoint {
    double a = 0.0;
    double b = 0.0;
    bool operator==(const KPoint&) const = default;
};

/// The constraint set E = {ξ : (λ1(ξ), λ2(ξ)) ∈ K} for a finite K.
///
/// Points keep their input order (first occurrence wins on duplicates), so
/// "lowest index" tie-breaks downstream are stable.
class IsoSet {
public:
    explicit IsoSet(std::vector<KPoint> points);
    static IsoSet singleton(double a, double b) { return IsoSet({{a, b}}); }

    const std::vector<KPoint>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    const KPoint& operator[](std::size_t i) const { return points_[i]; }
    double a0() const { return a0_; }
    double bmax() const { return bmax_; }
    double max_product() const;

private:
    std::vector<KPoint> points_;
    double a0_ = 0.0;
    double bmax_ = 0.0;
};

/// θ ↦ max over K of f_θ(a, b) on [0, bmax].
using ThetaEnvelope = UpperEnvelope;

enum class HullClass { Interior, Boundary, Outside };

const char* to_string(HullClass c);

struct HullResult {
    HullClass cls = HullClass::Outside;
    /// min over θ of envelope(θ) − f_θ(λ1, λ2); positive inside.
    double margin = 0.0;
    double tol_band = 0.0;
    /// θ at which the margin is attained.
    double theta_star = 0.0;
};

/// f_θ(x, y) = xy + θ(y − x) on 0 < x <= y, θ >= 0.
double f_theta(double x, double y, double theta);

/// The line θ ↦ f_θ(x, y) with no domain check (x = 0 allowed).
inline Line f_theta_line(double x, double y, int tag = -1) { return {y - x, x * y, tag}; }

ThetaEnvelope build_envelope(const IsoSet& K);

bool in_E(const Mat2& xi, const IsoSet& K, double tol);
double dist_to_E(const Mat2& xi, const IsoSet& K);
/// Index of the nearest K point in λ-space (lowest index on ties).
std::size_t nearest_point(const Mat2& xi, const IsoSet& K);

/// Classify ξ against the rank-one convex hull E^rc (= E^pc).
HullResult in_hull(const Mat2& xi, const IsoSet& K);
HullResult in_hull(const Mat2& xi, const IsoSet& K, const ThetaEnvelope& env);
/// Same test directly on a λ-pair (used by the λ-plane oracles).
HullResult in_hull_sv(SVPair sv, const IsoSet& K, const ThetaEnvelope& env);

/// Closed form for a one-point K: λ1λ2 <= pq and λ2 <= q (each with 1e-12 slack).
bool singleton_hull_test(const Mat2& xi, double p, double q);
bool singleton_hull_test_sv(SVPair sv, double p, double q, double slack = 1e-12);

/// K from a JSON document: a list of [a, b] pairs.
IsoSet load_isoset_json(const std::string& text);
IsoSet load_isoset_file(const std::string& path);

}  // namespace dinc
