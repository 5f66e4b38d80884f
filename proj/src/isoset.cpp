#include "dinc/isoset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace dinc {

IsoSet::IsoSet(std::vector<KPoint> points) {
    if (points.empty()) throw ConfigError("K: empty point list");
    for (std::size_t i = 0; i < points.size(); ++i) {
        const KPoint& p = points[i];
        if (!std::isfinite(p.a) || !std::isfinite(p.b) || !(p.a > 0.0) || !(p.a <= p.b)) {
            std::ostringstream os;
            os << "K: pair " << i << " = [" << p.a << ", " << p.b << "] violates 0 < a <= b";
            throw ConfigError(os.str());
        }
        if (std::find(points_.begin(), points_.end(), p) == points_.end()) points_.push_back(p);
    }
    a0_ = std::numeric_limits<double>::infinity();
    for (const KPoint& p : points_) {
        a0_ = std::min(a0_, p.a);
        bmax_ = std::max(bmax_, p.b);
    }
}

double IsoSet::max_product() const {
    double m = 0.0;
    for (const KPoint& p : points_) m = std::max(m, p.a * p.b);
    return m;
}

const char* to_string(HullClass c) {
    switch (c) {
        case HullClass::Interior: return "Interior";
        case HullClass::Boundary: return "Boundary";
        case HullClass::Outside: return "Outside";
    }
    return "?";
}

double f_theta(double x, double y, double theta) {
    if (!(x > 0.0) || !(x <= y) || !(theta >= 0.0)) {
        throw PreconditionError("f_theta: requires 0 < x <= y and theta >= 0");
    }
    return x * y + theta * (y - x);
}

ThetaEnvelope build_envelope(const IsoSet& K) {
    std::vector<Line> lines;
    lines.reserve(K.size());
    for (std::size_t i = 0; i < K.size(); ++i) lines.push_back(f_theta_line(K[i].a, K[i].b, static_cast<int>(i)));
    return ThetaEnvelope(lines, 0.0, K.bmax());
}

bool in_E(const Mat2& xi, const IsoSet& K, double tol) {
    if (!(tol >= 0.0)) throw PreconditionError("in_E: tol must be >= 0");
    const SVPair sv = singular_values(xi);
    return std::any_of(K.points().begin(), K.points().end(), [&](const KPoint& p) {
        return std::max(std::abs(sv.l1 - p.a), std::abs(sv.l2 - p.b)) <= tol;
    });
}

double dist_to_E(const Mat2& xi, const IsoSet& K) {
    const SVPair sv = singular_values(xi);
    double best = std::numeric_limits<double>::infinity();
    for (const KPoint& p : K.points()) best = std::min(best, std::hypot(sv.l1 - p.a, sv.l2 - p.b));
    return best;
}

std::size_t nearest_point(const Mat2& xi, const IsoSet& K) {
    const SVPair sv = singular_values(xi);
    std::size_t arg = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < K.size(); ++i) {
        const double d = std::hypot(sv.l1 - K[i].a, sv.l2 - K[i].b);
        if (d < best) {
            best = d;
            arg = i;
        }
    }
    return arg;
}

HullResult in_hull_sv(SVPair sv, const IsoSet& K, const ThetaEnvelope& env) {
    // g(θ) = envelope(θ) − f_θ(λ1, λ2) is convex piecewise linear, so its
    // minimum over [0, bmax] sits at an endpoint or an envelope breakpoint.
    // λ1 = 0 is evaluated by continuity of f_θ.
    const Line self = f_theta_line(sv.l1, sv.l2);
    HullResult r;
    r.tol_band = 1e-9 * (1.0 + K.bmax() * K.bmax());
    r.margin = std::numeric_limits<double>::infinity();
    for (double theta : env.critical_points()) {
        const double g = env.value(theta) - self.at(theta);
        if (g < r.margin) {
            r.margin = g;
            r.theta_star = theta;
        }
    }
    if (r.margin > r.tol_band) r.cls = HullClass::Interior;
    else if (r.margin < -r.tol_band) r.cls = HullClass::Outside;
    else r.cls = HullClass::Boundary;
    return r;
}

HullResult in_hull(const Mat2& xi, const IsoSet& K, const ThetaEnvelope& env) {
    return in_hull_sv(singular_values(xi), K, env);
}

HullResult in_hull(const Mat2& xi, const IsoSet& K) { return in_hull(xi, K, build_envelope(K)); }

bool singleton_hull_test_sv(SVPair sv, double p, double q, double slack) {
    if (!(p > 0.0) || !(p <= q)) throw PreconditionError("singleton_hull_test: requires 0 < p <= q");
    return sv.l1 * sv.l2 <= p * q + slack && sv.l2 <= q + slack;
}

bool singleton_hull_test(const Mat2& xi, double p, double q) {
    return singleton_hull_test_sv(singular_values(xi), p, q);
}

IsoSet load_isoset_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("K: JSON parse error: ") + e.what());
    }
    if (j.is_object() && j.contains("k")) j = j["k"];
    if (!j.is_array()) throw ConfigError("K: expected a list of [a, b] pairs");
    std::vector<KPoint> pts;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& e = j[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            throw ConfigError("K: pair " + std::to_string(i) + " is not a numeric [a, b] pair");
        }
        pts.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return IsoSet(std::move(pts));
}

IsoSet load_isoset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("K: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_isoset_json(ss.str());
}

}  // namespace dinc
