#include "dinc/planar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace dinc {

std::vector<Vec2> planar_phases(const Mat2& A, Vec2 n, KPoint target) {
    const double p = target.a, q = target.b;
    const Vec2 an = A * n;
    const Vec2 center = -an;
    const double r2 = p * p + q * q - A.norm_sq() + dot(an, an);
    std::vector<Vec2> out;
    if (r2 < 0.0) return out;
    const Vec2 w = A.cofactor() * n;
    const double wn = w.norm();
    const double scale = 1.0 + A.norm_sq() + q * q;
    if (wn <= 1e-14 * std::sqrt(scale)) return out;
    const Vec2 wu = w * (1.0 / wn);
    const Vec2 tang{-wu.y, wu.x};
    for (double sign : {1.0, -1.0}) {
        // c · w = ±pq − det A, i.e. the signed offset of the line along wu.
        const double off = (sign * p * q - A.det()) / wn;
        const double d0 = off - dot(center, wu);
        const double h2 = r2 - d0 * d0;
        if (h2 < -1e-14 * scale) continue;
        const double h = std::sqrt(std::max(0.0, h2));
        const Vec2 foot = center + wu * d0;
        for (double s : {1.0, -1.0}) {
            const Vec2 c = foot + tang * (s * h);
            const SVPair sv = singular_values(A + Mat2::outer(c, n));
            if (std::abs(sv.l1 - p) <= 1e-10 * std::sqrt(scale) && std::abs(sv.l2 - q) <= 1e-10 * std::sqrt(scale)) {
                out.push_back(c);
            }
            if (h == 0.0) break;
        }
    }
    return out;
}

namespace {

bool disc_contains(Vec2 c, double r, std::span<const Vec2> pts) {
    for (const Vec2& p : pts) {
        if ((p - c).norm() > r * (1 + 1e-12) + 1e-15) return false;
    }
    return true;
}

}  // namespace

double min_enclosing_radius(std::span<const Vec2> pts, Vec2* center) {
    if (pts.empty()) throw PreconditionError("min_enclosing_radius: no points");
    double best = std::numeric_limits<double>::infinity();
    Vec2 best_c = pts[0];
    if (pts.size() == 1) best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const Vec2 c = (pts[i] + pts[j]) * 0.5;
            const double r = (pts[i] - c).norm();
            if (r < best && disc_contains(c, r, pts)) {
                best = r;
                best_c = c;
            }
            for (std::size_t k = j + 1; k < pts.size(); ++k) {
                const Vec2 a = pts[j] - pts[i], b = pts[k] - pts[i];
                const double d = 2.0 * cross(a, b);
                if (std::abs(d) <= 1e-300) continue;
                const double aa = dot(a, a), bb = dot(b, b);
                const Vec2 cc = pts[i] + Vec2{(b.y * aa - a.y * bb) / d, (a.x * bb - b.x * aa) / d};
                const double r = (pts[i] - cc).norm();
                if (r < best && disc_contains(cc, r, pts)) {
                    best = r;
                    best_c = cc;
                }
            }
        }
    }
    if (center) *center = best_c;
    return best;
}

namespace {

struct Candidate {
    double radius = std::numeric_limits<double>::infinity();
    Vec2 n;
    std::vector<Vec2> c;
    std::vector<double> w;
    std::vector<int> tgt;
};

// Profile radius per unit period for phases visited in the given order.
double profile_radius(const std::vector<Vec2>& c, const std::vector<double>& w) {
    std::vector<Vec2> sums{{0.0, 0.0}};
    Vec2 s{0.0, 0.0};
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        s += c[i] * w[i];
        sums.push_back(s);
    }
    return min_enclosing_radius(sums);
}

void consider(const Mat2& A, Vec2 n, std::span<const KPoint> targets, const PlanarOptions& opt, Candidate& best) {
    std::vector<Vec2> pts;
    std::vector<int> owner;
    for (std::size_t t = 0; t < targets.size(); ++t) {
        for (const Vec2& c : planar_phases(A, n, targets[t])) {
            pts.push_back(c);
            owner.push_back(static_cast<int>(t));
        }
    }
    const std::size_t m = pts.size();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            // Two antiparallel phases.
            const Vec2 a = pts[i], b = pts[j];
            const double na = a.norm(), nb = b.norm();
            if (na > 0 && nb > 0 && std::abs(cross(a, b)) <= 1e-12 * na * nb && dot(a, b) < 0) {
                const double wa = nb / (na + nb);
                if (std::min(wa, 1 - wa) >= opt.min_weight) {
                    std::vector<Vec2> c{a, b};
                    std::vector<double> w{wa, 1 - wa};
                    const double r = profile_radius(c, w);
                    if (r < best.radius) best = {r, n, c, w, {owner[i], owner[j]}};
                }
            }
            for (std::size_t k = j + 1; k < m; ++k) {
                const Vec2 c3 = pts[k];
                const double det = cross(b - a, c3 - a);
                if (std::abs(det) <= 1e-14 * (1 + na * nb)) continue;
                // Barycentric coordinates of the origin.
                const double wb = cross(-a, c3 - a) / det;
                const double wc = cross(b - a, -a) / det;
                const double wa = 1 - wb - wc;
                if (std::min({wa, wb, wc}) < opt.min_weight) continue;
                std::vector<Vec2> c{a, b, c3};
                std::vector<double> w{wa, wb, wc};
                const double r = profile_radius(c, w);
                if (r < best.radius) best = {r, n, c, w, {owner[i], owner[j], owner[k]}};
            }
        }
    }
}

}  // namespace

std::optional<LaminateNode> plan_planar(const Mat2& A, std::span<const KPoint> targets, const PlanarOptions& opt) {
    if (targets.empty()) throw PreconditionError("plan_planar: no targets");
    if (opt.angle_samples < 4) throw PreconditionError("plan_planar: angle_samples must be >= 4");
    Candidate best;
    const double step = std::numbers::pi / opt.angle_samples;
    // n and −n give the same family of phases up to sign, so [0, π) suffices.
    for (int i = 0; i < opt.angle_samples; ++i) {
        const double th = i * step;
        consider(A, {std::cos(th), std::sin(th)}, targets, opt, best);
    }
    if (!std::isfinite(best.radius)) return std::nullopt;
    const double th0 = std::atan2(best.n.y, best.n.x);
    for (int i = -20; i <= 20; ++i) {
        const double th = th0 + i * step / 20.0;
        consider(A, {std::cos(th), std::sin(th)}, targets, opt, best);
    }

    const Vec2 n = best.n;
    auto leaf = [&](std::size_t i) {
        return LaminateNode::leaf(A + Mat2::outer(best.c[i], n), targets[static_cast<std::size_t>(best.tgt[i])]);
    };
    if (best.c.size() == 2) return LaminateNode::split(A, best.w[0], leaf(0), leaf(1));
    const double wjk = best.w[1] + best.w[2];
    const Vec2 mid = (best.c[1] * best.w[1] + best.c[2] * best.w[2]) * (1.0 / wjk);
    LaminateNode rest = LaminateNode::split(A + Mat2::outer(mid, n), best.w[1] / wjk, leaf(1), leaf(2));
    return LaminateNode::split(A, best.w[0], leaf(0), std::move(rest));
}

namespace {

// First s on a grid over (0, s_max] with A + s·d inside the singleton hull of t.
double first_entry(const Mat2& A, const Mat2& d, KPoint t, double s_max, int steps) {
    for (int i = 1; i <= steps; ++i) {
        const double s = s_max * i / steps;
        const SVPair sv = singular_values(A + d * s);
        if (sv.l2 <= t.b * (1 - 1e-9) && sv.l1 * sv.l2 <= t.a * t.b * (1 - 1e-9)) return s;
    }
    return -1.0;
}

}  // namespace

std::optional<LaminateNode> plan_bridge(const Mat2& A, std::span<const KPoint> targets, int angle_samples) {
    if (targets.size() < 2) return std::nullopt;
    double bmax = 0.0;
    for (const KPoint& t : targets) bmax = std::max(bmax, t.b);
    const double s_max = 2.0 * (bmax + A.norm());
    double best_len = std::numeric_limits<double>::infinity();
    Mat2 best_d;
    double best_s1 = 0, best_s2 = 0;
    std::size_t best_i = 0, best_j = 0;
    for (int ia = 0; ia < angle_samples; ++ia) {
        const double al = std::numbers::pi * ia / angle_samples;
        for (int ib = 0; ib < 2 * angle_samples; ++ib) {
            const double be = std::numbers::pi * ib / angle_samples;
            const Mat2 d = Mat2::outer({std::cos(be), std::sin(be)}, {std::cos(al), std::sin(al)});
            for (std::size_t i = 0; i < targets.size(); ++i) {
                const double s1 = first_entry(A, d, targets[i], s_max, 200);
                if (s1 < 0 || s1 >= best_len) continue;
                for (std::size_t j = 0; j < targets.size(); ++j) {
                    if (j == i) continue;
                    const double s2 = first_entry(A, d * -1.0, targets[j], s_max, 200);
                    if (s2 < 0 || s1 + s2 >= best_len) continue;
                    best_len = s1 + s2;
                    best_d = d;
                    best_s1 = s1;
                    best_s2 = s2;
                    best_i = i;
                    best_j = j;
                }
            }
        }
    }
    if (!std::isfinite(best_len)) return std::nullopt;
    const Mat2 b1 = A + best_d * best_s1;
    const Mat2 b2 = A - best_d * best_s2;
    const double t = best_s2 / (best_s1 + best_s2);
    return LaminateNode::split(A, t, split_to_target(b1, targets[best_i].a, targets[best_i].b),
                               split_to_target(b2, targets[best_j].a, targets[best_j].b));
}

namespace {

void collect_frontier(const LaminateNode& node, Vec2 n, double frac, PlanarProfile& prof) {
    if (!node.is_leaf() && std::abs(cross(node.normal, n)) <= 1e-9) {
        collect_frontier(node.plus(), n, frac * node.weight, prof);
        collect_frontier(node.minus(), n, frac * (1 - node.weight), prof);
        return;
    }
    prof.frontier.push_back(&node);
    prof.fraction.push_back(frac);
}

}  // namespace

PlanarProfile planar_profile(const LaminateNode& root) {
    PlanarProfile prof;
    if (root.is_leaf()) throw PreconditionError("planar_profile: leaf has no split direction");
    prof.normal = root.normal;
    collect_frontier(root.plus(), root.normal, root.weight, prof);
    collect_frontier(root.minus(), root.normal, 1 - root.weight, prof);
    std::vector<Vec2> sums{{0.0, 0.0}};
    Vec2 s{0.0, 0.0};
    for (std::size_t i = 0; i < prof.frontier.size(); ++i) {
        const Mat2 diff = prof.frontier[i]->matrix - root.matrix;
        const Vec2 c = diff * prof.normal;
        prof.phase.push_back(c);
        prof.rank_one_residual = std::max(prof.rank_one_residual, (diff - Mat2::outer(c, prof.normal)).max_abs());
        s += c * prof.fraction[i];
        sums.push_back(s);
    }
    // The last partial sum returns to the origin (barycenter identity).
    sums.pop_back();
    prof.radius = min_enclosing_radius(sums, &prof.center);
    return prof;
}

}  // namespace dinc
