#include "dinc/cut.hpp"

#include <algorithm>

namespace dinc {

double polygon_area(const std::vector<Vec2>& pts, const std::vector<int>& poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& p = pts[static_cast<std::size_t>(poly[i])];
        const Vec2& q = pts[static_cast<std::size_t>(poly[(i + 1) % poly.size()])];
        a += cross(p, q);
    }
    return 0.5 * a;
}

int PolygonCutter::intersect(int a, int b, double sa, double sb, std::int64_t line_id) {
    if (a > b) {
        std::swap(a, b);
        std::swap(sa, sb);
    }
    const Key key{a, b, line_id};
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const Vec2 pa = pts_[static_cast<std::size_t>(a)];
    const Vec2 pb = pts_[static_cast<std::size_t>(b)];
    const double t = sa / (sa - sb);
    pts_.push_back(pa + (pb - pa) * t);
    const int id = static_cast<int>(pts_.size() - 1);
    cache_.emplace(key, id);
    return id;
}

void PolygonCutter::split(const std::vector<int>& poly, const CutLine& line, std::int64_t line_id,
                          std::vector<int>& neg, std::vector<int>& pos) {
    neg.clear();
    pos.clear();
    const std::size_t m = poly.size();
    std::vector<double> s(m);
    bool any_pos = false, any_neg = false;
    for (std::size_t i = 0; i < m; ++i) {
        double v = line.side(pts_[static_cast<std::size_t>(poly[i])]);
        if (std::abs(v) <= tol_) v = 0.0;
        s[i] = v;
        any_pos |= v > 0;
        any_neg |= v < 0;
    }
    if (!any_pos) {
        neg = poly;
        return;
    }
    if (!any_neg) {
        pos = poly;
        return;
    }
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = (i + 1) % m;
        if (s[i] <= 0) neg.push_back(poly[i]);
        if (s[i] >= 0) pos.push_back(poly[i]);
        if ((s[i] < 0 && s[j] > 0) || (s[i] > 0 && s[j] < 0)) {
            const int x = intersect(poly[i], poly[j], s[i], s[j], line_id);
            neg.push_back(x);
            pos.push_back(x);
        }
    }
    if (neg.size() < 3) neg.clear();
    if (pos.size() < 3) pos.clear();
}

void PolygonCutter::slice(const std::vector<int>& poly, Vec2 normal, const std::vector<double>& levels,
                          std::int64_t id_base, std::vector<std::vector<int>>& out) {
    double zmin = 1e300, zmax = -1e300;
    for (int v : poly) {
        const double z = dot(normal, pts_[static_cast<std::size_t>(v)]);
        zmin = std::min(zmin, z);
        zmax = std::max(zmax, z);
    }
    auto k = std::upper_bound(levels.begin(), levels.end(), zmin + tol_) - levels.begin();
    std::vector<int> cur = poly, lo, hi;
    for (; k < static_cast<std::ptrdiff_t>(levels.size()) && levels[static_cast<std::size_t>(k)] < zmax - tol_; ++k) {
        split(cur, {normal, levels[static_cast<std::size_t>(k)]}, id_base + k, lo, hi);
        if (!lo.empty()) out.push_back(lo);
        if (hi.empty()) return;
        cur.swap(hi);
    }
    out.push_back(cur);
}

}  // namespace dinc
