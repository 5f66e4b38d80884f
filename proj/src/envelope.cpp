#include "dinc/envelope.hpp"

#include <algorithm>

#include "dinc/error.hpp"

namespace dinc {

namespace {

// Middle line b never strictly dominates on the max-envelope of a, b, c
// (slopes a < b < c).
bool redundant(const Line& a, const Line& b, const Line& c) {
    return (a.intercept - c.intercept) * (b.slope - a.slope) <= (a.intercept - b.intercept) * (c.slope - a.slope);
}

double crossing(const Line& a, const Line& b) { return (a.intercept - b.intercept) / (b.slope - a.slope); }

}  // namespace

UpperEnvelope::UpperEnvelope(std::span<const Line> lines, double lo, double hi) : lo_(lo), hi_(hi) {
    if (lines.empty()) throw PreconditionError("UpperEnvelope: no lines");
    if (!(lo <= hi)) throw PreconditionError("UpperEnvelope: empty interval");

    std::vector<Line> sorted(lines.begin(), lines.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const Line& p, const Line& q) {
        if (p.slope != q.slope) return p.slope < q.slope;
        return p.intercept > q.intercept;
    });
    // For equal slopes keep the highest (first after sorting).
    std::vector<Line> uniq;
    for (const Line& l : sorted) {
        if (!uniq.empty() && uniq.back().slope == l.slope) continue;
        uniq.push_back(l);
    }

    std::vector<Line> hull;
    for (const Line& l : uniq) {
        while (hull.size() >= 2 && redundant(hull[hull.size() - 2], hull.back(), l)) hull.pop_back();
        hull.push_back(l);
    }

    // Restrict to [lo, hi].
    std::size_t first = 0;
    while (first + 1 < hull.size() && crossing(hull[first], hull[first + 1]) <= lo) ++first;
    std::size_t last = hull.size() - 1;
    while (last > first && crossing(hull[last - 1], hull[last]) >= hi) --last;

    segments_.assign(hull.begin() + static_cast<std::ptrdiff_t>(first),
                     hull.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    for (std::size_t i = 0; i + 1 < segments_.size(); ++i) breaks_.push_back(crossing(segments_[i], segments_[i + 1]));
}

std::size_t UpperEnvelope::segment_at(double theta) const {
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), theta);
    return static_cast<std::size_t>(it - breaks_.begin());
}

double UpperEnvelope::value(double theta) const { return segments_[segment_at(theta)].at(theta); }

std::vector<double> UpperEnvelope::critical_points() const {
    std::vector<double> pts;
    pts.reserve(breaks_.size() + 2);
    pts.push_back(lo_);
    pts.insert(pts.end(), breaks_.begin(), breaks_.end());
    pts.push_back(hi_);
    return pts;
}

}  // namespace dinc
