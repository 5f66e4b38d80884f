#pragma once

#include <span>
#include <vector>

namespace dinc {

/// Affine function theta -> intercept + slope * theta, tagged with its source.
struct Line {
    double slope = 0.0;
    double intercept = 0.0;
    int tag = -1;

    double at(double theta) const { return intercept + slope * theta; }
};

/// Exact upper envelope of finitely many lines restricted to [lo, hi].
///
/// The envelope is convex and piecewise linear; segments are stored left to
/// right with nondecreasing slopes. Construction is O(m log m).
class UpperEnvelope {
public:
    UpperEnvelope(std::span<const Line> lines, double lo, double hi);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const std::vector<Line>& segments() const { return segments_; }
    /// Interior breakpoints, strictly increasing, one fewer than segments().
    const std::vector<double>& breakpoints() const { return breaks_; }

    double value(double theta) const;
    /// Index into segments() of the piece active at theta.
    std::size_t segment_at(double theta) const;
    /// lo, the interior breakpoints, then hi. A convex piecewise-linear
    /// function minus an affine one attains its minimum on this set.
    std::vector<double> critical_points() const;

private:
    double lo_;
    double hi_;
    std::vector<Line> segments_;
    std::vector<double> breaks_;
};

}  // namespace dinc
