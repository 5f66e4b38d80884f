#include "dinc/inapprox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dinc/rng.hpp"

namespace dinc {

Schedule Schedule::defaults(const IsoSet& K) {
    Schedule s;
    s.eps1 = K.a0() / 4.0;
    return s;
}

double Schedule::eps(int n) const {
    if (n < 1) throw PreconditionError("Schedule::eps: level must be >= 1");
    return eps1 * std::pow(rho, n - 1);
}

void Schedule::validate(const IsoSet& K) const {
    std::ostringstream os;
    if (!(eps1 > 0.0 && eps1 < K.a0() / 2.0)) os << "eps1 must lie in (0, a0/2) = (0, " << K.a0() / 2.0 << "); ";
    if (!(rho > 0.0 && rho < 1.0)) os << "rho must lie in (0, 1); ";
    if (!(delta_frac > 0.0 && delta_frac < 0.25)) os << "delta_frac must lie in (0, 1/4); ";
    if (n_max < 1) os << "n_max must be >= 1; ";
    if (!os.str().empty()) throw PreconditionError("Schedule: " + os.str());
}

bool LambdaRect::contains(double x, double y) const {
    if (open) return x > x_lo && x < x_hi && y > y_lo && y < y_hi;
    return x >= x_lo && x <= x_hi && y >= y_lo && y <= y_hi;
}

bool LambdaRect::contains_rect(const LambdaRect& inner) const {
    return inner.x_lo >= x_lo && inner.x_hi <= x_hi && inner.y_lo >= y_lo && inner.y_hi <= y_hi &&
           (!open || (inner.x_lo > x_lo && inner.x_hi < x_hi && inner.y_lo > y_lo && inner.y_hi < y_hi));
}

std::vector<std::pair<double, double>> LambdaRect::corners() const {
    return {{x_lo, y_lo}, {x_hi, y_lo}, {x_hi, y_hi}, {x_lo, y_hi}};
}

ApproxLevel level(const IsoSet& K, const Schedule& sched, int n) {
    sched.validate(K);
    ApproxLevel lvl;
    lvl.n = n;
    lvl.eps = sched.eps(n);
    lvl.delta = sched.delta(n);
    const double e = lvl.eps, d = lvl.delta;
    for (const KPoint& p : K.points()) {
        LambdaRect o{p.a - 2.0 * e, p.a - e, p.b - e, p.b - 0.5 * e, true};
        LambdaRect c{p.a - 2.0 * e + d, p.a - e - d, p.b - e + d, p.b - 0.5 * e - d, false};
        // ε < a0/2 keeps both inside the ordered cone 0 < x <= y.
        if (!(o.x_lo > 0.0 && o.x_hi <= o.y_lo)) throw PreconditionError("level: rectangle leaves the cone 0 < x <= y");
        lvl.rects_open.push_back(o);
        lvl.rects_closed.push_back(c);
    }
    return lvl;
}

int containing_rect(SVPair sv, const ApproxLevel& lvl) {
    for (std::size_t i = 0; i < lvl.rects_open.size(); ++i) {
        if (lvl.rects_open[i].contains(sv.l1, sv.l2)) return static_cast<int>(i);
    }
    return -1;
}

bool in_level(const Mat2& xi, const ApproxLevel& lvl) { return containing_rect(singular_values(xi), lvl) >= 0; }

KPoint nesting_target(const KPoint& ab, const Schedule& sched, int n) {
    const double e = sched.eps(n + 1);
    const double d = 0.5 * e;
    return {ab.a - e - d, ab.b - 0.5 * e - 0.5 * d};
}

NestingReport check_nesting(const IsoSet& K, const Schedule& sched, int n, std::int64_t samples,
                            std::uint64_t seed) {
    if (samples < 1) throw PreconditionError("check_nesting: samples must be >= 1");
    const ApproxLevel cur = level(K, sched, n);
    const ApproxLevel next = level(K, sched, n + 1);
    NestingReport rep;
    rep.n = n;
    constexpr std::size_t max_witnesses = 8;

    for (std::size_t k = 0; k < K.size(); ++k) {
        const LambdaRect& r = cur.rects_open[k];
        const KPoint target = nesting_target(K[k], sched, n);
        if (!next.rects_open[k].contains(target.a, target.b)) rep.target_in_next = false;
        // Supremum corner of the open rectangle, approached from inside.
        if (!singleton_hull_test_sv({r.x_hi, r.y_hi}, target.a, target.b)) rep.corner_ok = false;

        CounterRng rng(seed, (static_cast<std::uint64_t>(n) << 32) ^ k);
        for (std::int64_t s = 0; s < samples; ++s) {
            double x, y;
            do {
                x = rng.next(r.x_lo, r.x_hi);
                y = rng.next(r.y_lo, r.y_hi);
            } while (!r.contains(x, y));
            const Mat2 xi = rng.next_orthogonal() * Mat2::diag(x, y) * rng.next_orthogonal();
            ++rep.samples;
            const SVPair sv = singular_values(xi);
            if (singleton_hull_test_sv(sv, target.a, target.b)) {
                ++rep.passed;
            } else {
                ++rep.failed;
                if (rep.witnesses.size() < max_witnesses) {
                    rep.witnesses.push_back({n, static_cast<int>(k), xi, sv, target});
                }
            }
        }
    }
    return rep;
}

double dist_bound(const ApproxLevel& lvl, const IsoSet& K) {
    double sup = 0.0;
    for (std::size_t k = 0; k < lvl.rects_open.size(); ++k) {
        for (const auto& [x, y] : lvl.rects_open[k].corners()) {
            sup = std::max(sup, std::hypot(x - K[k].a, y - K[k].b));
        }
    }
    const double bound = 3.0 * std::sqrt(2.0) * lvl.eps;
    if (sup > bound) {
        std::ostringstream os;
        os << "dist_bound: sup distance " << sup << " exceeds 3*sqrt(2)*eps = " << bound;
        throw VerificationError(os.str());
    }
    return sup;
}

double level_hull_margin(SVPair sv, const IsoSet& K, const Schedule& sched, int n) {
    const double e = sched.eps(n);
    const double d = sched.delta(n);
    // Over a closed rectangle f_θ peaks at one of two corners sharing the top
    // edge, so the max over K_n is the envelope of those 2|K| lines.
    std::vector<Line> lines;
    double theta_hi = 0.0;
    for (std::size_t k = 0; k < K.size(); ++k) {
        const double y_top = K[k].b - 0.5 * e - d;
        lines.push_back(f_theta_line(K[k].a - 2.0 * e + d, y_top, static_cast<int>(2 * k)));
        lines.push_back(f_theta_line(K[k].a - e - d, y_top, static_cast<int>(2 * k + 1)));
        theta_hi = std::max(theta_hi, y_top);
    }
    const UpperEnvelope env(lines, 0.0, theta_hi);
    const Line self = f_theta_line(sv.l1, sv.l2);
    double margin = std::numeric_limits<double>::infinity();
    for (double theta : env.critical_points()) margin = std::min(margin, env.value(theta) - self.at(theta));
    return margin;
}

int find_start_index(const Mat2& xi, const IsoSet& K, const Schedule& sched, int n_max) {
    sched.validate(K);
    const HullResult h = in_hull(xi, K);
    if (h.cls != HullClass::Interior) {
        throw PreconditionError(std::string("find_start_index: matrix is ") + to_string(h.cls) +
                                ", interior of the hull required");
    }
    const SVPair sv = singular_values(xi);
    const double strict = 1e-12 * (1.0 + K.bmax() * K.bmax());
    for (int n = 1; n <= n_max; ++n) {
        if (level_hull_margin(sv, K, sched, n) > strict) return n;
    }
    throw NumericalError("find_start_index: not interior enough for levels 1.." + std::to_string(n_max) +
                         "; increase n_max");
}

}  // namespace dinc
