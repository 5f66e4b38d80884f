#include "dinc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dinc/rng.hpp"
#include "dinc/simplex.hpp"

namespace dinc {

LambdaGrid::LambdaGrid(int resolution, double x_lo, double x_hi, double y_lo, double y_hi)
    : res_(resolution), x_lo_(x_lo), x_hi_(x_hi), y_lo_(y_lo), y_hi_(y_hi) {
    if (resolution < 2) throw PreconditionError("LambdaGrid: resolution must be >= 2");
    if (!(std::isfinite(x_lo) && std::isfinite(x_hi) && std::isfinite(y_lo) && std::isfinite(y_hi))) {
        throw PreconditionError("LambdaGrid: bounds must be finite");
    }
    if (!(x_lo > 0.0 && x_lo < x_hi && y_lo > 0.0 && y_lo < y_hi)) {
        throw PreconditionError("LambdaGrid: bounds must satisfy 0 < lo < hi on both axes");
    }
    if (x_lo > y_hi) throw PreconditionError("LambdaGrid: bounds miss the cone x <= y");
    const auto n = static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution);
    occ_.assign(n, 0);
    wit_.assign(n, {0.0, 0.0});
}

int LambdaGrid::cell_of(double x, double y) const {
    if (!(x >= x_lo_ && x <= x_hi_ && y >= y_lo_ && y <= y_hi_)) return -1;
    const int i = std::min(res_ - 1, static_cast<int>((x - x_lo_) / cell_width()));
    const int j = std::min(res_ - 1, static_cast<int>((y - y_lo_) / cell_height()));
    return j * res_ + i;
}

SVPair LambdaGrid::center(int cell) const {
    const int i = cell % res_, j = cell / res_;
    return {x_lo_ + (i + 0.5) * cell_width(), y_lo_ + (j + 0.5) * cell_height()};
}

bool LambdaGrid::occupied_at(double x, double y) const {
    const int c = cell_of(x, y);
    return c >= 0 && occupied(c);
}

bool LambdaGrid::mark(double x, double y) {
    const int c = cell_of(x, y);
    if (c < 0 || occ_[static_cast<std::size_t>(c)]) return false;
    occ_[static_cast<std::size_t>(c)] = 1;
    wit_[static_cast<std::size_t>(c)] = {x, y};
    return true;
}

std::size_t LambdaGrid::count() const { return static_cast<std::size_t>(std::count(occ_.begin(), occ_.end(), 1)); }

ClosureResult laminate_closure(std::span<const SVPair> seeds, LambdaGrid grid, int max_iter, const ClosureOptions& opt) {
    if (max_iter < 1) throw PreconditionError("laminate_closure: max_iter must be >= 1");
    std::vector<int> frontier;
    for (const SVPair& s : seeds) {
        if (grid.cell_of(s.l1, s.l2) < 0 || s.l1 > s.l2) {
            throw PreconditionError("laminate_closure: seed outside the grid bounds");
        }
        if (grid.mark(s.l1, s.l2)) frontier.push_back(grid.cell_of(s.l1, s.l2));
    }
    const double hx = grid.cell_width(), hy = grid.cell_height();
    std::vector<int> next;
    auto mark = [&](double x, double y) {
        if (grid.mark(x, y)) next.push_back(grid.cell_of(x, y));
    };
    // (s, y) for s in (0, u]: one witness per column.
    auto row_to_zero = [&](double u, double y) {
        for (double cx = grid.x_lo() + 0.5 * hx; cx < u; cx += hx) mark(cx, y);
        mark(u, y);
    };
    std::vector<double> ys;
    ClosureResult res{grid, 0, false};
    for (int it = 1; it <= max_iter; ++it) {
        next.clear();
        for (int cell : frontier) {
            const SVPair w = grid.witness(cell);
            const double u = w.l1, v = w.l2;
            if (opt.box) {
                // diag(s, v), s from −u to u.
                row_to_zero(u, v);
                // diag(u, s), s from −v to v: (u, s) above the diagonal, (s, u) below.
                for (double cy = std::max(u, grid.y_lo() + 0.5 * hy); cy < v; cy += hy) mark(u, std::max(u, cy));
                row_to_zero(u, u);
            }
            if (opt.shear) {
                // [[x, ±t], [0, y]] at det x·y = u·v reaches (c/y, y) for √c <= y <= v.
                const double c = u * v, y0 = std::sqrt(c);
                // Split the arc at every grid line it crosses; one witness per piece.
                ys.assign({y0, v});
                for (int k = 0; k <= grid.resolution(); ++k) {
                    const double yl = grid.y_lo() + k * hy;
                    if (yl > y0 && yl < v) ys.push_back(yl);
                    const double xl = grid.x_lo() + k * hx;
                    if (xl > 0.0 && c / xl > y0 && c / xl < v) ys.push_back(c / xl);
                }
                std::sort(ys.begin(), ys.end());
                for (std::size_t k = 0; k + 1 < ys.size(); ++k) {
                    const double y = 0.5 * (ys[k] + ys[k + 1]);
                    mark(std::min(c / y, y), y);
                }
                mark(std::min(c / y0, y0), y0);
                mark(u, v);
            }
        }
        res.iterations = it;
        if (next.empty()) {
            res.converged = true;
            break;
        }
        frontier.swap(next);
    }
    res.grid = std::move(grid);
    return res;
}

MinorsPoint minors(const Mat2& xi) { return {xi.m11(), xi.m12(), xi.m21(), xi.m22(), xi.det()}; }

std::vector<Mat2> orbit_samples(const IsoSet& K, int m) {
    if (m < 1) throw PreconditionError("orbit_samples: m must be >= 1");
    std::vector<Mat2> out;
    for (const KPoint& k : K.points()) {
        for (int i = 0; i < m; ++i) {
            const Mat2 R = Mat2::rotation(2.0 * std::numbers::pi * i / m);
            for (int j = 0; j < m; ++j) {
                const Mat2 S = Mat2::rotation(2.0 * std::numbers::pi * j / m);
                out.push_back(R * Mat2::diag(k.a, k.b) * S);
                out.push_back(R * Mat2::diag(k.a, -k.b) * S);
            }
        }
    }
    return out;
}

MembershipLP pco_membership(const Mat2& xi, std::span<const Mat2> sample_E, double tol) {
    if (sample_E.empty()) throw PreconditionError("pco_membership: empty sample");
    if (!(tol >= 0.0)) throw PreconditionError("pco_membership: tol must be >= 0");
    const std::size_t n = sample_E.size();
    std::vector<std::vector<double>> A(6, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        const MinorsPoint t = minors(sample_E[j]);
        for (std::size_t k = 0; k < 5; ++k) A[k][j] = t[k];
        A[5][j] = 1.0;
    }
    const MinorsPoint target = minors(xi);
    std::vector<double> b(target.begin(), target.end());
    b.push_back(1.0);
    const LPResult lp = simplex_solve(A, b, std::vector<double>(n, 0.0), tol);
    MembershipLP out;
    out.weights = lp.x;
    for (double w : lp.x) out.weight_sum += w;
    for (std::size_t k = 0; k < 5; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += A[k][j] * lp.x[j];
        out.residual = std::max(out.residual, std::abs(s - b[k]));
    }
    out.feasible = lp.status == LPResult::Status::Optimal && out.residual <= tol && std::abs(out.weight_sum - 1.0) <= tol;
    return out;
}

bool pco_membership_lp(const Mat2& xi, std::span<const Mat2> sample_E, double tol) {
    return pco_membership(xi, sample_E, tol).feasible;
}

LambdaGrid default_grid(const IsoSet& K, int resolution) {
    const double hi = 1.1 * K.bmax();
    return LambdaGrid(resolution, 0.01, hi, 0.01, hi);
}

CrossCheckReport cross_check(const IsoSet& K, const LambdaGrid& grid, std::int64_t n_mat, std::uint64_t seed,
                             const CrossCheckOptions& opt) {
    if (n_mat < 1) throw PreconditionError("cross_check: n_mat must be >= 1");
    CrossCheckReport rep;
    const ThetaEnvelope env = build_envelope(K);
    std::vector<SVPair> seeds;
    for (const KPoint& k : K.points()) {
        if (grid.cell_of(k.a, k.b) >= 0) seeds.push_back({k.a, k.b});
    }
    if (seeds.empty()) throw PreconditionError("cross_check: no point of K inside the grid");
    const ClosureResult cl = laminate_closure(seeds, grid, opt.max_iter);
    rep.closure_iterations = cl.iterations;
    rep.closure_converged = cl.converged;

    auto analytic = [&](double x, double y) {
        if (x > y) std::swap(x, y);
        return in_hull_sv({std::max(0.0, x), y}, K, env).cls != HullClass::Outside;
    };
    std::int64_t hull_cells = 0, covered = 0;
    for (int c = 0; c < static_cast<int>(cl.grid.cells()); ++c) {
        if (cl.grid.occupied(c)) {
            const SVPair w = cl.grid.witness(c);
            if (in_hull_sv(w, K, env).cls == HullClass::Outside) ++rep.witness_violations;
        }
        const SVPair ctr = cl.grid.center(c);
        if (ctr.l1 > ctr.l2 || !analytic(ctr.l1, ctr.l2)) continue;
        ++hull_cells;
        if (cl.grid.occupied(c)) ++covered;
    }
    rep.coverage = hull_cells > 0 ? static_cast<double>(covered) / static_cast<double>(hull_cells) : 0.0;

    const std::vector<Mat2> sample = orbit_samples(K, opt.lp_angles);
    rep.lp_angles = opt.lp_angles;
    rep.lp_samples = sample.size();
    const double slack = 100.0 * opt.lp_tol * (1.0 + K.bmax() * K.bmax());
    const double bx = opt.band_cells * grid.cell_width(), by = opt.band_cells * grid.cell_height();

    CounterRng rng(seed, 2);
    std::int64_t agree = 0;
    for (std::int64_t s = 0; s < n_mat; ++s) {
        double x = rng.next(grid.x_lo(), grid.x_hi());
        double y = rng.next(grid.y_lo(), grid.y_hi());
        if (x > y) std::swap(x, y);
        const Mat2 xi = rng.next_orthogonal() * Mat2::diag(x, y) * rng.next_orthogonal();
        const SVPair sv = singular_values(xi);
        const HullResult hr = in_hull(xi, K, env);
        const bool a = hr.cls != HullClass::Outside;
        const bool c = cl.grid.occupied_at(sv.l1, sv.l2);
        const bool l = pco_membership_lp(xi, sample, opt.lp_tol);
        ++rep.counts[a][c][l];
        ++rep.samples;
        bool band = false;
        for (int dx = -1; dx <= 1 && !band; ++dx) {
            for (int dy = -1; dy <= 1 && !band; ++dy) {
                if (dx == 0 && dy == 0) continue;
                band = analytic(sv.l1 + dx * bx, sv.l2 + dy * by) != a;
            }
        }
        if (l && hr.cls == HullClass::Outside && hr.margin < -slack) ++rep.lp_violations;
        if (band) {
            ++rep.band_excluded;
            continue;
        }
        if (c && !a) ++rep.closure_violations;
        if (a == c && c == l) ++agree;
    }
    const std::int64_t kept = rep.samples - rep.band_excluded;
    rep.agreement = kept > 0 ? static_cast<double>(agree) / static_cast<double>(kept) : 1.0;
    return rep;
}

}  // namespace dinc
