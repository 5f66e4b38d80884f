#include "dinc/refine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dinc/cut.hpp"

namespace dinc {

namespace {

struct EdgeLine {
    Vec2 nu;  // inward unit normal
    double o;
    double d(Vec2 x) const { return dot(nu, x) - o; }
};

std::vector<EdgeLine> edge_lines(const std::vector<Vec2>& pts, const std::vector<int>& poly) {
    std::vector<EdgeLine> out;
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Vec2 a = pts[static_cast<std::size_t>(poly[i])];
        const Vec2 b = pts[static_cast<std::size_t>(poly[(i + 1) % m])];
        const Vec2 dvec = b - a;
        const double len = dvec.norm();
        if (len == 0.0) continue;
        const Vec2 nu = Vec2{-dvec.y, dvec.x} * (1.0 / len);
        if (!out.empty() && std::abs(cross(out.back().nu, nu)) <= 1e-12 && dot(out.back().nu, nu) > 0) continue;
        out.push_back({nu, dot(nu, a)});
    }
    if (out.size() > 1 && std::abs(cross(out.front().nu, out.back().nu)) <= 1e-12 &&
        dot(out.front().nu, out.back().nu) > 0) {
        out.pop_back();
    }
    return out;
}

struct Layout {
    PlanarProfile prof;
    std::vector<EdgeLine> edges;
    double w = 0.0, period = 0.0, zmin = 0.0, zmax = 0.0;
};

Layout make_layout(const std::vector<Vec2>& pts, const std::vector<int>& poly, const Mat2& A, const LaminateNode& node,
                   const RefineOptions& opt) {
    Layout lay;
    double diam = 0.0;
    for (int i : poly) {
        for (int j : poly) diam = std::max(diam, (pts[static_cast<std::size_t>(i)] - pts[static_cast<std::size_t>(j)]).norm());
    }
    lay.prof = planar_profile(node);
    const PlanarProfile& prof = lay.prof;
    lay.edges = edge_lines(pts, poly);
    const double area = polygon_area(pts, poly);
    double perim = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        perim += (pts[static_cast<std::size_t>(poly[(i + 1) % poly.size()])] - pts[static_cast<std::size_t>(poly[i])]).norm();
    }
    if (!(area > 0.0)) throw PreconditionError("refine: patch must be counter-clockwise with positive area");
    const double tol = 1e-12 * diam;
    for (int v : poly) {
        for (const EdgeLine& e : lay.edges) {
            if (e.d(pts[static_cast<std::size_t>(v)]) < -1e3 * tol) throw PreconditionError("refine: patch is not convex");
        }
    }

    lay.w = opt.bl_frac * area / perim;
    double lam = singular_values(A).l2;
    for (const LaminateNode* f : prof.frontier) lam = std::max(lam, singular_values(f->matrix).l2);
    const double slack = opt.lip_budget - lam;
    if (!(slack > 0.0)) {
        std::ostringstream os;
        os << "refine: laminate reaches lambda2 = " << lam << ", no room below the Lipschitz budget "
           << opt.lip_budget;
        throw NumericalError(os.str());
    }
    lay.period = opt.bl_frac * diam;
    if (prof.radius > 0.0) lay.period = std::min(lay.period, opt.amp_frac * slack * lay.w / prof.radius);
    lay.zmin = 1e300;
    lay.zmax = -1e300;
    for (int v : poly) {
        lay.zmin = std::min(lay.zmin, dot(prof.normal, pts[static_cast<std::size_t>(v)]));
        lay.zmax = std::max(lay.zmax, dot(prof.normal, pts[static_cast<std::size_t>(v)]));
    }
    return lay;
}

}  // namespace

void Refiner::push_tri(int a, int b, int c) {
    const Vec2& pa = out_.points[static_cast<std::size_t>(a)];
    const Vec2& pb = out_.points[static_cast<std::size_t>(b)];
    const Vec2& pc = out_.points[static_cast<std::size_t>(c)];
    if (signed_area(pa, pb, pc) <= area_tol_) return;
    if (out_.tris.size() >= opt_.max_triangles) {
        throw BudgetError("refinement exceeds the triangle budget of " + std::to_string(opt_.max_triangles));
    }
    out_.tris.push_back({a, b, c});
}

void Refiner::emit_fan(const std::vector<int>& poly) {
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) push_tri(poly[0], poly[k], poly[k + 1]);
}

void Refiner::emit_ladder(const std::vector<int>& poly, Vec2 n, double tolz) {
    const std::size_t m = poly.size();
    if (m == 3) {
        emit_fan(poly);
        return;
    }
    std::vector<double> z(m);
    double z0 = 1e300, z1 = -1e300;
    for (std::size_t i = 0; i < m; ++i) {
        z[i] = dot(n, out_.points[static_cast<std::size_t>(poly[i])]);
        z0 = std::min(z0, z[i]);
        z1 = std::max(z1, z[i]);
    }
    // 0 bottom, 1 top, 2 neither.
    std::vector<int> lab(m);
    for (std::size_t i = 0; i < m; ++i) lab[i] = std::abs(z[i] - z0) <= tolz ? 0 : (std::abs(z[i] - z1) <= tolz ? 1 : 2);
    std::size_t s = m;
    for (std::size_t i = 0; i < m; ++i) {
        if (lab[i] == 0 && lab[(i + m - 1) % m] != 0) {
            s = i;
            break;
        }
    }
    std::vector<int> bot, top;
    bool ok = s < m;
    if (ok) {
        std::size_t k = 0;
        while (k < m && lab[(s + k) % m] == 0) bot.push_back(poly[(s + k++) % m]);
        while (k < m && lab[(s + k) % m] == 1) top.push_back(poly[(s + k++) % m]);
        ok = k == m && !top.empty();
    }
    if (!ok) {
        ++stats_.ladder_fallbacks;
        emit_fan(poly);
        return;
    }
    // Zip the two chains; every triangle takes one edge from a chain, so it
    // has an edge along a level line of x·n.
    auto P = [&](int id) { return out_.points[static_cast<std::size_t>(id)]; };
    std::size_t i = bot.size() - 1, j = 0;
    while (i > 0 || j + 1 < top.size()) {
        bool take_bottom;
        if (i == 0) take_bottom = false;
        else if (j + 1 >= top.size()) take_bottom = true;
        else take_bottom = (P(bot[i - 1]) - P(top[j])).norm() <= (P(bot[i]) - P(top[j + 1])).norm();
        if (take_bottom) {
            push_tri(bot[i - 1], bot[i], top[j]);
            --i;
        } else {
            push_tri(bot[i], top[j], top[j + 1]);
            ++j;
        }
    }
}

double Refiner::estimate_triangles(const std::vector<int>& poly, const Mat2& A, const LaminateNode& node) const {
    if (node.is_leaf()) return static_cast<double>(poly.size()) - 2.0;
    const Layout lay = make_layout(out_.points, poly, A, node, opt_);
    // About three triangles per phase strip crossing, band pieces included.
    return 6.0 * static_cast<double>(lay.prof.phase.size()) * (lay.zmax - lay.zmin) / lay.period;
}

void Refiner::refine_patch(const std::vector<int>& poly, const Mat2& A, Vec2 b, const LaminateNode& node) {
    patch(poly, A, b, node, 0, A, b);
}

void Refiner::patch(const std::vector<int>& poly, const Mat2& A, Vec2 b, const LaminateNode& node, int depth,
                    const Mat2& A0, Vec2 b0) {
    ++stats_.patches;
    auto& pts = out_.points;
    double diam = 0.0;
    for (int i : poly) {
        for (int j : poly) diam = std::max(diam, (pts[static_cast<std::size_t>(i)] - pts[static_cast<std::size_t>(j)]).norm());
    }
    if (depth == 0) area_tol_ = 1e-14 * diam * diam;
    if (node.is_leaf() || depth >= opt_.max_depth) {
        emit_fan(poly);
        return;
    }
    if ((node.matrix - A).max_abs() > 1e-9 * (1.0 + A.norm())) {
        throw PreconditionError("refine: laminate root does not match the patch gradient");
    }

    const Layout lay = make_layout(pts, poly, A, node, opt_);
    const PlanarProfile& prof = lay.prof;
    const Vec2 n = prof.normal;
    const std::size_t m = prof.phase.size();
    const std::vector<EdgeLine>& edges = lay.edges;
    const double w = lay.w, period = lay.period, zmin = lay.zmin, zmax = lay.zmax;
    const double tol = 1e-12 * diam;
    stats_.min_period = std::min(stats_.min_period, period);
    stats_.min_band_width = std::min(stats_.min_band_width, w);

    const double est = (zmax - zmin) / period * static_cast<double>(m);
    if (static_cast<double>(out_.tris.size()) + 2.0 * est > static_cast<double>(opt_.max_triangles)) {
        std::ostringstream os;
        os << "refinement exceeds the triangle budget of " << opt_.max_triangles << " (patch needs about "
           << static_cast<long long>(2 * est) << " triangles at period " << period << ")";
        throw BudgetError(os.str());
    }

    // Profile: cumulative fractions F and partial sums S, shifted so the
    // profile oscillates around zero.
    std::vector<double> F(m + 1, 0.0);
    std::vector<Vec2> S(m + 1, {0, 0});
    for (std::size_t i = 0; i < m; ++i) {
        F[i + 1] = F[i] + prof.fraction[i];
        S[i + 1] = S[i] + prof.phase[i] * prof.fraction[i];
    }
    auto phase_at = [&](double z, double& s_out) {
        const double tau = (z - zmin) / period;
        const double s = tau - std::floor(tau);
        std::size_t i = static_cast<std::size_t>(std::upper_bound(F.begin(), F.end() - 1, s) - F.begin());
        i = std::clamp<std::size_t>(i, 1, m) - 1;
        s_out = s;
        return i;
    };
    auto h_of = [&](double z) {
        double s;
        const std::size_t i = phase_at(z, s);
        return (S[i] - prof.center) * period + prof.phase[i] * ((s - F[i]) * period);
    };
    auto psi_of = [&](Vec2 x) {
        double d = 1e300;
        for (const EdgeLine& e : edges) d = std::min(d, e.d(x));
        return std::clamp(d / w, 0.0, 1.0);
    };

    PolygonCutter cutter(pts, tol);
    const std::size_t first_new = pts.size();
    std::vector<std::vector<int>> polys{poly}, next;
    std::vector<int> lo, hi;
    std::int64_t line_id = 0;
    for (const EdgeLine& e : edges) {
        next.clear();
        for (const auto& p : polys) {
            cutter.split(p, {e.nu, e.o + w}, line_id, lo, hi);
            if (!lo.empty()) next.push_back(lo);
            if (!hi.empty()) next.push_back(hi);
        }
        polys.swap(next);
        ++line_id;
    }
    auto is_core = [&](const std::vector<int>& p) {
        for (int v : p) {
            for (const EdgeLine& e : edges) {
                if (e.d(pts[static_cast<std::size_t>(v)]) < w - 1e3 * tol) return false;
            }
        }
        return true;
    };
    // Bisectors where the nearest edge switches; only the band needs them.
    for (std::size_t a = 0; a < edges.size(); ++a) {
        for (std::size_t c = a + 1; c < edges.size(); ++c, ++line_id) {
            const Vec2 nrm = edges[a].nu - edges[c].nu;
            const double len = nrm.norm();
            if (len < 1e-12) continue;
            const CutLine line{nrm * (1.0 / len), (edges[a].o - edges[c].o) / len};
            next.clear();
            for (const auto& p : polys) {
                if (is_core(p)) {
                    next.push_back(p);
                    continue;
                }
                cutter.split(p, line, line_id, lo, hi);
                if (!lo.empty()) next.push_back(lo);
                if (!hi.empty()) next.push_back(hi);
            }
            polys.swap(next);
        }
    }

    // Level lines of x·n: profile kinks plus one through every vertex so far.
    const double tolz = 1e-11 * diam;
    std::vector<double> levels;
    for (double base = zmin; base < zmax; base += period) {
        for (std::size_t i = 0; i < m; ++i) {
            const double z = base + F[i] * period;
            if (z > zmin && z < zmax) levels.push_back(z);
        }
        if (levels.size() > 50'000'000) throw BudgetError("refinement: too many strip lines");
    }
    for (const auto& p : polys) {
        for (int v : p) levels.push_back(dot(n, pts[static_cast<std::size_t>(v)]));
    }
    std::sort(levels.begin(), levels.end());
    std::vector<double> uniq;
    for (double z : levels) {
        if (uniq.empty() || z - uniq.back() > tolz) uniq.push_back(z);
    }
    std::vector<std::vector<int>> cells;
    const std::int64_t id_base = line_id + 1;
    for (const auto& p : polys) cutter.slice(p, n, uniq, id_base, cells);
    stats_.cells += cells.size();

    out_.values.resize(pts.size());
    for (std::size_t k = first_new; k < pts.size(); ++k) {
        const Vec2 x = pts[k];
        out_.values[k] = A * x + b + h_of(dot(n, x)) * psi_of(x);
        stats_.displacement = std::max(stats_.displacement, (out_.values[k] - (A0 * x + b0)).norm());
    }

    for (const auto& cell : cells) {
        Vec2 c{0, 0};
        for (int v : cell) c += pts[static_cast<std::size_t>(v)];
        c = c * (1.0 / static_cast<double>(cell.size()));
        double s;
        const std::size_t i = phase_at(dot(n, c), s);
        const LaminateNode& f = *prof.frontier[i];
        if (!f.is_leaf() && is_core(cell)) {
            // Affine on this cell with gradient A + c_i ⊗ n.
            const Vec2 x0 = pts[static_cast<std::size_t>(cell[0])];
            const Vec2 b1 = out_.values[static_cast<std::size_t>(cell[0])] - f.matrix * x0;
            patch(cell, f.matrix, b1, f, depth + 1, A0, b0);
        } else {
            emit_ladder(cell, n, tolz);
        }
    }
}

PAField refine_cell(const PAField& field, std::size_t tri, const LaminateNode& node, double bl_frac,
                    RefineOptions opt) {
    if (tri >= field.tris.size()) throw PreconditionError("refine_cell: triangle id out of range");
    if (!(bl_frac > 0.0 && bl_frac < 0.5)) throw PreconditionError("refine_cell: bl_frac must lie in (0, 1/2)");
    const Mat2 g = field.gradient(tri);
    if ((g - node.matrix).max_abs() > 1e-9 * (1.0 + g.norm())) {
        throw PreconditionError("refine_cell: triangle gradient does not match the laminate root");
    }
    PAField out;
    out.points = field.points;
    out.values = field.values;
    for (std::size_t t = 0; t < field.tris.size(); ++t) {
        if (t != tri) out.tris.push_back(field.tris[t]);
    }
    opt.bl_frac = bl_frac;
    std::vector<int> poly(field.tris[tri].begin(), field.tris[tri].end());
    if (field.area(tri) < 0) std::reverse(poly.begin(), poly.end());
    const Vec2 x0 = field.points[static_cast<std::size_t>(poly[0])];
    const Vec2 b = field.values[static_cast<std::size_t>(poly[0])] - g * x0;
    Refiner r(out, opt);
    r.refine_patch(poly, g, b, node);
    return out;
}

}  // namespace dinc
