#include "dinc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "dinc/planar.hpp"
#include "dinc/rng.hpp"

namespace dinc {

const char* to_string(Feasibility f) {
    switch (f) {
        case Feasibility::Feasible: return "Feasible";
        case Feasibility::Infeasible: return "Infeasible";
        case Feasibility::BoundaryCase: return "BoundaryCase";
    }
    return "?";
}

Feasibility check_feasibility(const Mat2& xi0, const IsoSet& K) {
    if (in_E(xi0, K, 1e-12)) return Feasibility::Feasible;
    switch (in_hull(xi0, K).cls) {
        case HullClass::Interior: return Feasibility::Feasible;
        case HullClass::Outside: return Feasibility::Infeasible;
        case HullClass::Boundary: return Feasibility::BoundaryCase;
    }
    return Feasibility::Infeasible;
}

DistHistogram dist_histogram(const std::vector<double>& dist, const std::vector<double>& area, double tol) {
    DistHistogram h;
    for (double m : {0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) h.edges.push_back(m * tol);
    h.edges.push_back(std::numeric_limits<double>::infinity());
    h.area_fraction.assign(h.edges.size() - 1, 0.0);
    double total = 0.0;
    for (double a : area) total += a;
    if (total <= 0.0) return h;
    for (std::size_t t = 0; t < dist.size(); ++t) {
        const auto it = std::upper_bound(h.edges.begin(), h.edges.end(), dist[t]);
        const std::size_t bin = std::min<std::size_t>(static_cast<std::size_t>(it - h.edges.begin()), h.edges.size() - 1) - 1;
        h.area_fraction[bin] += area[t] / total;
    }
    return h;
}

namespace {

// Vertices lying strictly inside an edge that only one triangle uses must
// carry that edge's linear trace.
double continuity_defect(const PAField& f, const Domain2& dom) {
    std::unordered_map<std::uint64_t, int> edge_count;
    auto key = [](int a, int b) {
        if (a > b) std::swap(a, b);
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
    };
    edge_count.reserve(f.tris.size() * 2);
    for (const auto& t : f.tris) {
        for (int e = 0; e < 3; ++e) ++edge_count[key(t[static_cast<std::size_t>(e)], t[static_cast<std::size_t>((e + 1) % 3)])];
    }
    std::vector<char> used(f.points.size(), 0);
    for (const auto& t : f.tris) {
        for (int v : t) used[static_cast<std::size_t>(v)] = 1;
    }
    Vec2 lo, hi;
    dom.bbox(lo, hi);
    const double diam = dom.diameter();
    const double cell = std::max(diam / 4096.0, std::sqrt(dom.area() / static_cast<double>(std::max<std::size_t>(1, f.points.size()))));
    const double geo_tol = 1e-11 * diam;
    auto cell_of = [&](Vec2 p) {
        return std::pair<std::int64_t, std::int64_t>{static_cast<std::int64_t>(std::floor((p.x - lo.x) / cell)),
                                                     static_cast<std::int64_t>(std::floor((p.y - lo.y) / cell))};
    };
    auto ckey = [](std::int64_t i, std::int64_t j) {
        return (static_cast<std::uint64_t>(i + (1 << 20)) << 32) ^ static_cast<std::uint64_t>(j + (1 << 20));
    };
    std::unordered_map<std::uint64_t, std::vector<int>> grid;
    for (std::size_t v = 0; v < f.points.size(); ++v) {
        if (!used[v]) continue;
        const auto [i, j] = cell_of(f.points[v]);
        grid[ckey(i, j)].push_back(static_cast<int>(v));
    }
    double worst = 0.0;
    std::vector<int> cand;
    for (const auto& [k, count] : edge_count) {
        if (count != 1) continue;
        const int a = static_cast<int>(k >> 32), b = static_cast<int>(k & 0xffffffffu);
        const Vec2 pa = f.points[static_cast<std::size_t>(a)], pb = f.points[static_cast<std::size_t>(b)];
        if (dom.on_boundary(pa, geo_tol) && dom.on_boundary(pb, geo_tol) && dom.on_boundary((pa + pb) * 0.5, geo_tol)) {
            continue;
        }
        const Vec2 d = pb - pa;
        const double len = d.norm();
        cand.clear();
        const int steps = static_cast<int>(std::ceil(len / (0.5 * cell))) + 1;
        for (int s = 0; s <= steps; ++s) {
            const auto [ci, cj] = cell_of(pa + d * (static_cast<double>(s) / steps));
            for (std::int64_t di = -1; di <= 1; ++di) {
                for (std::int64_t dj = -1; dj <= 1; ++dj) {
                    auto it = grid.find(ckey(ci + di, cj + dj));
                    if (it != grid.end()) cand.insert(cand.end(), it->second.begin(), it->second.end());
                }
            }
        }
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        for (int v : cand) {
            if (v == a || v == b) continue;
            const Vec2 p = f.points[static_cast<std::size_t>(v)];
            const double s = dot(p - pa, d) / (len * len);
            if (s <= 0.0 || s >= 1.0) continue;
            if ((p - (pa + d * s)).norm() > geo_tol) continue;
            const Vec2 lin = f.values[static_cast<std::size_t>(a)] * (1 - s) + f.values[static_cast<std::size_t>(b)] * s;
            worst = std::max(worst, (lin - f.values[static_cast<std::size_t>(v)]).norm());
        }
    }
    return worst;
}

std::vector<KPoint> level_targets(const IsoSet& K, const Schedule& sched, int n) {
    const ApproxLevel lvl = level(K, sched, n);
    std::vector<KPoint> out;
    for (const LambdaRect& r : lvl.rects_closed) {
        // Top corners carry the hull of the rectangle.
        out.push_back({r.x_lo, r.y_hi});
        out.push_back({r.x_hi, r.y_hi});
    }
    return out;
}

LaminateNode plan_tree(const Mat2& A, const std::vector<KPoint>& targets) {
    if (auto t = plan_planar(A, targets)) return *t;
    const SVPair sv = singular_values(A);
    for (const KPoint& k : targets) {
        if (singleton_hull_test_sv(sv, k.a, k.b)) return split_to_target(A, k.a, k.b);
    }
    if (auto t = plan_bridge(A, targets)) return *t;
    std::ostringstream os;
    os << "no laminate found from " << A << " onto the level targets";
    throw NumericalError(os.str());
}

bool in_closed_level(SVPair sv, const ApproxLevel& lvl) {
    const double tol = 1e-9;
    for (const LambdaRect& r : lvl.rects_closed) {
        if (sv.l1 >= r.x_lo - tol && sv.l1 <= r.x_hi + tol && sv.l2 >= r.y_lo - tol && sv.l2 <= r.y_hi + tol) return true;
    }
    return false;
}

struct Patch {
    std::vector<int> poly;
    Mat2 A;
    Vec2 b;
};

}  // namespace

SolveReport verify_field(const PAField& field, const Domain2& dom, const BoundaryData& phi, const IsoSet& K,
                         double tol, double eta) {
    SolveReport r;
    r.tol = tol;
    r.eta = eta;
    r.lipschitz_limit = K.bmax() * (1.0 + tol);
    r.triangles = field.tris.size();
    r.vertices = field.points.size();
    std::vector<double> dist(field.tris.size()), area(field.tris.size());
    double total = 0.0, bad = 0.0, frozen = 0.0;
    for (std::size_t t = 0; t < field.tris.size(); ++t) {
        const Mat2 g = field.gradient(t);
        area[t] = field.area(t);
        if (!(area[t] > 0.0)) ++r.nonpositive_triangles;
        dist[t] = dist_to_E(g, K);
        total += area[t];
        if (!(dist[t] <= tol)) bad += area[t];
        if (dist[t] <= tol / 10) frozen += area[t];
        r.lipschitz_bound = std::max(r.lipschitz_bound, singular_values(g).l2);
    }
    r.bad_area_fraction = total > 0 ? bad / total : 1.0;
    r.frozen_area_fraction = total > 0 ? frozen / total : 0.0;
    r.area_error = std::abs(total - dom.area()) / dom.area();
    r.histogram = dist_histogram(dist, area, tol);
    std::vector<char> used(field.points.size(), 0);
    for (const auto& t : field.tris) {
        for (int v : t) used[static_cast<std::size_t>(v)] = 1;
    }
    const double btol = 1e-11 * dom.diameter();
    for (std::size_t v = 0; v < field.points.size(); ++v) {
        if (!used[v] || !dom.on_boundary(field.points[v], btol)) continue;
        r.boundary_residual = std::max(r.boundary_residual, (field.values[v] - phi(field.points[v])).norm());
    }
    r.continuity_defect = continuity_defect(field, dom);
    r.success = r.bad_area_fraction <= eta;
    r.status = r.success ? "ok" : "tolerance_unmet";
    return r;
}

SolveResult solve(const BoundaryData& phi, const Domain2& dom, const IsoSet& K, const Schedule& sched,
                  const SolveOptions& opt) {
    if (!(opt.tol > 0.0)) throw PreconditionError("solve: tol must be > 0");
    if (!(opt.eta > 0.0 && opt.eta < 1.0)) throw PreconditionError("solve: eta must lie in (0, 1)");
    sched.validate(K);
    const double mesh_h = opt.mesh_h > 0.0 ? opt.mesh_h : dom.diameter() / 16.0;

    std::string feas = "Feasible";
    if (phi.is_affine()) {
        const Feasibility f = check_feasibility(phi.xi0(), K);
        feas = to_string(f);
        if (f == Feasibility::Infeasible) {
            std::ostringstream os;
            os << "boundary gradient " << phi.xi0()
               << " lies outside the polyconvex hull of E; by quasiconvexity of the separating polyconvex "
                  "function no Lipschitz map with these boundary values has gradient in E";
            throw InfeasibleError(os.str());
        }
        if (f == Feasibility::BoundaryCase) {
            std::ostringstream os;
            os << "boundary gradient " << phi.xi0()
               << " lies on the hull boundary but not in E; existence is not established there, refusing";
            throw InfeasibleError(os.str());
        }
    }

    const PAField base = piecewise_affine_reduce(phi, dom, K, mesh_h);
    std::vector<char> frozen(base.tris.size(), 0);
    bool all_frozen = true;
    for (std::size_t t = 0; t < base.tris.size(); ++t) {
        frozen[t] = dist_to_E(base.gradient(t), K) <= opt.tol / 10;
        all_frozen &= frozen[t] != 0;
    }

    SolveResult res;
    auto finish = [&](PAField field, std::vector<StageRecord> stages, const std::string& failure, std::string message) {
        res.field = std::move(field);
        res.report = verify_field(res.field, dom, phi, K, opt.tol, opt.eta);
        res.report.seed = opt.seed;
        res.report.feasibility = feas;
        res.report.stages = std::move(stages);
        res.report.stages_run = static_cast<int>(res.report.stages.size());
        if (!res.report.success && !failure.empty()) res.report.status = failure;
        res.report.message = std::move(message);
        return res;
    };
    if (all_frozen) return finish(base, {}, "", "boundary gradient already in E; u = phi");

    // Patches: convex pieces of Ω for affine data, otherwise every active
    // triangle on its own.
    PolygonSet pieces;
    std::vector<Patch> patches;
    if (phi.is_affine()) {
        pieces = convex_pieces(dom);
        for (const auto& p : pieces.polys) patches.push_back({p, phi.xi0(), phi.offset()});
    } else {
        for (std::size_t t = 0; t < base.tris.size(); ++t) {
            if (frozen[t]) continue;
            std::vector<int> poly(base.tris[t].begin(), base.tris[t].end());
            if (base.area(t) < 0) std::reverse(poly.begin(), poly.end());
            const Mat2 A = base.gradient(t);
            const Vec2 x0 = base.points[static_cast<std::size_t>(poly[0])];
            patches.push_back({poly, A, base.values[static_cast<std::size_t>(poly[0])] - A * x0});
        }
    }
    // The seed only fixes the order in which patches are refined.
    CounterRng rng(opt.seed, 1);
    for (std::size_t i = patches.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next() * static_cast<double>(i));
        std::swap(patches[i - 1], patches[std::min(j, i - 1)]);
    }

    int n_start = 1;
    for (const Patch& p : patches) n_start = std::max(n_start, find_start_index(p.A, K, sched, sched.n_max));
    int n_stop = n_start;
    while (n_stop < sched.n_max && 3.0 * std::sqrt(2.0) * sched.eps(n_stop) > opt.tol) ++n_stop;

    RefineOptions ropt;
    ropt.bl_frac = opt.eta / 2;
    ropt.lip_budget = K.bmax() * (1.0 + opt.tol);
    ropt.amp_frac = opt.amp_frac;
    ropt.max_triangles = opt.max_triangles;
    ropt.max_depth = opt.max_depth;

    std::vector<StageRecord> stages;
    PAField best = base;
    std::vector<LaminateNode> best_trees;
    std::string status, message;
    for (int n = n_start; n <= n_stop; ++n) {
        const std::vector<KPoint> targets = level_targets(K, sched, n);
        PAField out;
        if (phi.is_affine()) {
            out.points = pieces.points;
            for (const Vec2& x : out.points) out.values.push_back(phi(x));
        } else {
            out.points = base.points;
            out.values = base.values;
            for (std::size_t t = 0; t < base.tris.size(); ++t) {
                if (frozen[t]) out.tris.push_back(base.tris[t]);
            }
        }
        Refiner refiner(out, ropt);
        std::vector<LaminateNode> trees;
        try {
            std::vector<LaminateNode> plan;
            double estimate = static_cast<double>(out.tris.size());
            for (const Patch& p : patches) {
                plan.push_back(plan_tree(p.A, targets));
                estimate += refiner.estimate_triangles(p.poly, p.A, plan.back());
            }
            if (estimate > static_cast<double>(opt.max_triangles)) {
                std::ostringstream os;
                os << "refinement needs at least " << static_cast<long long>(estimate)
                   << " triangles, over the budget of " << opt.max_triangles;
                throw BudgetError(os.str());
            }
            for (std::size_t i = 0; i < patches.size(); ++i) {
                refiner.refine_patch(patches[i].poly, patches[i].A, patches[i].b, plan[i]);
            }
            if (!plan.empty()) trees.push_back(std::move(plan.front()));
        } catch (const BudgetError& e) {
            status = "budget_exhausted";
            std::ostringstream os;
            os << "stage " << n << ": " << e.what();
            message = os.str();
            break;
        }
        if (phi.is_affine()) {
            const double btol = 1e-11 * dom.diameter();
            for (std::size_t v = 0; v < out.points.size(); ++v) {
                if (dom.on_boundary(out.points[v], btol)) out.values[v] = phi(out.points[v]);
            }
        }

        const ApproxLevel lvl = level(K, sched, n);
        StageRecord rec;
        rec.n = n;
        rec.eps = lvl.eps;
        rec.dist_bound = dist_bound(lvl, K);
        std::vector<double> dist(out.tris.size()), area(out.tris.size());
        double total = 0.0, bad = 0.0, transition = 0.0;
        for (std::size_t t = 0; t < out.tris.size(); ++t) {
            const Mat2 g = out.gradient(t);
            const SVPair sv = singular_values(g);
            dist[t] = dist_to_E(g, K);
            area[t] = out.area(t);
            total += area[t];
            if (dist[t] > opt.tol) bad += area[t];
            if (in_closed_level(sv, lvl)) rec.max_phase_dist = std::max(rec.max_phase_dist, dist[t]);
            else if (dist[t] > opt.tol / 10) transition += area[t];
            rec.lipschitz_bound = std::max(rec.lipschitz_bound, sv.l2);
        }
        rec.bad_area_fraction = bad / total;
        rec.transition_area_fraction = transition / total;
        rec.triangles = out.tris.size();
        rec.displacement = refiner.stats().displacement;
        rec.min_period = refiner.stats().min_period;
        rec.min_band_width = refiner.stats().min_band_width;
        rec.histogram = dist_histogram(dist, area, opt.tol);
        stages.push_back(rec);
        best = std::move(out);
        best_trees = std::move(trees);
        status.clear();
        if (rec.bad_area_fraction <= opt.eta && rec.max_phase_dist <= opt.tol) break;
    }
    res.trees = std::move(best_trees);
    return finish(std::move(best), std::move(stages), status, message);
}

}  // namespace dinc
