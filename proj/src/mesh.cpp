#include "dinc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "dinc/cut.hpp"

namespace dinc {

namespace {

bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double t = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

}  // namespace

Domain2::Domain2(std::vector<Vec2> vertices) : v_(std::move(vertices)) {
    const std::size_t m = v_.size();
    if (m < 3) throw ConfigError("domain: a polygon needs at least 3 vertices");
    for (const Vec2& p : v_) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ConfigError("domain: non-finite vertex");
    }
    double a = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const Vec2& p = v_[i];
        const Vec2& q = v_[(i + 1) % m];
        if (p == q) throw ConfigError("domain: repeated consecutive vertex " + std::to_string(i));
        a += cross(p, q);
    }
    a *= 0.5;
    if (a < 0) {
        std::reverse(v_.begin(), v_.end());
        a = -a;
    }
    if (!(a > 0)) throw ConfigError("domain: polygon has zero area");
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 2; j < m; ++j) {
            if (i == 0 && j == m - 1) continue;
            if (segments_cross(v_[i], v_[(i + 1) % m], v_[j], v_[(j + 1) % m])) {
                throw ConfigError("domain: polygon edges " + std::to_string(i) + " and " + std::to_string(j) +
                                  " intersect");
            }
        }
    }
    area_ = a;
}

double Domain2::perimeter() const {
    double p = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) p += (v_[(i + 1) % v_.size()] - v_[i]).norm();
    return p;
}

double Domain2::diameter() const {
    double d = 0.0;
    for (const Vec2& p : v_) {
        for (const Vec2& q : v_) d = std::max(d, (p - q).norm());
    }
    return d;
}

bool Domain2::is_convex() const {
    const std::size_t m = v_.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Vec2& a = v_[i];
        const Vec2& b = v_[(i + 1) % m];
        const Vec2& c = v_[(i + 2) % m];
        if (cross(b - a, c - b) < -1e-14 * (b - a).norm() * (c - b).norm()) return false;
    }
    return true;
}

bool Domain2::contains(Vec2 p) const {
    bool in = false;
    const std::size_t m = v_.size();
    for (std::size_t i = 0, j = m - 1; i < m; j = i++) {
        const Vec2& a = v_[i];
        const Vec2& b = v_[j];
        if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
    }
    return in;
}

double Domain2::boundary_distance(Vec2 p) const {
    double d = 1e300;
    for (std::size_t i = 0; i < v_.size(); ++i) d = std::min(d, segment_distance(p, v_[i], v_[(i + 1) % v_.size()]));
    return d;
}

bool Domain2::on_boundary(Vec2 p, double tol) const { return boundary_distance(p) <= tol; }

void Domain2::bbox(Vec2& lo, Vec2& hi) const {
    lo = hi = v_[0];
    for (const Vec2& p : v_) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
}

BoundaryData BoundaryData::affine(const Mat2& xi0, Vec2 offset) {
    BoundaryData b;
    b.affine_ = true;
    b.xi0_ = xi0;
    b.offset_ = offset;
    b.name_ = "affine";
    return b;
}

BoundaryData BoundaryData::piecewise(std::string name, Sampler f, std::vector<Domain2> pieces) {
    if (!f) throw PreconditionError("BoundaryData: empty sampler");
    BoundaryData b;
    b.affine_ = false;
    b.name_ = std::move(name);
    b.f_ = std::move(f);
    b.pieces_ = std::move(pieces);
    return b;
}

BoundaryData BoundaryData::builtin(const std::string& name) {
    if (name == "smooth_shear") {
        return piecewise(name, [](Vec2 p) { return Vec2{p.x + 0.05 * std::sin(p.y), 1.5 * p.y}; });
    }
    if (name == "quadratic_stretch") {
        return piecewise(name, [](Vec2 p) { return Vec2{p.x + 0.5 * p.x * p.x, 1.5 * p.y}; });
    }
    throw ConfigError("boundary: unknown builtin sampler '" + name + "'");
}

Vec2 BoundaryData::operator()(Vec2 x) const {
    if (affine_) return xi0_ * x + offset_;
    return f_(x);
}

Mat2 affine_gradient(Vec2 a, Vec2 b, Vec2 c, Vec2 ua, Vec2 ub, Vec2 uc) {
    const Vec2 e1 = b - a, e2 = c - a;
    const Vec2 d1 = ub - ua, d2 = uc - ua;
    const double det = cross(e1, e2);
    if (det == 0.0) throw NumericalError("affine_gradient: degenerate triangle");
    // G [e1 e2] = [d1 d2]  =>  G = [d1 d2] [e1 e2]^{-1}.
    const double i11 = e2.y / det, i12 = -e2.x / det, i21 = -e1.y / det, i22 = e1.x / det;
    return {d1.x * i11 + d2.x * i21, d1.x * i12 + d2.x * i22, d1.y * i11 + d2.y * i21, d1.y * i12 + d2.y * i22};
}

Mat2 PAField::gradient(std::size_t t) const {
    const auto& [a, b, c] = tris[t];
    const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b), uc = static_cast<std::size_t>(c);
    return affine_gradient(points[ua], points[ub], points[uc], values[ua], values[ub], values[uc]);
}

double PAField::area(std::size_t t) const {
    const auto& [a, b, c] = tris[t];
    return signed_area(points[static_cast<std::size_t>(a)], points[static_cast<std::size_t>(b)],
                       points[static_cast<std::size_t>(c)]);
}

double PAField::total_area() const {
    double s = 0.0;
    for (std::size_t t = 0; t < tris.size(); ++t) s += area(t);
    return s;
}

int PAField::add_point(Vec2 p, Vec2 u) {
    points.push_back(p);
    values.push_back(u);
    return static_cast<int>(points.size() - 1);
}

namespace {

// Mesh of one polygon on the grid anchored at lo with spacings hx, hy.
PAField grid_mesh(const Domain2& dom, Vec2 lo, double hx, double hy, int nx, int ny) {
    PAField f;
    Vec2 dlo, dhi;
    dom.bbox(dlo, dhi);
    const double diam = dom.diameter();
    const double tol = 1e-12 * diam;
    const int i0 = std::max(0, static_cast<int>(std::floor((dlo.x - lo.x) / hx + 1e-9)));
    const int i1 = std::min(nx, static_cast<int>(std::ceil((dhi.x - lo.x) / hx - 1e-9)));
    const int j0 = std::max(0, static_cast<int>(std::floor((dlo.y - lo.y) / hy + 1e-9)));
    const int j1 = std::min(ny, static_cast<int>(std::ceil((dhi.y - lo.y) / hy - 1e-9)));
    const int w = i1 - i0 + 1;
    for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
            const double x = i == nx ? lo.x + hx * nx : lo.x + hx * i;
            const double y = j == ny ? lo.y + hy * ny : lo.y + hy * j;
            f.points.push_back({x, y});
        }
    }
    auto id = [&](int i, int j) { return (j - j0) * w + (i - i0); };
    std::vector<std::vector<int>> polys;
    for (int j = j0; j < j1; ++j) {
        for (int i = i0; i < i1; ++i) {
            polys.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            polys.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    const auto& v = dom.vertices();
    const bool aligned = std::abs(lo.x + hx * i0 - dlo.x) <= tol && std::abs(lo.x + hx * i1 - dhi.x) <= tol &&
                         std::abs(lo.y + hy * j0 - dlo.y) <= tol && std::abs(lo.y + hy * j1 - dhi.y) <= tol;
    const bool box = aligned && v.size() == 4 && dom.is_convex() &&
                     std::abs(dom.area() - (dhi.x - dlo.x) * (dhi.y - dlo.y)) <= 1e-14 * dom.area();
    if (!box) {
        PolygonCutter cutter(f.points, tol);
        std::vector<int> neg, pos;
        for (std::size_t e = 0; e < v.size(); ++e) {
            const Vec2 a = v[e], b = v[(e + 1) % v.size()];
            const Vec2 d = b - a;
            const Vec2 nrm = Vec2{-d.y, d.x} * (1.0 / d.norm());
            const CutLine line{nrm, dot(nrm, a)};
            std::vector<std::vector<int>> next;
            for (const auto& p : polys) {
                cutter.split(p, line, static_cast<std::int64_t>(e), neg, pos);
                if (!neg.empty()) next.push_back(neg);
                if (!pos.empty()) next.push_back(pos);
            }
            polys.swap(next);
        }
        std::vector<std::vector<int>> kept;
        for (const auto& p : polys) {
            Vec2 c{0, 0};
            for (int k : p) c += f.points[static_cast<std::size_t>(k)];
            c = c * (1.0 / static_cast<double>(p.size()));
            if (dom.contains(c) && std::abs(polygon_area(f.points, p)) > tol * tol) kept.push_back(p);
        }
        polys.swap(kept);
    }
    for (const auto& p : polys) {
        for (std::size_t k = 1; k + 1 < p.size(); ++k) {
            const std::array<int, 3> t{p[0], p[k], p[k + 1]};
            if (signed_area(f.points[static_cast<std::size_t>(t[0])], f.points[static_cast<std::size_t>(t[1])],
                            f.points[static_cast<std::size_t>(t[2])]) > tol * tol) {
                f.tris.push_back(t);
            }
        }
    }
    // Drop unused points.
    std::vector<int> remap(f.points.size(), -1);
    PAField out;
    for (auto& t : f.tris) {
        for (int& k : t) {
            if (remap[static_cast<std::size_t>(k)] < 0) {
                remap[static_cast<std::size_t>(k)] = static_cast<int>(out.points.size());
                out.points.push_back(f.points[static_cast<std::size_t>(k)]);
            }
            k = remap[static_cast<std::size_t>(k)];
        }
    }
    out.tris = std::move(f.tris);
    out.values.assign(out.points.size(), {0, 0});
    return out;
}

void grid_params(const Domain2& dom, double h, Vec2& lo, double& hx, double& hy, int& nx, int& ny) {
    if (!(h > 0)) throw ConfigError("mesh_h must be > 0");
    Vec2 hi;
    dom.bbox(lo, hi);
    nx = std::max(1, static_cast<int>(std::ceil((hi.x - lo.x) / h - 1e-9)));
    ny = std::max(1, static_cast<int>(std::ceil((hi.y - lo.y) / h - 1e-9)));
    if (static_cast<double>(nx) * ny > 4e6) throw ConfigError("mesh_h too small for the domain");
    hx = (hi.x - lo.x) / nx;
    hy = (hi.y - lo.y) / ny;
}

}  // namespace

PolygonSet convex_pieces(const Domain2& dom) {
    Vec2 lo, hi;
    dom.bbox(lo, hi);
    const double tol = 1e-12 * dom.diameter();
    PolygonSet out;
    std::vector<Vec2> pts{lo, {hi.x, lo.y}, hi, {lo.x, hi.y}};
    std::vector<std::vector<int>> polys{{0, 1, 2, 3}}, next;
    PolygonCutter cutter(pts, tol);
    std::vector<int> neg, pos;
    const auto& v = dom.vertices();
    for (std::size_t e = 0; e < v.size(); ++e) {
        const Vec2 d = v[(e + 1) % v.size()] - v[e];
        const Vec2 nrm = Vec2{-d.y, d.x} * (1.0 / d.norm());
        next.clear();
        for (const auto& p : polys) {
            cutter.split(p, {nrm, dot(nrm, v[e])}, static_cast<std::int64_t>(e), neg, pos);
            if (!neg.empty()) next.push_back(neg);
            if (!pos.empty()) next.push_back(pos);
        }
        polys.swap(next);
    }
    std::vector<int> remap(pts.size(), -1);
    for (const auto& p : polys) {
        Vec2 c{0, 0};
        for (int k : p) c += pts[static_cast<std::size_t>(k)];
        c = c * (1.0 / static_cast<double>(p.size()));
        if (!dom.contains(c) || polygon_area(pts, p) <= tol * tol) continue;
        std::vector<int> q;
        for (int k : p) {
            int& r = remap[static_cast<std::size_t>(k)];
            if (r < 0) {
                r = static_cast<int>(out.points.size());
                out.points.push_back(pts[static_cast<std::size_t>(k)]);
            }
            q.push_back(r);
        }
        out.polys.push_back(std::move(q));
    }
    return out;
}

PAField structured_mesh(const Domain2& dom, double h) {
    Vec2 lo;
    double hx, hy;
    int nx, ny;
    grid_params(dom, h, lo, hx, hy, nx, ny);
    return grid_mesh(dom, lo, hx, hy, nx, ny);
}

namespace {

PAField mesh_for(const BoundaryData& phi, const Domain2& dom, double h) {
    if (phi.pieces().empty()) return structured_mesh(dom, h);
    Vec2 lo;
    double hx, hy;
    int nx, ny;
    grid_params(dom, h, lo, hx, hy, nx, ny);
    PAField out;
    std::map<std::pair<double, double>, int> seen;
    for (const Domain2& piece : phi.pieces()) {
        const PAField f = grid_mesh(piece, lo, hx, hy, nx, ny);
        std::vector<int> remap(f.points.size());
        for (std::size_t k = 0; k < f.points.size(); ++k) {
            const auto key = std::make_pair(f.points[k].x, f.points[k].y);
            auto it = seen.find(key);
            if (it == seen.end()) it = seen.emplace(key, out.add_point(f.points[k], {0, 0})).first;
            remap[k] = it->second;
        }
        for (const auto& t : f.tris) {
            out.tris.push_back({remap[static_cast<std::size_t>(t[0])], remap[static_cast<std::size_t>(t[1])],
                                remap[static_cast<std::size_t>(t[2])]});
        }
    }
    if (std::abs(out.total_area() - dom.area()) > 1e-9 * dom.area()) {
        throw ConfigError("boundary: pieces do not tile the domain");
    }
    return out;
}

}  // namespace

PAField piecewise_affine_reduce(const BoundaryData& phi, const Domain2& dom, const IsoSet& K, double mesh_h) {
    const ThetaEnvelope env = build_envelope(K);
    double h = mesh_h;
    std::string last;
    for (int attempt = 0; attempt <= 3; ++attempt, h *= 0.5) {
        PAField f = mesh_for(phi, dom, h);
        for (std::size_t k = 0; k < f.points.size(); ++k) f.values[k] = phi(f.points[k]);
        bool ok = true;
        for (std::size_t t = 0; t < f.tris.size() && ok; ++t) {
            const Mat2 g = f.gradient(t);
            if (in_E(g, K, 1e-9)) continue;
            const HullResult hr = in_hull(g, K, env);
            if (hr.cls == HullClass::Interior) continue;
            const auto& tri = f.tris[t];
            Vec2 c = (f.points[static_cast<std::size_t>(tri[0])] + f.points[static_cast<std::size_t>(tri[1])] +
                      f.points[static_cast<std::size_t>(tri[2])]) *
                     (1.0 / 3.0);
            std::ostringstream os;
            os << "triangle " << t << " near (" << c.x << ", " << c.y << ") has gradient " << g << " classified "
               << to_string(hr.cls) << " at mesh_h = " << h;
            last = os.str();
            ok = false;
            // Affine data cannot improve under refinement.
            if (phi.is_affine()) attempt = 3;
        }
        if (ok) return f;
    }
    throw InfeasibleError("piecewise_affine_reduce: gradient outside E ∪ int E^rc after refinement: " + last);
}

}  // namespace dinc
