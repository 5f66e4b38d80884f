#include "dinc/laminate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dinc {

namespace {

// plus − minus = amplitude ⊗ normal, normal taken from the dominant row and
// oriented with a positive leading component.
void rank_one_parts(const Mat2& d, Vec2& amplitude, Vec2& normal) {
    const Vec2 r1{d.m11(), d.m12()};
    const Vec2 r2{d.m21(), d.m22()};
    const Vec2 r = r1.norm() >= r2.norm() ? r1 : r2;
    const double len = r.norm();
    if (len == 0.0) throw PreconditionError("LaminateNode::split: children coincide");
    normal = r * (1.0 / len);
    if (normal.x < 0.0 || (normal.x == 0.0 && normal.y < 0.0)) normal = -normal;
    amplitude = {dot(r1, normal), dot(r2, normal)};
}

constexpr double kOnTarget = 1e-10;

}  // namespace

LaminateNode LaminateNode::leaf(const Mat2& m, KPoint target) {
    LaminateNode n;
    n.matrix = m;
    n.target = target;
    return n;
}

LaminateNode LaminateNode::split(const Mat2& m, double weight, LaminateNode plus, LaminateNode minus) {
    if (!(weight > 0.0 && weight < 1.0)) throw PreconditionError("LaminateNode::split: weight must lie in (0, 1)");
    LaminateNode n;
    n.matrix = m;
    n.weight = weight;
    rank_one_parts(plus.matrix - minus.matrix, n.amplitude, n.normal);
    n.children.reserve(2);
    n.children.push_back(std::move(plus));
    n.children.push_back(std::move(minus));
    return n;
}

int LaminateNode::depth() const {
    if (is_leaf()) return 0;
    return 1 + std::max(plus().depth(), minus().depth());
}

int LaminateNode::leaf_count() const {
    if (is_leaf()) return 1;
    return plus().leaf_count() + minus().leaf_count();
}

bool LaminateNode::is_planar(double tol) const {
    if (is_leaf()) return true;
    for (const LaminateNode& c : children) {
        if (c.is_leaf()) continue;
        if (std::abs(cross(c.normal, normal)) > tol || !c.is_planar(tol)) return false;
    }
    return true;
}

namespace {

// Stage 2: M has singular values (p', q) with p' <= p; split the first
// diagonal entry of its SVD frame to ±p.
LaminateNode split_first_entry(const Mat2& m, double p, double q) {
    const OrthoFactor f = ortho_factor(m);
    const double pp = f.sv.l1;
    if (std::abs(pp - p) <= kOnTarget) return LaminateNode::leaf(m, {p, q});
    if (pp > p + 1e-12) throw NumericalError("split_to_target: stage-1 endpoint has lambda1 > p");
    const double l2 = f.sv.l2;
    const double t2 = (pp + p) / (2.0 * p);
    LaminateNode plus = LaminateNode::leaf(f.R * Mat2::diag(p, l2) * f.S, {p, q});
    LaminateNode minus = LaminateNode::leaf(f.R * Mat2::diag(-p, l2) * f.S, {p, q});
    return LaminateNode::split(m, t2, std::move(plus), std::move(minus));
}

}  // namespace

LaminateNode split_to_target(const Mat2& xi, double p, double q) {
    if (!(p > 0.0) || !(p <= q)) throw PreconditionError("split_to_target: requires 0 < p <= q");
    const OrthoFactor f = ortho_factor(xi);
    const double x = f.sv.l1;
    const double y = f.sv.l2;
    if (!singleton_hull_test_sv(f.sv, p, q)) {
        std::ostringstream os;
        os << "split_to_target: singular values (" << x << ", " << y << ") outside the hull of (" << p << ", " << q
           << ")";
        throw InfeasibleError(os.str());
    }
    if (std::abs(x - p) <= kOnTarget && std::abs(y - q) <= kOnTarget) return LaminateNode::leaf(xi, {p, q});
    if (std::abs(y - q) <= kOnTarget) return split_first_entry(xi, p, q);

    // Stage 1: shear along R e1 ⊗ Sᵀe2 at constant determinant until λ2 = q.
    const double pp = x * y / q;
    const double tstar = std::sqrt(std::max(0.0, pp * pp + q * q - x * x - y * y));
    const Mat2 up = f.R * Mat2(x, tstar, 0.0, y) * f.S;
    const Mat2 down = f.R * Mat2(x, -tstar, 0.0, y) * f.S;
    return LaminateNode::split(xi, 0.5, split_first_entry(up, p, q), split_first_entry(down, p, q));
}

LaminateNode split_to_level(const Mat2& xi, const IsoSet& K, const Schedule& sched, int n) {
    const ApproxLevel lvl = level(K, sched, n);
    const int k = containing_rect(singular_values(xi), lvl);
    if (k < 0) throw PreconditionError("split_to_level: matrix not in level " + std::to_string(n));
    const KPoint target = nesting_target(K[static_cast<std::size_t>(k)], sched, n);
    return split_to_target(xi, target.a, target.b);
}

namespace {

void verify_rec(const LaminateNode& node, double scale, LaminateStats& st, int depth) {
    st.depth = std::max(st.depth, depth);
    st.max_intermediate_l2 = std::max(st.max_intermediate_l2, singular_values(node.matrix).l2);
    if (node.is_leaf()) {
        ++st.leaf_count;
        const SVPair sv = singular_values(node.matrix);
        const double err = std::max(std::abs(sv.l1 - node.target.a), std::abs(sv.l2 - node.target.b));
        st.max_leaf_error = std::max(st.max_leaf_error, err);
        if (err > 1e-9) {
            std::ostringstream os;
            os << "verify_tree: leaf singular values (" << sv.l1 << ", " << sv.l2 << ") miss target ("
               << node.target.a << ", " << node.target.b << ")";
            throw VerificationError(os.str());
        }
        return;
    }
    if (node.children.size() != 2) throw VerificationError("verify_tree: internal node needs two children");
    const double t = node.weight;
    if (!(t > 0.0 && t < 1.0)) throw VerificationError("verify_tree: weight outside (0, 1)");
    const Mat2& a = node.plus().matrix;
    const Mat2& b = node.minus().matrix;
    const double res = (node.matrix - (a * t + b * (1.0 - t))).max_abs();
    st.barycenter_residual = std::max(st.barycenter_residual, res);
    if (res > 1e-12 * scale) {
        std::ostringstream os;
        os << "verify_tree: barycenter residual " << res << " at depth " << depth;
        throw VerificationError(os.str());
    }
    const Mat2 d = a - b;
    const double defect = std::abs(d.det()) / std::max(d.norm_sq(), 1e-300);
    st.max_rank_one_defect = std::max(st.max_rank_one_defect, defect);
    if (defect > 1e-12) {
        std::ostringstream os;
        os << "verify_tree: children differ by a rank-two matrix (relative det " << defect << ")";
        throw VerificationError(os.str());
    }
    verify_rec(node.plus(), scale, st, depth + 1);
    verify_rec(node.minus(), scale, st, depth + 1);
}

}  // namespace

LaminateStats verify_tree(const LaminateNode& node) {
    LaminateStats st;
    verify_rec(node, 1.0 + node.matrix.norm(), st, 0);
    return st;
}

}  // namespace dinc
