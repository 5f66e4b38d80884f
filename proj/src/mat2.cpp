#include "dinc/mat2.hpp"

#include <algorithm>
#include <numbers>
#include <ostream>

namespace dinc {

Mat2::Mat2(double m11, double m12, double m21, double m22) : m_{m11, m12, m21, m22} {
    if (!std::isfinite(m11) || !std::isfinite(m12) || !std::isfinite(m21) || !std::isfinite(m22)) {
        throw PreconditionError("Mat2: non-finite entry");
    }
}

Mat2 Mat2::rotation(double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c, -s, s, c};
}

Mat2 Mat2::outer(const Vec2& a, const Vec2& n) { return {a.x * n.x, a.x * n.y, a.y * n.x, a.y * n.y}; }

double Mat2::max_abs() const {
    return std::max({std::abs(m_[0]), std::abs(m_[1]), std::abs(m_[2]), std::abs(m_[3])});
}

Mat2 Mat2::operator+(const Mat2& o) const {
    return {m_[0] + o.m_[0], m_[1] + o.m_[1], m_[2] + o.m_[2], m_[3] + o.m_[3]};
}

Mat2 Mat2::operator-(const Mat2& o) const {
    return {m_[0] - o.m_[0], m_[1] - o.m_[1], m_[2] - o.m_[2], m_[3] - o.m_[3]};
}

Mat2 Mat2::operator*(const Mat2& o) const {
    return {m_[0] * o.m_[0] + m_[1] * o.m_[2], m_[0] * o.m_[1] + m_[1] * o.m_[3],
            m_[2] * o.m_[0] + m_[3] * o.m_[2], m_[2] * o.m_[1] + m_[3] * o.m_[3]};
}

Mat2 Mat2::operator*(double s) const { return {m_[0] * s, m_[1] * s, m_[2] * s, m_[3] * s}; }

std::ostream& operator<<(std::ostream& os, const Mat2& m) {
    return os << "[[" << m.m11() << ", " << m.m12() << "], [" << m.m21() << ", " << m.m22() << "]]";
}

namespace {

// ‖ξ‖² ± 2 det ξ written as sums of squares, so neither radicand can go
// negative through cancellation (conformal and anticonformal matrices).
struct Radicands {
    double plus;   // ‖ξ‖² + 2|det ξ|
    double minus;  // ‖ξ‖² − 2|det ξ|
};

Radicands radicands(const Mat2& xi) {
    const double a = xi.m11(), b = xi.m12(), c = xi.m21(), d = xi.m22();
    const double conf = (a + d) * (a + d) + (c - b) * (c - b);      // ‖ξ‖² + 2 det
    const double anticonf = (a - d) * (a - d) + (b + c) * (b + c);  // ‖ξ‖² − 2 det
    if (xi.det() >= 0.0) return {conf, anticonf};
    return {anticonf, conf};
}

double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a < 0.0) a += two_pi;
    if (a >= two_pi) a = 0.0;
    return a;
}

}  // namespace

SVPair singular_values(const Mat2& xi) {
    // λ2 = ½[√(‖ξ‖²+2|det|) + √(‖ξ‖²−2|det|)]; λ1 from λ1·λ2 = |det|, which is the
    // same closed form without the cancellation in the difference of roots.
    const Radicands r = radicands(xi);
    const double l2 = 0.5 * (std::sqrt(std::max(r.plus, 0.0)) + std::sqrt(std::max(r.minus, 0.0)));
    if (l2 == 0.0) return {0.0, 0.0};
    const double l1 = std::min(std::abs(xi.det()) / l2, l2);
    return {l1, l2};
}

OrthoFactor ortho_factor(const Mat2& xi) {
    OrthoFactor f;
    f.sv = singular_values(xi);

    // Conformal/anticonformal split: ξ = [[E+F, G−H], [G+H, E−F]].
    const double E = 0.5 * (xi.m11() + xi.m22());
    const double F = 0.5 * (xi.m11() - xi.m22());
    const double G = 0.5 * (xi.m21() + xi.m12());
    const double H = 0.5 * (xi.m21() - xi.m12());
    const double Q = std::hypot(E, H);
    const double Rr = std::hypot(F, G);

    if (Q == 0.0 && Rr == 0.0) {
        f.R = Mat2::identity();
        f.S = Mat2::identity();
        return f;
    }

    const Mat2 flip = Mat2::diag(-1.0, 1.0);
    constexpr double tie = 1e-14;
    if (Rr <= tie * Q) {
        // Repeated singular values, det > 0: ξ = Q Rot(a2).
        f.angle_S = wrap_angle(std::atan2(H, E));
        f.R = Mat2::identity();
        f.S = Mat2::rotation(f.angle_S);
        return f;
    }
    if (Q <= tie * Rr) {
        // Repeated singular values, det < 0: ξ = Rr · reflection.
        f.angle_S = wrap_angle(std::numbers::pi - std::atan2(G, F));
        f.R = Mat2::identity();
        f.S = flip * Mat2::rotation(f.angle_S);
        f.reflected = true;
        return f;
    }

    // ξ = Rot(φ) diag(Q+Rr, Q−Rr) Rot(θ); moving the smaller value first costs a
    // quarter turn on each side.
    const double a1 = std::atan2(G, F);
    const double a2 = std::atan2(H, E);
    const double theta = 0.5 * (a2 - a1);
    const double phi = 0.5 * (a2 + a1);
    f.angle_R = wrap_angle(phi + 0.5 * std::numbers::pi);
    f.angle_S = wrap_angle(theta - 0.5 * std::numbers::pi);
    f.R = Mat2::rotation(f.angle_R);
    f.S = Mat2::rotation(f.angle_S);
    if (Q - Rr < 0.0) {
        f.S = flip * f.S;
        f.reflected = true;
    }
    return f;
}

bool is_rank_one_dir(const Mat2& a, const Mat2& b, double tol) {
    if (!(tol > 0.0)) throw PreconditionError("is_rank_one_dir: tol must be positive");
    const Mat2 d = a - b;
    return std::abs(d.det()) <= tol * std::max(1.0, d.norm_sq()) && d.norm() > tol;
}

}  // namespace dinc
