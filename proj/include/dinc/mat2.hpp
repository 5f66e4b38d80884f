#pragma once

#include <array>
#include <cmath>
#include <iosfwd>

#include "dinc/error.hpp"

namespace dinc {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    constexpr bool operator==(const Vec2&) const = default;

    double norm() const { return std::hypot(x, y); }
};

inline constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline constexpr Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }

/// Real 2x2 matrix, row-major. Construction rejects non-finite entries.
class Mat2 {
public:
    constexpr Mat2() = default;
    Mat2(double m11, double m12, double m21, double m22);

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }
    static Mat2 rotation(double angle);
    /// Rank-one matrix a ⊗ n (entries a_i n_j).
    static Mat2 outer(const Vec2& a, const Vec2& n);

    double m11() const { return m_[0]; }
    double m12() const { return m_[1]; }
    double m21() const { return m_[2]; }
    double m22() const { return m_[3]; }
    double operator()(int i, int j) const { return m_[2 * i + j]; }
    const std::array<double, 4>& entries() const { return m_; }

    double det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }
    double norm_sq() const { return m_[0] * m_[0] + m_[1] * m_[1] + m_[2] * m_[2] + m_[3] * m_[3]; }
    /// Frobenius norm.
    double norm() const { return std::sqrt(norm_sq()); }
    Mat2 transpose() const { return {m_[0], m_[2], m_[1], m_[3]}; }
    /// Cofactor matrix; det(A + c ⊗ n) = det A + c · (cof(A) n).
    Mat2 cofactor() const { return {m_[3], -m_[2], -m_[1], m_[0]}; }
    double max_abs() const;

    Mat2 operator+(const Mat2& o) const;
    Mat2 operator-(const Mat2& o) const;
    Mat2 operator*(const Mat2& o) const;
    Mat2 operator*(double s) const;
    Vec2 operator*(const Vec2& v) const { return {m_[0] * v.x + m_[1] * v.y, m_[2] * v.x + m_[3] * v.y}; }
    bool operator==(const Mat2&) const = default;

private:
    std::array<double, 4> m_{0.0, 0.0, 0.0, 0.0};
};

inline Mat2 operator*(double s, const Mat2& m) { return m * s; }
std::ostream& operator<<(std::ostream& os, const Mat2& m);

/// Ordered singular values, 0 <= l1 <= l2.
struct SVPair {
    double l1 = 0.0;
    double l2 = 0.0;
};

/// xi = R * diag(sv.l1, sv.l2) * S with R, S orthogonal.
struct OrthoFactor {
    Mat2 R;
    Mat2 S;
    SVPair sv;
    /// Rotation angles of R and of the rotational part of S, in [0, 2π).
    double angle_R = 0.0;
    double angle_S = 0.0;
    /// True when S carries the reflection diag(-1, 1) (det xi < 0).
    bool reflected = false;
};

SVPair singular_values(const Mat2& xi);
OrthoFactor ortho_factor(const Mat2& xi);
bool is_rank_one_dir(const Mat2& a, const Mat2& b, double tol);

/// Largest singular value; a norm on 2x2 matrices.
inline double spectral_norm(const Mat2& xi) { return singular_values(xi).l2; }

}  // namespace dinc
