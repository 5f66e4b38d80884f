#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "dinc/mat2.hpp"

namespace dinc {

/// Oriented line {x : normal·x = offset}; side(x) = normal·x − offset.
struct CutLine {
    Vec2 normal;
    double offset = 0.0;
    double side(Vec2 x) const { return dot(normal, x) - offset; }
};

/// Splits convex polygons (vertex-index lists into a shared point array)
/// by lines. Edge intersections are cached per (edge, line), so two
/// polygons sharing an edge receive the same new vertex and the
/// subdivision stays conforming.
class PolygonCutter {
public:
    PolygonCutter(std::vector<Vec2>& points, double tol) : pts_(points), tol_(tol) {}

    /// neg gets the part with side <= 0, pos the part with side >= 0. A part
    /// that would have no area comes back empty.
    void split(const std::vector<int>& poly, const CutLine& line, std::int64_t line_id, std::vector<int>& neg,
               std::vector<int>& pos);

    /// Slice by the parallel lines normal·x = levels[k] (sorted ascending);
    /// appends the slabs, lowest first, to out. Line ids are id_base + k.
    void slice(const std::vector<int>& poly, Vec2 normal, const std::vector<double>& levels, std::int64_t id_base,
               std::vector<std::vector<int>>& out);

    double tol() const { return tol_; }
    std::size_t cache_size() const { return cache_.size(); }

private:
    struct Key {
        int a, b;
        std::int64_t line;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            std::uint64_t h = static_cast<std::uint64_t>(k.a) * 0x9e3779b97f4a7c15ULL;
            h ^= static_cast<std::uint64_t>(k.b) + 0x7f4a7c159e3779b9ULL + (h << 6) + (h >> 2);
            h ^= static_cast<std::uint64_t>(k.line) * 0xbf58476d1ce4e5b9ULL + (h << 6) + (h >> 2);
            return static_cast<std::size_t>(h);
        }
    };

    int intersect(int a, int b, double sa, double sb, std::int64_t line_id);

    std::vector<Vec2>& pts_;
    double tol_;
    std::unordered_map<Key, int, KeyHash> cache_;
};

/// Signed area of a polygon given by indices.
double polygon_area(const std::vector<Vec2>& pts, const std::vector<int>& poly);

}  // namespace dinc
