#pragma once

#include <cstdint>
#include <numbers>

#include "dinc/mat2.hpp"

namespace dinc {

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so parallel or reordered consumers stay
/// reproducible.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t bits(std::uint64_t counter) const {
        return mix(mix(seed_ ^ mix(stream_)) ^ (counter * 0xd1b54a32d192ed03ULL));
    }

    /// Uniform in [0, 1).
    double uniform(std::uint64_t counter) const { return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53; }
    double uniform(std::uint64_t counter, double lo, double hi) const { return lo + (hi - lo) * uniform(counter); }

    /// Stateful convenience on top of the counter.
    double next() { return uniform(counter_++); }
    double next(double lo, double hi) { return uniform(counter_++, lo, hi); }
    /// Random element of O(2): rotation or reflection with equal probability.
    Mat2 next_orthogonal() {
        const double angle = next(0.0, 2.0 * std::numbers::pi);
        const Mat2 r = Mat2::rotation(angle);
        return next() < 0.5 ? r : r * Mat2::diag(-1.0, 1.0);
    }
    Mat2 next_matrix(double lo, double hi) { return {next(lo, hi), next(lo, hi), next(lo, hi), next(lo, hi)}; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace dinc
