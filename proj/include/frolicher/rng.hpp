#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "frolicher/types.hpp"

namespace frolicher {

/// Deterministic random source. std::normal_distribution is
/// implementation-defined, so the mappings are spelled out here to keep
/// seeded reports byte-identical.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    std::uint64_t next_u64() {
        // xorshift* variant
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545f4914f6cdd1dull;
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    Cplx complex_normal() { return {normal(), normal()}; }

    /// Uniform on the annulus lo <= |h| <= hi.
    Cplx annulus(double lo, double hi) {
        double r = std::sqrt(uniform(lo * lo, hi * hi));
        double phi = 2.0 * std::numbers::pi * uniform();
        return {r * std::cos(phi), r * std::sin(phi)};
    }

    Vec complex_vector(Eigen::Index n) {
        Vec v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = complex_normal();
        return v;
    }

    Mat complex_matrix(Eigen::Index rows, Eigen::Index cols) {
        Mat m(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex_normal();
        return m;
    }

private:
    std::uint64_t state_;
};

}  // namespace frolicher
