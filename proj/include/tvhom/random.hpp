#pragma once

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <numbers>
#include <vector>

#include "tvhom/errors.hpp"

namespace tvhom {

/// splitmix64: tiny, fast, and fully specified, so generated instances are
/// reproducible from (seed, index) alone on any platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double strictly inside (0, 1): bin centers of a 2^53 grid.
    double next_double() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [lo, hi].
    std::uint64_t next_in(std::uint64_t lo, std::uint64_t hi) {
        return lo + next() % (hi - lo + 1);
    }

private:
    std::uint64_t state_;
};

/// Derive a stream seed for one instance index from the corpus seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 rng(seed ^ (0x9e3779b97f4a7c15ULL + index * 0xbf58476d1ce4e5b9ULL));
    return rng.next();
}

namespace detail {

// Standard normal via Box-Muller; one value per pair of uniforms.
inline double sample_normal(SplitMix64& rng) {
    const double u1 = rng.next_double();
    const double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Gamma(shape, 1) via Marsaglia-Tsang squeeze; shapes below one are boosted
// through Gamma(shape + 1) * U^{1/shape}.
inline double sample_gamma(SplitMix64& rng, double shape) {
    if (!(shape > 0.0)) {
        throw Error("gamma shape must be positive");
    }
    if (shape < 1.0) {
        const double g = sample_gamma(rng, shape + 1.0);
        return g * std::pow(rng.next_double(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        const double x = sample_normal(rng);
        const double t = 1.0 + c * x;
        if (t <= 0.0) {
            continue;
        }
        const double v = t * t * t;
        const double u = rng.next_double();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) {
            return d * v;
        }
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
            return d * v;
        }
    }
}

}  // namespace detail

/// Symmetric Dirichlet(concentration) draw of length m: normalized Gamma
/// variates. Larger concentration pushes toward the uniform pmf.
inline std::vector<double> sample_dirichlet(SplitMix64& rng, double concentration,
                                            std::size_t m) {
    std::vector<double> g(m);
    for (std::size_t j = 0; j < m; ++j) {
        g[j] = detail::sample_gamma(rng, concentration);
    }
    double sum = 0.0;
    for (double x : g) {
        sum += x;
    }
    for (double& x : g) {
        x /= sum;
    }
    return g;
}

}  // namespace tvhom
