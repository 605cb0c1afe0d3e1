#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "cosim/util.hpp"

namespace cosim {

/// Deterministic 64-bit PRNG (splitmix64). All sampling in the project goes
/// through this class rather than <random> distributions, so that runs are
/// byte-reproducible across standard-library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Rejection sampling keeps it exactly uniform.
    std::uint64_t uniform_below(std::uint64_t n) {
        if (n == 0) throw ConfigError("uniform_below: n must be positive");
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal via the polar method.
    double normal() {
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        return u * std::sqrt(-2.0 * std::log(s) / s);
    }

    /// Gamma(shape, 1) via Marsaglia-Tsang, with the usual boost for shape < 1.
    double gamma(double shape) {
        if (shape <= 0.0) throw ConfigError("gamma: shape must be positive");
        if (shape < 1.0) {
            const double u = uniform01();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Beta(a, b) on [0,1].
    double beta(double a, double b) {
        const double x = gamma(a);
        const double y = gamma(b);
        return clamp01(x / (x + y));
    }

private:
    std::uint64_t state_;
};

/// Derives independent child streams from a master seed and a list of string
/// labels. Used so that e.g. graph generation and exposure scheduling of one
/// run share nothing, while intervention arms can share the same graph and
/// exposure draws (label sets that omit the arm).
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::string_view> labels) {
    std::uint64_t h = 0x9e3779b97f4a7c15ull ^ master;
    for (const auto& label : labels) {
        h = fnv1a64(label, h);
        // one splitmix round between labels so label boundaries matter
        h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
        h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
        h = h ^ (h >> 31);
    }
    return h;
}

inline Rng derive_rng(std::uint64_t master, std::initializer_list<std::string_view> labels) {
    return Rng(derive_seed(master, labels));
}

}  // namespace cosim
