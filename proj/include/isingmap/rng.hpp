#ifndef ISINGMAP_RNG_HPP
#define ISINGMAP_RNG_HPP

#include <cstdint>
#include <limits>
#include <random>

namespace isingmap {

/// SplitMix64 finalizer step.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Deterministic stream seed for item `index` of a task keyed by `master`.
/// Results never depend on which worker picks up the item, only on the index.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ mix64(index));
}

/// Seed-domain tags so pipeline stages sharing one master seed draw from
/// disjoint streams.
namespace seed_domain {
inline constexpr std::uint64_t chains = 0x63686169ull;
inline constexpr std::uint64_t resample = 0x72657361ull;
inline constexpr std::uint64_t diagnostics = 0x64696167ull;
inline constexpr std::uint64_t bootstrap = 0x626f6f74ull;
inline constexpr std::uint64_t conformal_split = 0x636f6e66ull;
inline constexpr std::uint64_t synthetic = 0x73796e74ull;
}  // namespace seed_domain

/// mt19937_64 wrapper with engine-output-only uniforms, so streams are
/// reproducible across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Unbiased via rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t u = engine_();
            if (u >= threshold) return u % n;
        }
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace isingmap

#endif
