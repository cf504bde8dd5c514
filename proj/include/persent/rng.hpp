#ifndef PERSENT_RNG_HPP
#define PERSENT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

// Deterministic random helpers. All randomized stages (splitting, sampling,
// dropout, weight init) draw through these so that a (seed, code path) pair
// pins the byte-identical result; std::*_distribution is avoided because its
// output is implementation-defined.

namespace persent::rng {

using Engine = std::mt19937_64;

// splitmix64; used to derive independent per-item seeds from (seed, index).
inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline Engine make_engine(std::uint64_t seed) { return Engine(mix(seed)); }

inline Engine derive(std::uint64_t seed, std::uint64_t stream) {
    return Engine(mix(mix(seed) ^ mix(stream + 0x51AFD6ED558CCD6FULL)));
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform(Engine& eng, double lo, double hi) {
    return lo + (hi - lo) * uniform(eng);
}

// Uniform integer in [0, n). Rejection sampling, no modulo bias.
inline std::uint64_t below(Engine& eng, std::uint64_t n) {
    if (n == 0) return 0;
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = eng();
    } while (x >= limit);
    return x % n;
}

// Standard normal via Box-Muller (one value per call; the pair's second
// half is discarded to keep call sequences position-independent).
inline double normal(Engine& eng) {
    double u1 = uniform(eng);
    double u2 = uniform(eng);
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// Fisher-Yates over [0, n) index vector.
template <typename T>
void shuffle(std::vector<T>& v, Engine& eng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(below(eng, i));
        std::swap(v[i - 1], v[j]);
    }
}

// k distinct indices drawn uniformly from [0, n), in draw order.
inline std::vector<std::size_t> sample_without_replacement(Engine& eng,
                                                           std::size_t n,
                                                           std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k && i < n; ++i) {
        std::size_t j = i + static_cast<std::size_t>(below(eng, n - i));
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
    return out;
}

}  // namespace persent::rng

#endif  // PERSENT_RNG_HPP
