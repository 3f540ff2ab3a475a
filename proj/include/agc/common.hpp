// Shared utilities: error types, seeded RNG helpers, hashing, small numerics.
#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Pins one code path for small accounting functions shared by the rollout
// engine and the replay verifier, so both produce bit-identical arithmetic
// even when the optimizer would otherwise contract differently per call site.
#if defined(__GNUC__) || defined(__clang__)
#define AGC_NOINLINE __attribute__((noinline))
#else
#define AGC_NOINLINE
#endif

namespace agc {

// Bad inputs, violated preconditions, malformed configs.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File and serialization failures; message carries the path.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Training aborts: non-finite losses, divergence guard.
struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double clamp(double x, double lo, double hi) {
    return x < lo ? lo : (x > hi ? hi : x);
}

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// --- seeding ------------------------------------------------------------

// splitmix64; used to derive independent streams from one master seed.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
    return mix_seed(master ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(mix_seed(seed));
}

inline double rand_uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double rand_normal(std::mt19937_64& rng, double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>(mean, sd)(rng);
}

// --- hashing ------------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

inline std::string hash_hex(std::string_view s) { return hex64(fnv1a64(s)); }

// Fixed-precision formatting for reports (money uses 4 decimals).
inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return std::string(buf);
}

}  // namespace agc
