#pragma once

#include <cstdint>
#include <random>

namespace qksvm {

/// SplitMix64 finalizer (Steele, Lea & Flood). Used for seed derivation so
/// that structurally related seeds (master, i, j) decorrelate.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic seed mixing: stream index `a` then `b` folded into `master`
/// through SplitMix64. Same inputs always give the same derived seed, and
/// (a, b) pairs collide only accidentally.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t z = splitmix64(master);
    z = splitmix64(z ^ splitmix64(a + 0x632BE59BD9B4E019ULL));
    z = splitmix64(z ^ splitmix64(b + 0x9E6C63D0876A90BDULL));
    return z;
}

/// Seeded random source. Bits come from MT19937-64, whose output sequence is
/// fixed by the C++ standard, so draws are reproducible across platforms.
/// Floating-point and index mappings are done explicitly here rather than via
/// std::uniform_*_distribution (whose sequences are implementation-defined).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1): top 53 bits of one 64-bit draw.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform index in [0, k). k must be >= 1.
    std::uint64_t uniform_index(std::uint64_t k) {
        auto idx = static_cast<std::uint64_t>(uniform() * static_cast<double>(k));
        return idx < k ? idx : k - 1;
    }

    std::uint64_t bits() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

} // namespace qksvm
