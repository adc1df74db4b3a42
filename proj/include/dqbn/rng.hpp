#pragma once

#include <cstdint>
#include <random>

namespace dqbn {

// splitmix64 (Steele, Lea, Flood; public domain reference constants).
// Used to derive independent sub-seeds from a master seed so that
// per-step / per-shot streams stay reproducible no matter how work is
// scheduled across threads.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    return splitmix64(base + 0x9e3779b97f4a7c15ULL * (salt + 1));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(base, a), b);
}

// Seedable portable generator: std::mt19937_64 has a standard-mandated
// output sequence, and uniforms are produced by the explicit 53-bit
// construction below (std::uniform_real_distribution is implementation
// defined and would break cross-platform count reproducibility).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace dqbn
