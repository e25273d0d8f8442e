#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>

namespace rcfhe {

/// Deterministic ChaCha20 keystream generator keyed from a 64-bit seed.
/// Satisfies UniformRandomBitGenerator. Not thread-safe; own one per context.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Uniform on [lo, hi], unbiased.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    /// Uniform in [0, 1).
    double uniform_real();

private:
    void refill();

    std::array<unsigned char, 32> key_{};
    std::array<std::uint64_t, 64> buffer_{};
    std::size_t pos_ = 64;
    std::uint64_t block_ = 0;
};

}  // namespace rcfhe
