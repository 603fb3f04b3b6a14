// Portable counter-based random numbers.
//
// All randomness in the library flows through Philox4x32-10 keyed by a
// 64-bit seed and a 64-bit stream id. The distribution helpers below are
// defined here (not taken from <random>) so that draws are bit-identical
// across standard libraries and languages.

#pragma once

#include <array>
#include <cstdint>

namespace contactnav {

/// Philox4x32-10 block function: encrypts `counter` under `key`.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Sequential generator over a Philox stream. Block i of stream s under seed k
/// is philox4x32({i_lo, i_hi, s_lo, s_hi}, {k_lo, k_hi}); words are consumed
/// in order 0..3.
class Rng {
public:
    using result_type = std::uint32_t;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return 0xffffffffu; }

    result_type operator()() { return next_u32(); }

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [lo, hi] (inclusive), unbiased by rejection.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    /// Standard normal via Box-Muller (both variates are used).
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Independent child stream, derived deterministically from this one's
    /// seed and the given tag.
    [[nodiscard]] Rng fork(std::uint64_t tag) const;

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream() const noexcept { return stream_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// SplitMix64 finalizer, used to derive stream tags from structured ids.
std::uint64_t mix64(std::uint64_t x);

}  // namespace contactnav
