#pragma once

#include <array>
#include <cstdint>

namespace waynav {

/// Philox4x32-10 counter-based block function (Salmon et al., Random123).
/// Output depends only on (counter, key), so any draw can be addressed
/// directly without stepping a sequential state.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// SplitMix64 finaliser; used to derive episode seeds from a base seed.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// One independent substream: key = 64-bit seed, counter words 1..3 name the
/// stream, counter word 0 counts draws. Every draw consumes one Philox block.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint32_t a, std::uint32_t b, std::uint32_t c) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          words_{a, b, c} {}

    std::array<std::uint32_t, 4> next_block() noexcept {
        return philox4x32_10({draw_++, words_[0], words_[1], words_[2]}, key_);
    }

    /// Uniform double in the open interval (0, 1), 52-bit resolution.
    double uniform() noexcept {
        const auto b = next_block();
        return to_unit(b[0], b[1]);
    }

    /// Standard normal via Box-Muller on one block.
    double normal() noexcept;

    std::uint64_t next_u64() noexcept {
        const auto b = next_block();
        return (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
    }

    std::uint32_t draws() const noexcept { return draw_; }

    static double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
        // 52 bits keep the half-step offset exact, so the top value stays below 1.
        const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 12;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 3> words_;
    std::uint32_t draw_ = 0;
};

}  // namespace waynav
