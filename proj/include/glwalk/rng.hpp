#pragma once

#include <cmath>
#include <cstdint>

namespace glwalk {

namespace detail {

// SplitMix64 finalizer (Steele/Lea/Flood). Bijective on uint64, used both as
// the output mix of the counter-based generator and as the key-derivation hash.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t GOLDEN = UINT64_C(0x9E3779B97F4A7C15);

} // namespace detail

// Counter-based stream: output(i) = mix(key + i*GOLDEN) xor-folded with a
// second round keyed differently. Streams are split by hashing
// (key, index, tag) into a child key, so any worker can derive its stream
// without coordination and results do not depend on scheduling order.
class RngStream {
public:
    RngStream() = default;
    explicit RngStream(std::uint64_t seed)
        : key_(detail::mix64(seed ^ detail::GOLDEN)) {}

    // Child stream for (index, tag); tag separates pipeline stages so that a
    // path's walk stream and its start-sampling stream never collide.
    RngStream child(std::uint64_t index, std::uint64_t tag = 0) const noexcept {
        RngStream s;
        std::uint64_t k = detail::mix64(key_ ^ detail::mix64(index + detail::GOLDEN));
        s.key_ = detail::mix64(k ^ detail::mix64(tag ^ UINT64_C(0xD1B54A32D192ED03)));
        return s;
    }

    std::uint64_t next_u64() noexcept {
        std::uint64_t c = counter_++;
        return detail::mix64(key_ + c * detail::GOLDEN) ^
               detail::mix64(c ^ (key_ >> 1) ^ UINT64_C(0x94D049BB133111EB));
    }

    // Uniform on [0, 1): 53 significant bits.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; safe as argument of log().
    double next_double_pos() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller (no cached spare: every draw consumes
    // exactly two raw words, keeping stream positions reproducible).
    double next_gaussian() noexcept {
        double u = next_double_pos();
        double v = next_double();
        double r = std::sqrt(-2.0 * std::log(u));
        return r * std::cos(6.283185307179586476925286766559 * v);
    }

    double next_exponential(double rate) noexcept {
        return -std::log(next_double_pos()) / rate;
    }

    // Uniform angle on [0, 2*pi).
    double next_angle() noexcept {
        return 6.283185307179586476925286766559 * next_double();
    }

    std::uint64_t position() const noexcept { return counter_; }
    std::uint64_t key() const noexcept { return key_; }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

// Stage tags for child-stream derivation. Fixed values: they are part of the
// reproducibility contract (a seed + config reproduces every output byte).
namespace stage {
inline constexpr std::uint64_t walk = 1;
inline constexpr std::uint64_t start = 2;
inline constexpr std::uint64_t ensemble_diag = 3;
inline constexpr std::uint64_t depcoef = 4;
inline constexpr std::uint64_t blocking = 5;
inline constexpr std::uint64_t estimator = 6;
inline constexpr std::uint64_t pool = 7;
inline constexpr std::uint64_t oracle = 8;
} // namespace stage

} // namespace glwalk
