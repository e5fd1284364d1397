#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace smd {

/// Seedable generator with a fixed algorithm (std::mt19937_64, whose output
/// sequence the standard pins) and conversions defined here rather than by
/// the standard library's distributions, so streams replay identically on
/// every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    /// Uniform integer in [lo, hi].
    long uniform_int(long lo, long hi);

private:
    std::mt19937_64 engine_;
};

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// 64-bit FNV-1a.
[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Independent per-job stream seed from the master seed and the job id.
[[nodiscard]] std::uint64_t derive_stream_seed(std::uint64_t master, std::string_view job_id) noexcept;

}  // namespace smd
