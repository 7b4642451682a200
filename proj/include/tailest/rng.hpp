#pragma once

#include <cstdint>

namespace tailest {

// Counter-based deterministic generator built on the splitmix64 finaliser.
// Every draw is a pure hash of (key, counter), so a stream can be split into
// independent substreams (one per replication, per theta draw, ...) and each
// substream replays identically regardless of evaluation order or thread
// count.  That property is what makes the simulation results byte-identical
// for any worker count.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) noexcept : key_(mix(seed ^ kKeyTag)) {}

    // Derive an independent stream.  The mixing is one-way, so substream(0),
    // substream(1), ... do not overlap with the parent stream or each other.
    CounterRng substream(std::uint64_t index) const noexcept {
        CounterRng r(*this);
        r.key_ = mix(key_ ^ mix(index + kStreamTag));
        r.counter_ = 0;
        return r;
    }

    std::uint64_t next_u64() noexcept { return mix(key_ + kGamma * ++counter_); }

    // Uniform on the open interval (0,1): never exactly 0 or 1, so logs and
    // inverse CDFs stay finite.  52-bit resolution.
    double next_u01() noexcept {
        return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t kKeyTag = 0xA3C59AC2B7EA61D1ull;
    static constexpr std::uint64_t kStreamTag = 0x5851F42D4C957F2Dull;

    static std::uint64_t mix(std::uint64_t z) noexcept {
        z += kGamma;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace tailest
