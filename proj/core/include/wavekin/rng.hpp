#pragma once

#include <array>
#include <cstdint>

namespace wavekin {

/// Philox4x32-10 counter-based generator. A (seed, stream) pair plus a
/// running counter fully determines every draw, so replicas can run in
/// parallel on independent streams and reruns are bit-identical.
class Philox {
  public:
    Philox(std::uint64_t seed, std::uint64_t stream = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          ctr_hi_(stream) {}

    /// Next 64 uniform random bits.
    std::uint64_t next_u64() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        const auto block = round10(ctr_lo_++, ctr_hi_, key_);
        spare_ = (static_cast<std::uint64_t>(block[3]) << 32) | block[2];
        have_ = true;
        return (static_cast<std::uint64_t>(block[1]) << 32) | block[0];
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller (one value per call, spare cached).
    double normal();

  private:
    static std::array<std::uint32_t, 4> round10(std::uint64_t lo, std::uint64_t hi,
                                                std::array<std::uint32_t, 2> key);

    std::array<std::uint32_t, 2> key_;
    std::uint64_t ctr_lo_ = 0;
    std::uint64_t ctr_hi_ = 0;
    std::uint64_t spare_ = 0;
    bool have_ = false;
    double nspare_ = 0.0;
    bool nhave_ = false;
};

} // namespace wavekin
