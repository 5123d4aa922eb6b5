#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace gradstorm {

/// Philox4x32-10 (Salmon et al., SC'11). A bijection of a 128-bit counter
/// under a 64-bit key; any draw is addressable without generating the
/// stream before it.
class Philox4x32 {
  public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter apply(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            ctr = single_round(ctr, key);
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

  private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static Counter single_round(const Counter& c, const Key& k) noexcept {
        const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// Random stream for one Monte Carlo sample: keyed by the run seed, with
/// the sample index in the counter. Successive draws bump a block counter,
/// so streams for different indices never overlap.
class SampleStream {
  public:
    SampleStream(std::uint64_t seed, std::uint64_t index, std::uint32_t substream = 0) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          index_(index),
          substream_(substream) {}

    std::uint32_t next_u32() noexcept {
        if (pos_ == 4) refill();
        return buffer_[pos_++];
    }

    /// Uniform on the open interval (0, 1), 53 bits.
    double uniform() noexcept {
        const std::uint64_t hi = next_u32() >> 5;  // 27 bits
        const std::uint64_t lo = next_u32() >> 6;  // 26 bits
        return (static_cast<double>((hi << 26) | lo) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal by Box-Muller; the second variate is cached.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

  private:
    void refill() noexcept {
        const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(index_),
                                         static_cast<std::uint32_t>(index_ >> 32), block_++,
                                         substream_};
        buffer_ = Philox4x32::apply(ctr, key_);
        pos_ = 0;
    }

    Philox4x32::Key key_;
    std::uint64_t index_;
    std::uint32_t substream_;
    std::uint32_t block_ = 0;
    Philox4x32::Counter buffer_{};
    int pos_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace gradstorm
