#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// Stateless: every output block is a pure function of (key, counter), so a
// noise variate can be addressed directly by (seed, path, step).

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace qghjm {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      ctr = single_round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter single_round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Standard normal noise addressed by (seed, stream, index).
///
/// Block j of stream s carries the two normals for indices 2j and 2j+1
/// (Box-Muller on two 52-bit uniforms in (0, 1)).
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_lo_(static_cast<std::uint32_t>(stream)),
        stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

  double operator()(std::uint64_t index) {
    const std::uint64_t blk = index >> 1;
    if (blk != cached_block_) {
      fill(blk);
      cached_block_ = blk;
    }
    return cache_[index & 1];
  }

  static double to_unit(std::uint32_t hi, std::uint32_t lo) {
    // 52 bits keep bits + 0.5 exact, so the result never rounds to 0 or 1
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 12;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
  }

 private:
  void fill(std::uint64_t blk) {
    const auto out = Philox4x32::block({static_cast<std::uint32_t>(blk),
                                        static_cast<std::uint32_t>(blk >> 32), stream_lo_,
                                        stream_hi_},
                                       key_);
    const double u1 = to_unit(out[0], out[1]);
    const double u2 = to_unit(out[2], out[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cache_[0] = radius * std::cos(angle);
    cache_[1] = radius * std::sin(angle);
  }

  Philox4x32::Key key_;
  std::uint32_t stream_lo_;
  std::uint32_t stream_hi_;
  std::uint64_t cached_block_ = ~std::uint64_t{0};
  double cache_[2] = {0.0, 0.0};
};

}  // namespace qghjm
