#pragma once

#include <array>
#include <cstdint>

namespace pondscat {

/// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
/// A block of four 32-bit words is a pure function of (counter, key), so a
/// sample's random numbers depend only on (seed, plane, sample index) and are
/// identical for any worker count or generation order.
struct Philox4x32 {
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

/// Up to four unit-interval doubles (53-bit mantissas) for one sample.
/// block_index selects independent draws for the same (seed, plane, k).
struct SampleDraws {
  std::array<double, 2> u;
  std::array<std::uint32_t, 4> words;
};

inline SampleDraws counter_draws(std::uint64_t seed, std::int32_t plane, std::uint64_t k,
                                 std::uint32_t block_index) {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32),
      static_cast<std::uint32_t>(plane), block_index};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                            static_cast<std::uint32_t>(seed >> 32)};
  const auto w = Philox4x32::block(ctr, key);
  const auto to_u01 = [](std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t v = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return static_cast<double>(v >> 11) * 0x1.0p-53;
  };
  return {{to_u01(w[0], w[1]), to_u01(w[2], w[3])}, w};
}

}  // namespace pondscat
