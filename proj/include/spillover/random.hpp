#pragma once

// Counter-based random numbers. Every draw is a pure function of
// (key, counter), so replicate streams can be generated in any order or on
// any thread and still agree bit for bit.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace spillover::rng {

/// Philox4x64-10 block function (Salmon et al., Random123).
struct Philox4x64 {
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

  __extension__ using u128 = unsigned __int128;

  static Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const u128 p0 = static_cast<u128>(kMul0) * ctr[0];
      const u128 p1 = static_cast<u128>(kMul1) * ctr[2];
      const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
      const auto lo0 = static_cast<std::uint64_t>(p0);
      const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
      const auto lo1 = static_cast<std::uint64_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

/// 64-bit FNV-1a; used to turn variable names into stream tags.
constexpr std::uint64_t tag_of(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// SplitMix64 finaliser, for deriving child seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Uniform on (0, 1] from the top 53 bits.
inline double unit_open(std::uint64_t bits) {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Box-Muller on two 64-bit words.
inline double box_muller(std::uint64_t a, std::uint64_t b) {
  const double radius = std::sqrt(-2.0 * std::log(unit_open(a)));
  return radius * std::cos(2.0 * std::numbers::pi * unit_open(b));
}

/// Standard normal for a fixed (key, index, tag) address.
inline double normal_at(const Philox4x64::Key& key, std::uint64_t index, std::uint64_t tag) {
  const auto block = Philox4x64::generate({index, tag, 0, 0}, key);
  return box_muller(block[0], block[1]);
}

/// Sequential view over one Philox stream; each block yields four words.
class Stream {
public:
  Stream(std::uint64_t seed, std::uint64_t stream_id) : key_{seed, stream_id} {}

  std::uint64_t next_u64() {
    if (used_ == 4) {
      block_ = Philox4x64::generate({counter_++, 0, 0, 0}, key_);
      used_ = 0;
    }
    return block_[used_++];
  }

  double uniform() { return unit_open(next_u64()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    const auto a = next_u64();
    return box_muller(a, next_u64());
  }

private:
  Philox4x64::Key key_;
  std::uint64_t counter_ = 0;
  Philox4x64::Counter block_{};
  int used_ = 4;
};

} // namespace spillover::rng
