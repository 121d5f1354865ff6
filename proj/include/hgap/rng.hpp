#pragma once

// Counter-based random streams for reproducible parallel Monte Carlo.
//
// Every path owns a Philox4x32-10 stream keyed by the master seed, with the
// path index in the high half of the counter. A path's draws therefore depend
// only on (seed, path index), never on which worker simulates it or in which
// order.

#include <array>
#include <cmath>
#include <cstdint>

namespace hgap {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      ctr = round_once(ctr, key);
    }
    return ctr;
  }

  /// kLanes independent blocks at once, stored lane-major (c0[lane], c1[lane], ...).
  /// Same output as kLanes calls to generate.
  template <std::size_t kLanes>
  static void generate_many(std::array<std::array<std::uint32_t, kLanes>, 4>& c, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      for (std::size_t lane = 0; lane < kLanes; ++lane) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0][lane];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2][lane];
        const auto n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c[1][lane] ^ key[0];
        const auto n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c[3][lane] ^ key[1];
        c[1][lane] = static_cast<std::uint32_t>(p1);
        c[3][lane] = static_cast<std::uint32_t>(p0);
        c[0][lane] = n0;
        c[2][lane] = n2;
      }
    }
  }

 private:
  static Counter round_once(const Counter& ctr, const Key& key) noexcept {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
  }

  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

/// Independent stream for one path: counter = (block, path_index).
class PathStream {
 public:
  PathStream(std::uint64_t seed, std::uint64_t path_index) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        path_lo_(static_cast<std::uint32_t>(path_index)),
        path_hi_(static_cast<std::uint32_t>(path_index >> 32)) {}

  std::uint64_t next_u64() noexcept {
    if (cursor_ == kBuffered) refill();
    return buffer_[cursor_++];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_pos() noexcept { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  double normal() noexcept;

 private:
  static constexpr std::size_t kBlocks = 8;
  static constexpr int kBuffered = 2 * kBlocks;

  void refill() noexcept {
    std::array<std::array<std::uint32_t, kBlocks>, 4> c;
    for (std::size_t b = 0; b < kBlocks; ++b) {
      const std::uint64_t block = block_ + b;
      c[0][b] = static_cast<std::uint32_t>(block);
      c[1][b] = static_cast<std::uint32_t>(block >> 32);
      c[2][b] = path_lo_;
      c[3][b] = path_hi_;
    }
    Philox4x32::generate_many(c, key_);
    block_ += kBlocks;
    for (std::size_t b = 0; b < kBlocks; ++b) {
      buffer_[2 * b] = (static_cast<std::uint64_t>(c[1][b]) << 32) | c[0][b];
      buffer_[2 * b + 1] = (static_cast<std::uint64_t>(c[3][b]) << 32) | c[2][b];
    }
    cursor_ = 0;
  }

  Philox4x32::Key key_;
  std::uint32_t path_lo_;
  std::uint32_t path_hi_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, kBuffered> buffer_{};
  int cursor_ = kBuffered;
};

namespace detail {

// 256-layer ziggurat for the standard normal density exp(-x^2/2).
struct ZigguratTables {
  static constexpr int kLayers = 256;
  static constexpr double kR = 3.6541528853610088;
  static constexpr double kArea = 0.00492867323399;

  std::array<double, kLayers + 1> x{};
  std::array<double, kLayers + 1> f{};

  ZigguratTables() noexcept {
    x[0] = kArea / std::exp(-0.5 * kR * kR);
    x[1] = kR;
    for (int i = 1; i < kLayers - 1; ++i) {
      x[i + 1] = std::sqrt(-2.0 * std::log(kArea / x[i] + std::exp(-0.5 * x[i] * x[i])));
    }
    x[kLayers] = 0.0;
    for (int i = 0; i <= kLayers; ++i) f[i] = std::exp(-0.5 * x[i] * x[i]);
  }
};

inline const ZigguratTables kZiggurat;

inline const ZigguratTables& ziggurat_tables() noexcept { return kZiggurat; }

}  // namespace detail

inline double PathStream::normal() noexcept {
  const auto& t = detail::ziggurat_tables();
  for (;;) {
    const std::uint64_t bits = next_u64();
    const int layer = static_cast<int>(bits & 0xff);
    const bool negative = (bits >> 8) & 1;
    const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
    const double z = u * t.x[layer];
    if (z < t.x[layer + 1]) return negative ? -z : z;
    if (layer == 0) {
      double a;
      double b;
      do {
        a = -std::log(uniform_pos()) / detail::ZigguratTables::kR;
        b = -std::log(uniform_pos());
      } while (2.0 * b < a * a);
      const double tail = detail::ZigguratTables::kR + a;
      return negative ? -tail : tail;
    }
    const double y = t.f[layer] + uniform() * (t.f[layer + 1] - t.f[layer]);
    if (y < std::exp(-0.5 * z * z)) return negative ? -z : z;
  }
}

/// Stateless 64-bit mix (splitmix64 finaliser), used to derive sub-seeds.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace hgap
