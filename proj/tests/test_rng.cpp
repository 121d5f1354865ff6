#include <doctest.h>

#include <cmath>
#include <set>

#include "hgap/rng.hpp"

using namespace hgap;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32::generate(C{0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::generate(C{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::generate(C{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("generate_many matches generate lane by lane") {
  std::array<std::array<std::uint32_t, 5>, 4> c{};
  for (std::uint32_t lane = 0; lane < 5; ++lane) {
    c[0][lane] = lane * 17u;
    c[1][lane] = 3u;
    c[2][lane] = 0xdeadbeefu + lane;
    c[3][lane] = lane;
  }
  const auto input = c;
  const Philox4x32::Key key{0x12345678u, 0x9abcdef0u};
  Philox4x32::generate_many(c, key);
  for (std::size_t lane = 0; lane < 5; ++lane) {
    const auto single = Philox4x32::generate({input[0][lane], input[1][lane], input[2][lane], input[3][lane]}, key);
    for (std::size_t w = 0; w < 4; ++w) CHECK(c[w][lane] == single[w]);
  }
}

TEST_CASE("PathStream words are the Philox blocks of (block, path)") {
  const std::uint64_t seed = 0x0123456789abcdefULL, path = 0x0000000500000007ULL;
  PathStream s(seed, path);
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  for (std::uint32_t block = 0; block < 20; ++block) {
    const auto out = Philox4x32::generate({block, 0u, 7u, 5u}, key);
    CHECK(s.next_u64() == ((static_cast<std::uint64_t>(out[1]) << 32) | out[0]));
    CHECK(s.next_u64() == ((static_cast<std::uint64_t>(out[3]) << 32) | out[2]));
  }
}

TEST_CASE("PathStream is deterministic and path streams differ") {
  PathStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  std::set<std::uint64_t> seen;
  for (int k = 0; k < 1000; ++k) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    seen.insert(x);
    seen.insert(c.next_u64());
    seen.insert(d.next_u64());
  }
  CHECK(seen.size() == 3000);
}

TEST_CASE("uniform ranges and moments") {
  PathStream s(7, 0);
  constexpr int N = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int k = 0; k < N; ++k) {
    const double u = s.uniform();
    CHECK_UNARY(u >= 0.0);
    CHECK_UNARY(u < 1.0);
    const double v = s.uniform_pos();
    CHECK_UNARY(v > 0.0);
    CHECK_UNARY(v <= 1.0);
    sum += u;
    sum2 += u * u;
  }
  CHECK(std::abs(sum / N - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / N));
  CHECK(std::abs(sum2 / N - 1.0 / 3.0) < 4.0 * std::sqrt(4.0 / 45.0 / N));
}

TEST_CASE("normal moments and tail") {
  PathStream s(11, 2);
  constexpr int N = 1'000'000;
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  int beyond3 = 0;
  int bins[8] = {};
  for (int k = 0; k < N; ++k) {
    const double z = s.normal();
    m1 += z;
    m2 += z * z;
    m3 += z * z * z;
    m4 += z * z * z * z;
    if (std::abs(z) > 3.0) ++beyond3;
    const int b = static_cast<int>(std::floor(z + 4.0));
    if (b >= 0 && b < 8) ++bins[b];
  }
  m1 /= N;
  m2 /= N;
  m3 /= N;
  m4 /= N;
  CHECK(std::abs(m1) < 4.0 / std::sqrt(N));
  CHECK(std::abs(m2 - 1.0) < 4.0 * std::sqrt(2.0 / N));
  CHECK(std::abs(m3) < 4.0 * std::sqrt(15.0 / N));
  CHECK(std::abs(m4 - 3.0) < 4.0 * std::sqrt(96.0 / N));
  const double p3 = std::erfc(3.0 / std::sqrt(2.0));
  CHECK(std::abs(beyond3 - N * p3) < 4.0 * std::sqrt(N * p3));
  // Unit-width bins against Phi differences.
  for (int b = 0; b < 8; ++b) {
    const double lo = b - 4.0, hi = lo + 1.0;
    const double p = 0.5 * (std::erfc(-hi / std::sqrt(2.0)) - std::erfc(-lo / std::sqrt(2.0)));
    CAPTURE(b);
    CHECK(std::abs(bins[b] - N * p) < 5.0 * std::sqrt(N * p) + 1.0);
  }
}

TEST_CASE("mix_seed") {
  static_assert(mix_seed(1, 0) != mix_seed(1, 1));
  CHECK(mix_seed(20240601, 1) == mix_seed(20240601, 1));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 100; ++s)
    for (std::uint64_t salt = 0; salt < 10; ++salt) seen.insert(mix_seed(s, salt));
  CHECK(seen.size() == 1000);
}
