#include <array>
#include <cmath>
#include <cstdint>

#include "doctest.h"
#include "sixsim/rng.hpp"

using namespace sixsim;

TEST_CASE("splitmix64 matches the published reference sequence") {
  // The stream seeded with 0 starts 0xE220A8397B1DCDAF, 0x910A2DEC89025CC1
  // (the same vector xoshiro's seeding procedure is specified against).
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(splitmix64(1) == 0x910A2DEC89025CC1ULL);
}

TEST_CASE("hash_name is 64-bit FNV-1a") {
  // offset basis hashes the empty string
  CHECK(hash_name("") == 0xcbf29ce484222325ULL);
  CHECK(hash_name("link") == 0xBF4B9BAD694F4809ULL);
  CHECK(hash_name("link") != hash_name("jitter"));
}

TEST_CASE("equal (seed, stream) pairs replay the same sequence") {
  Rng a(7, "link");
  Rng b(7, "link");
  for (int i = 0; i < 1000; ++i) {
    uint64_t x = a.next_u64();
    uint64_t y = b.next_u64();
    REQUIRE(x == y);
  }
}

TEST_CASE("streams of one run are decorrelated by name and by seed") {
  Rng link7(7, "link");
  Rng jit7(7, "jitter");
  Rng link8(8, "link");
  int same_name = 0, same_seed = 0;
  uint64_t l7_first = 0;
  for (int i = 0; i < 64; ++i) {
    uint64_t a = link7.next_u64();
    if (i == 0) l7_first = a;
    if (a == jit7.next_u64()) ++same_name;
    if (a == link8.next_u64()) ++same_seed;
  }
  CHECK(same_name == 0);
  CHECK(same_seed == 0);
  // and replaying from a fresh object reproduces the head of the stream
  CHECK(Rng(7, "link").next_u64() == l7_first);
}

TEST_CASE("next_double: range and long-run mean") {
  Rng r(11, "link");
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    double x = r.next_double();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
    sum += x;
  }
  // sd of the mean is 0.289/sqrt(n) ~ 0.00065; 0.002 is > 3 sigma
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.004));
  CHECK(std::abs(sum / n - 0.5) < 0.002);
}

TEST_CASE("chance(p) frequency tracks p") {
  // 0.5625 is the both-directions success rate of a 0.75 link: the chance a
  // data frame and its acknowledgment both get through on the first try.
  Rng r(12, "link");
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    if (r.chance(0.5625)) ++hits;
  CHECK(static_cast<double>(hits) / n == doctest::Approx(0.5625).epsilon(0.018));
  CHECK(std::abs(static_cast<double>(hits) / n - 0.5625) < 0.01);
}

TEST_CASE("four listeners at 0.75 hear three on average") {
  // binomial(4, 0.75) has mean 3: the expected number of neighbors that
  // receive one shared-cell broadcast in the benchmark graph
  Rng r(13, "link");
  const int trials = 100000;
  long heard = 0;
  for (int t = 0; t < trials; ++t)
    for (int k = 0; k < 4; ++k)
      if (r.chance(0.75)) ++heard;
  double mean = static_cast<double>(heard) / trials;
  CHECK(std::abs(mean - 3.0) < 0.1);
}

TEST_CASE("next_below: bounds and uniformity over 101 buckets") {
  Rng r(14, "contention");
  std::array<int, 101> bucket{};
  const int n = 101000;
  for (int i = 0; i < n; ++i) {
    uint64_t v = r.next_below(101);
    REQUIRE(v < 101);
    ++bucket[static_cast<size_t>(v)];
  }
  // expected 1000 per bucket, sd ~31.5; +-160 is about 5 sigma
  for (int b = 0; b < 101; ++b) {
    CHECK(bucket[static_cast<size_t>(b)] > 840);
    CHECK(bucket[static_cast<size_t>(b)] < 1160);
  }
}

TEST_CASE("next_range stays inside its interval") {
  Rng r(15, "jitter");
  for (int i = 0; i < 10000; ++i) {
    double x = r.next_range(4.75, 5.25);
    REQUIRE(x >= 4.75);
    REQUIRE(x < 5.25);
  }
}

TEST_CASE("RngSet derives four distinct named streams") {
  RngSet s(42);
  uint64_t a = s.link.next_u64();
  uint64_t b = s.jitter.next_u64();
  uint64_t c = s.contention.next_u64();
  uint64_t d = s.sixp.next_u64();
  CHECK(a != b);
  CHECK(a != c);
  CHECK(a != d);
  CHECK(b != c);
  CHECK(b != d);
  CHECK(c != d);
  // and they match standalone construction
  CHECK(Rng(42, "link").next_u64() == a);
  CHECK(Rng(42, "sixp").next_u64() == d);
}
