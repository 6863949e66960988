#include "spcdrift/error.hpp"
#include "spcdrift/io_util.hpp"
#include "spcdrift/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <set>

using namespace spcdrift;

TEST(FormatReal, RoundTripsExactly) {
  Xoshiro256 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(uniform(rng, -1.0, 1.0), static_cast<int>(bounded(rng, 200)) - 100);
    const auto back = parse_real(format_real(v));
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(*back, v);
  }
}

TEST(FormatReal, UsesSeventeenSignificantDigits) {
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
  EXPECT_EQ(format_real(0.5), "0.5");
  EXPECT_EQ(format_real(-2.0), "-2");
}

TEST(ParseReal, RejectsGarbage) {
  EXPECT_FALSE(parse_real("").has_value());
  EXPECT_FALSE(parse_real("1.0x").has_value());
  EXPECT_FALSE(parse_real("abc").has_value());
  EXPECT_EQ(*parse_real(" 2.5 "), 2.5);
}

TEST(ParseReal, OverflowIsNotFinite) {
  const auto v = parse_real("1e999");
  ASSERT_TRUE(v.has_value());
  EXPECT_FALSE(std::isfinite(*v));
}

TEST(SplitCsvLine, TrimsFields) {
  const auto f = split_csv_line(" a, b ,c\r");
  ASSERT_EQ(f.size(), 3u);
  EXPECT_EQ(f[0], "a");
  EXPECT_EQ(f[1], "b");
  EXPECT_EQ(f[2], "c");
}

TEST(ReadFile, MissingFileIsIoError) {
  try {
    read_file("/nonexistent/path/for/test");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

TEST(Rng, SameSeedSameStream) {
  Xoshiro256 a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a();
    EXPECT_EQ(va, b());
    differs |= va != c();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 50; ++s) {
    for (std::uint64_t k = 0; k < 50; ++k) seen.insert(derive_seed(s, k));
  }
  EXPECT_EQ(seen.size(), 2500u);
}

TEST(Rng, Uniform01InUnitInterval) {
  Xoshiro256 rng(1);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = uniform01(rng);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(Rng, BoundedIsUnbiased) {
  Xoshiro256 rng(3);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto v = bounded(rng, 7);
    ASSERT_LT(v, 7u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 5 * std::sqrt(n / 7.0));
}

TEST(Rng, BinomialMeanAndVariance) {
  Xoshiro256 rng(11);
  const int n = 20000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = static_cast<double>(binomial(rng, 100, 0.04));
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  EXPECT_NEAR(mean, 4.0, 0.05);
  EXPECT_NEAR(var, 100 * 0.04 * 0.96, 0.15);
  EXPECT_EQ(binomial(rng, 100, 0.0), 0u);
  EXPECT_EQ(binomial(rng, 100, 1.0), 100u);
}

TEST(Rng, StandardNormalMoments) {
  Xoshiro256 rng(5);
  const int n = 200000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(rng);
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
  EXPECT_NEAR(s4 / n, 3.0, 0.06);
}

TEST(Rng, ShuffleIsPermutation) {
  Xoshiro256 rng(9);
  std::vector<int> v(100);
  std::iota(v.begin(), v.end(), 0);
  shuffle(v, rng);
  auto sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sorted[i], i);
  bool moved = false;
  for (int i = 0; i < 100; ++i) moved |= v[i] != i;
  EXPECT_TRUE(moved);
}
