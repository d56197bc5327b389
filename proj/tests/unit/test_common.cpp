#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "passnet/common.hpp"

using namespace passnet;

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs = differs || x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(Rng, FirstOutputsArePinned) {
  // splitmix64 reference outputs for seed 0
  Rng r(0);
  EXPECT_EQ(r.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(r.next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(r.next(), 0x06c45d188009454fULL);
}

TEST(Rng, BelowStaysInRange) {
  Rng r(7);
  std::vector<int> hits(6, 0);
  for (int i = 0; i < 6000; ++i) {
    const auto x = r.below(6);
    ASSERT_LT(x, 6U);
    ++hits[x];
  }
  for (int h : hits) EXPECT_GT(h, 800);
  EXPECT_EQ(r.below(0), 0U);
  EXPECT_EQ(r.below(1), 0U);
}

TEST(Rng, UniformHalfOpen) {
  Rng r(9);
  double lo = 1, hi = 0;
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  EXPECT_LT(lo, 0.01);
  EXPECT_GT(hi, 0.99);
}

TEST(Rng, ShuffleIsPermutation) {
  Rng r(3);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  r.shuffle(w);
  EXPECT_NE(v, w);
  std::sort(w.begin(), w.end());
  EXPECT_EQ(v, w);
}

TEST(Rng, DerivedSeedsDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(5, i));
  EXPECT_EQ(seen.size(), 1000U);
  EXPECT_EQ(derive_seed(5, 17), derive_seed(5, 17));
  EXPECT_NE(derive_seed(5, 17), derive_seed(6, 17));
}

TEST(Stats, KnownValues) {
  const std::vector<double> xs{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(stats::mean(xs), 5.0);
  EXPECT_DOUBLE_EQ(stats::pstdev(xs), 2.0);
  EXPECT_NEAR(stats::sstdev(xs), 2.138089935299395, 1e-12);
  EXPECT_DOUBLE_EQ(stats::median(xs), 4.5);
  EXPECT_DOUBLE_EQ(stats::quantile(xs, 0.25), 4.0);
  EXPECT_DOUBLE_EQ(stats::quantile(xs, 0.75), 5.5);
  EXPECT_DOUBLE_EQ(stats::quantile({1, 2, 3, 4}, 0.5), 2.5);
}

TEST(Stats, EmptyAndSingleton) {
  EXPECT_EQ(stats::pstdev(std::vector<double>{}), 0.0);
  EXPECT_EQ(stats::pstdev(std::vector<double>{3.0}), 0.0);
  EXPECT_EQ(stats::sstdev(std::vector<double>{3.0}), 0.0);
}

TEST(MatchTime, OrdersByPeriodThenClock) {
  EXPECT_LT((MatchTime{1, 2800}), (MatchTime{2, 0}));
  EXPECT_LT((MatchTime{2, 5}), (MatchTime{2, 6}));
  EXPECT_EQ((MatchTime{3, 1}), (MatchTime{3, 1}));
}

TEST(Window, HalfOpen) {
  const Window w{{1, 10}, {2, 0}};
  EXPECT_TRUE(w.contains({1, 10}));
  EXPECT_TRUE(w.contains({1, 5000}));
  EXPECT_FALSE(w.contains({2, 0}));
  EXPECT_FALSE(w.contains({1, 9}));
  EXPECT_TRUE((Window{{5, 0}, {5, 0}}).empty());
  EXPECT_FALSE(kWholeMatch.contains({5, 0}));
  EXPECT_TRUE(kWholeMatch.contains({4, 1700}));
}
