#include <gtest/gtest.h>

#include <set>

#include "essc/rng.hpp"

using essc::RngStream;

TEST(Rng, SameSeedSameSequence) {
  RngStream a(42);
  RngStream b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(Rng, SplitIsPureFunctionOfParentSeedAndKey) {
  RngStream parent(7);
  const auto before = parent.split(3).seed();
  parent();  // advancing the parent must not change its children
  EXPECT_EQ(parent.split(3).seed(), before);
  EXPECT_NE(parent.split(3).seed(), parent.split(4).seed());
  EXPECT_EQ(parent.split({1, 2}).seed(), parent.split(1).split(2).seed());
}

TEST(Rng, SplitStreamsDoNotCollideOverDatasetKeys) {
  RngStream root(1);
  std::set<std::uint64_t> seeds;
  for (std::uint64_t c = 1; c <= 5; ++c)
    for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(root.split({99, c, i}).seed());
  EXPECT_EQ(seeds.size(), 5000u);
}

TEST(Rng, UniformIntIsInclusive) {
  RngStream r(3);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = r.uniform_int(0, 9);
    ASSERT_GE(v, 0);
    ASSERT_LE(v, 9);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 10u);
}

TEST(Rng, Fnv1aKnownVectors) {
  EXPECT_EQ(essc::fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(essc::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}
