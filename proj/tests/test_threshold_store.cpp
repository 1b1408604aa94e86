#include "burr/threshold_store.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

using namespace burr;

namespace {
constexpr unsigned B = 128, W = 64;
}

TEST(TwoBitValues, DefaultsForBucket128Width64) {
  const auto v = two_bit_values(B, W);
  EXPECT_EQ(v, (std::array<unsigned, 4>{0, 64, 112, 128}));
}

TEST(TwoBitValues, StrictlyIncreasingWhenBucketEqualsWidth) {
  const auto v = two_bit_values(64, 64);
  EXPECT_EQ(v.front(), 0u);
  EXPECT_EQ(v.back(), 64u);
  EXPECT_LT(v[0], v[1]);
  EXPECT_LT(v[1], v[2]);
  EXPECT_LT(v[2], v[3]);
}

TEST(Quantize, TwoBitExamples) {
  const threshold_store s(threshold_mode::two_bit, B, W, 4);
  EXPECT_EQ(s.quantize(128), 128u);
  EXPECT_EQ(s.quantize(100), 64u);
  EXPECT_EQ(s.quantize(0), 0u);
  EXPECT_EQ(s.quantize(65), 64u);  // forced boundary threshold
  EXPECT_EQ(s.quantize(112), 112u);
}

TEST(Quantize, IdentityForExactModes) {
  for (auto mode : {threshold_mode::uncompressed, threshold_mode::one_plus_bit}) {
    const threshold_store s(mode, B, W, 4);
    for (unsigned t = 0; t <= B; ++t) EXPECT_EQ(s.quantize(t), t);
  }
}

TEST(Quantize, SafeMonotoneIdempotent) {
  for (auto mode : {threshold_mode::uncompressed, threshold_mode::two_bit, threshold_mode::one_plus_bit}) {
    const threshold_store s(mode, B, W, 1);
    unsigned prev = 0;
    for (unsigned t = 0; t <= B; ++t) {
      const unsigned q = s.quantize(t);
      EXPECT_LE(q, t);
      EXPECT_GE(q, prev);
      EXPECT_EQ(s.quantize(q), q);
      prev = q;
      // keys bumped under q include those bumped under t
      for (unsigned off = 0; off < B; ++off) {
        if (is_bumped(off, t)) EXPECT_TRUE(is_bumped(off, q));
      }
    }
    EXPECT_EQ(s.quantize(0), 0u);
    EXPECT_EQ(s.quantize(B), B);
  }
}

TEST(IsBumped, Rule) {
  EXPECT_TRUE(is_bumped(70, 64));
  for (unsigned off = 0; off < B; ++off) EXPECT_FALSE(is_bumped(off, B));
  EXPECT_TRUE(is_bumped(0, 0));
}

TEST(SetThreshold, OnePlusBitNoBump) {
  threshold_store s(threshold_mode::one_plus_bit, B, W, 16);
  s.set(3, B);
  EXPECT_TRUE(s.exceptions().empty());
  EXPECT_EQ(s.codes()[0], 0);
  EXPECT_EQ(s.lookup(3), B);
}

TEST(SetThreshold, OnePlusBitException) {
  threshold_store s(threshold_mode::one_plus_bit, B, W, 16);
  s.set(9, 65);
  ASSERT_EQ(s.exceptions().size(), 1u);
  EXPECT_EQ(s.exceptions()[0].bucket, 9u);
  EXPECT_EQ(s.exceptions()[0].threshold, 65);
  EXPECT_EQ((s.codes()[1] >> 1) & 1u, 1u);
  EXPECT_EQ(s.lookup(9), 65u);
  // clearing back to b drops the exception
  s.set(9, B);
  EXPECT_TRUE(s.exceptions().empty());
  EXPECT_EQ(s.lookup(9), B);
}

TEST(SetThreshold, Uncompressed) {
  threshold_store s(threshold_mode::uncompressed, B, W, 10);
  s.set(4, 7);
  EXPECT_EQ(s.lookup(4), 7u);
}

TEST(SetThreshold, TwoBitRejectsUnrepresentable) {
  threshold_store s(threshold_mode::two_bit, B, W, 10);
  EXPECT_THROW(s.set(0, 65), std::logic_error);
  s.set(0, 64);
  EXPECT_EQ(s.lookup(0), 64u);
}

TEST(Lookup, NeverSetDefaultsToBucketSize) {
  for (auto mode : {threshold_mode::uncompressed, threshold_mode::two_bit, threshold_mode::one_plus_bit}) {
    const threshold_store s(mode, B, W, 1001);
    for (std::size_t k = 0; k < 1001; ++k) ASSERT_EQ(s.lookup(k), B);
  }
}

TEST(Lookup, RandomizedRoundTrip) {
  std::mt19937_64 rng(3);
  for (auto mode : {threshold_mode::uncompressed, threshold_mode::two_bit, threshold_mode::one_plus_bit}) {
    const std::size_t nb = 5000;
    threshold_store s(mode, B, W, nb);
    std::vector<unsigned> expected(nb, B);
    for (int i = 0; i < 10000; ++i) {
      const std::size_t bucket = rng() % nb;
      const unsigned t = s.quantize(static_cast<unsigned>(rng() % (B + 1)));
      s.set(bucket, t);
      expected[bucket] = t;
    }
    for (std::size_t k = 0; k < nb; ++k) ASSERT_EQ(s.lookup(k), expected[k]) << to_string(mode) << " bucket " << k;
    const auto copy = threshold_store::from_parts(mode, B, W, nb, s.codes(), s.exceptions());
    EXPECT_EQ(copy, s);
  }
}

TEST(ThresholdBytes, Accounting) {
  EXPECT_EQ(threshold_store(threshold_mode::two_bit, B, W, 1000).bytes(), 250u);
  EXPECT_EQ(threshold_store(threshold_mode::uncompressed, B, W, 10).bytes(), 10u);
  threshold_store s(threshold_mode::one_plus_bit, B, W, 1024);
  s.set(1, 10);
  s.set(500, 64);
  s.set(1023, 0);
  EXPECT_EQ(s.bytes(), 128u + 3 * 5);
}

TEST(FromParts, RejectsInconsistentOnePlusBit) {
  threshold_store s(threshold_mode::one_plus_bit, B, W, 16);
  s.set(2, 10);
  auto codes = s.codes();
  codes[0] = 0;  // flag cleared but exception kept
  EXPECT_THROW(threshold_store::from_parts(threshold_mode::one_plus_bit, B, W, 16, codes, s.exceptions()),
               std::invalid_argument);
  EXPECT_THROW(threshold_store::from_parts(threshold_mode::one_plus_bit, B, W, 16, {0}, {}), std::invalid_argument);
}
