#include "burr/filter.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "burr/bench.hpp"

using namespace burr;

namespace {

// Binomial tolerance: 5 standard deviations of the observed FP count.
void expect_fp_rate(double observed, double expected, std::size_t trials) {
  const double sd = std::sqrt(expected * (1 - expected) / static_cast<double>(trials));
  EXPECT_NEAR(observed, expected, 5 * sd + 1e-12);
}

}  // namespace

TEST(Filter, NoFalseNegatives) {
  for (auto mode : {threshold_mode::uncompressed, threshold_mode::two_bit, threshold_mode::one_plus_bit}) {
    layer_config cfg;
    cfg.mode = mode;
    const auto hashes = hash_all(synthetic_keys(100000, 1), cfg.seed);
    const auto f = build_filter_from_hashes(hashes, cfg, thread_plan{4, 50});
    const auto m = measure_filter(f, hashes, 0, 1);
    EXPECT_EQ(m.false_negatives, 0u) << to_string(mode);
  }
}

TEST(Filter, FalsePositiveRateMatchesFingerprintWidth) {
  for (unsigned r : {1u, 4u, 8u}) {
    layer_config cfg;
    cfg.r = r;
    const auto hashes = hash_all(synthetic_keys(50000, 2), cfg.seed);
    const auto f = build_filter_from_hashes(hashes, cfg);
    const std::size_t neg = 400000;
    const auto m = measure_filter(f, hashes, neg, 2);
    EXPECT_EQ(m.false_negatives, 0u);
    expect_fp_rate(m.fp_rate(), std::ldexp(1.0, -static_cast<int>(r)), neg);
  }
}

TEST(Filter, SixteenBitFingerprints) {
  layer_config cfg;
  cfg.r = 16;
  const auto hashes = hash_all(synthetic_keys(20000, 3), cfg.seed);
  const auto f = build_filter_from_hashes(hashes, cfg);
  const auto m = measure_filter(f, hashes, 1000000, 3);
  EXPECT_EQ(m.false_negatives, 0u);
  EXPECT_LE(m.false_positives, 40u);  // mean ~15
}

TEST(Filter, StringKeysAndDuplicates) {
  layer_config cfg;
  std::vector<std::string> keys;
  for (int i = 0; i < 5000; ++i) keys.push_back("item/" + std::to_string(i % 4000));
  const auto f = build_filter<std::string>(keys, cfg);
  for (const auto& k : keys) ASSERT_TRUE(f.may_contain(std::string_view(k)));
}

TEST(Filter, EmptyKeySet) {
  layer_config cfg;
  const auto f = build_filter_from_hashes({}, cfg);
  std::size_t hits = 0;
  for (std::uint64_t k = 0; k < 100000; ++k) hits += f.may_contain(k);
  expect_fp_rate(static_cast<double>(hits) / 100000.0, 1.0 / 256, 100000);
}
