#include "burr/ribbon_solver.hpp"

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "support/oracles.hpp"

using namespace burr;
using burr::testing::dense_gf2_oracle;

TEST(InsertRow, IntoEmptySystem) {
  banded_system sys(8, 4);
  bucket_journal j;
  const auto res = sys.insert({3, 0b1, 0x5a}, j, 3);
  EXPECT_EQ(res.status, insert_status::inserted);
  EXPECT_EQ(res.pivot, 3u);
  EXPECT_EQ(sys.coeff_at(3), 0b1u);
  EXPECT_EQ(sys.rhs_at(3), 0x5a);
  ASSERT_EQ(j.entries.size(), 1u);
  EXPECT_EQ(j.entries[0].pivot, 3u);
}

TEST(InsertRow, IdenticalEquationIsRedundant) {
  banded_system sys(4, 4);
  EXPECT_EQ(sys.insert({0, 0b1, 9}).status, insert_status::inserted);
  EXPECT_EQ(sys.insert({0, 0b1, 9}).status, insert_status::redundant);
}

TEST(InsertRow, EliminationMovesPivot) {
  banded_system sys(4, 4);
  const std::uint16_t a = 0x3c, x = 0x81;
  ASSERT_EQ(sys.insert({0, 0b11, a}).status, insert_status::inserted);
  const auto res = sys.insert({0, 0b01, x});
  EXPECT_EQ(res.status, insert_status::inserted);
  EXPECT_EQ(res.pivot, 1u);
  EXPECT_EQ(sys.coeff_at(1), 0b1u);
  EXPECT_EQ(sys.rhs_at(1), x ^ a);

  // the dense oracle agrees
  dense_gf2_oracle o;
  EXPECT_EQ(o.add(0b11, a), insert_status::inserted);
  EXPECT_EQ(o.add(0b01, x), insert_status::inserted);
}

TEST(InsertRow, InconsistentEquationFails) {
  banded_system sys(4, 4);
  ASSERT_EQ(sys.insert({0, 0b1, 1}).status, insert_status::inserted);
  EXPECT_EQ(sys.insert({0, 0b1, 0}).status, insert_status::failure);
  dense_gf2_oracle o;
  o.add(0b1, 1);
  EXPECT_EQ(o.add(0b1, 0), insert_status::failure);
}

TEST(InsertRow, StoredRowsNeverMutated) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 40;
    const unsigned w = 8;
    banded_system sys(m, w);
    for (int k = 0; k < 60; ++k) {
      std::vector<std::pair<std::uint64_t, std::uint16_t>> before(m);
      for (std::size_t s = 0; s < m; ++s) before[s] = {sys.coeff_at(s), sys.rhs_at(s)};
      const std::size_t start = rng() % (m - w + 1);
      const auto res = sys.insert({start, (rng() & 0xff) | 1, static_cast<std::uint16_t>(rng() & 0xf)});
      std::size_t changed = 0;
      for (std::size_t s = 0; s < m; ++s) {
        if (before[s] != std::pair{sys.coeff_at(s), sys.rhs_at(s)}) {
          ++changed;
          EXPECT_EQ(before[s].first, 0u);  // only a previously empty slot may change
          EXPECT_EQ(res.status, insert_status::inserted);
          EXPECT_EQ(s, res.pivot);
        }
      }
      EXPECT_LE(changed, 1u);
    }
  }
}

TEST(InsertRow, MatchesDenseOracleOnRandomInstances) {
  std::mt19937_64 rng(2024);
  for (int inst = 0; inst < 2000; ++inst) {
    const std::size_t m = 8 + rng() % 57;        // 8..64
    const unsigned w = 1 + static_cast<unsigned>(rng() % 8);  // 1..8
    const std::size_t n = 1 + rng() % 96;
    const unsigned r = 1 + static_cast<unsigned>(rng() % 16);
    banded_system sys(m, w);
    dense_gf2_oracle oracle;
    std::vector<row> kept;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t start = rng() % (m - w + 1);
      const std::uint64_t coeff = ((rng() & width_mask(w))) | 1u;
      const auto rhs = static_cast<std::uint16_t>(rng() & ((1u << r) - 1));
      const auto got = sys.insert({start, coeff, rhs}).status;
      const auto want = oracle.add(coeff << start, rhs);
      ASSERT_EQ(got, want) << "instance " << inst << " row " << k;
      if (got != insert_status::failure) kept.push_back({start, coeff, rhs});
    }
    std::vector<std::uint16_t> z(m, 0xffff);
    sys.back_substitute(z, 0, m);
    for (std::size_t s = 0; s < m; ++s) {
      if (!sys.occupied(s)) continue;
      ASSERT_EQ(burr::testing::evaluate(z, s, sys.coeff_at(s)), sys.rhs_at(s));
    }
    for (const auto& rw : kept) ASSERT_EQ(burr::testing::evaluate(z, rw.start, rw.coeff), rw.rhs);
  }
}

TEST(Uninstall, EmptyJournal) {
  banded_system sys(8, 4);
  bucket_journal j;
  EXPECT_EQ(sys.uninstall_from(j, 0), 0u);
}

TEST(Uninstall, RemovesSuffixAtOrAboveThreshold) {
  banded_system sys(16, 4);
  bucket_journal j;
  const auto p1 = sys.insert({5, 0b1, 1}, j, 5).pivot;
  const auto p2 = sys.insert({7, 0b1, 2}, j, 7).pivot;
  EXPECT_EQ(sys.uninstall_from(j, 6), 1u);
  EXPECT_TRUE(sys.occupied(p1));
  EXPECT_FALSE(sys.occupied(p2));
  ASSERT_EQ(j.entries.size(), 1u);
  EXPECT_EQ(j.entries[0].offset, 5u);
}

TEST(Uninstall, SurvivingEquationsStillSolve) {
  // buckets of 16 slots, w = 8; a random failure-free prefix survives each uninstall
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const unsigned b = 16, w = 8;
    const std::size_t buckets = 4, m = buckets * b + w - 1;
    banded_system sys(m, w);
    std::vector<row> survivors;
    bucket_journal j;
    for (std::size_t bucket = 0; bucket < buckets; ++bucket) {
      j.clear();
      std::vector<std::pair<unsigned, row>> rows;
      for (int k = 0; k < 20; ++k) {
        const unsigned off = static_cast<unsigned>(rng() % b);
        rows.push_back({off, row{bucket * b + off, (rng() & 0xff) | 1, static_cast<std::uint16_t>(rng() & 0xff)}});
      }
      std::sort(rows.begin(), rows.end(), [](auto& x, auto& y) { return x.first < y.first; });
      const unsigned t = static_cast<unsigned>(rng() % (b + 1));
      std::vector<std::pair<unsigned, row>> accepted;
      for (auto& [off, rw] : rows) {
        if (sys.insert(rw, j, off).status != insert_status::failure) accepted.push_back({off, rw});
      }
      sys.uninstall_from(j, t);
      for (auto& [off, rw] : accepted) {
        if (off < t) survivors.push_back(rw);
      }
    }
    std::vector<std::uint16_t> z(m, 0);
    sys.back_substitute(z, 0, m);
    for (const auto& rw : survivors) ASSERT_EQ(burr::testing::evaluate(z, rw.start, rw.coeff), rw.rhs);
  }
}

TEST(BackSubstitute, SingleRow) {
  banded_system sys(4, 4);
  sys.insert({0, 0b1, 5});
  std::vector<std::uint16_t> z(4, 0);
  sys.back_substitute(z, 0, 4);
  EXPECT_EQ(z[0], 5);
}

TEST(BackSubstitute, FreeSlotsAreZero) {
  banded_system sys(4, 4);
  sys.insert({0, 0b11, 3});
  std::vector<std::uint16_t> z(4, 0xff);
  sys.back_substitute(z, 0, 4);
  EXPECT_EQ(z[1], 0);
  EXPECT_EQ(z[0], 3);
}

TEST(BackSubstitute, EmptyRangeIsZero) {
  banded_system sys(6, 4);
  std::vector<std::uint16_t> z(6, 0xff);
  sys.back_substitute(z, 0, 6);
  for (auto v : z) EXPECT_EQ(v, 0);
}

TEST(BackSubstitute, WindowCrossingRangeEndIsLogicError) {
  banded_system sys(8, 4);
  sys.insert({2, 0b101, 1});
  std::vector<std::uint16_t> z(8, 0);
  EXPECT_THROW(sys.back_substitute(z, 0, 4), std::logic_error);
  EXPECT_NO_THROW(sys.back_substitute(z, 0, 5));
}

TEST(QueryDot, IdentitySelection) {
  const std::vector<std::uint16_t> z{7, 8, 9};
  EXPECT_EQ(query_dot(z, 1, 0b1), 8);
}

TEST(QueryDot, XorOfSelectedSlots) {
  const std::vector<std::uint16_t> z{0xA5, 0x0F};
  EXPECT_EQ(query_dot(z, 0, 0b11), 0xAA);
}

TEST(QueryDot, RecoversInsertedValues) {
  std::mt19937_64 rng(5);
  const std::size_t m = 2000;
  const unsigned w = 64;
  banded_system sys(m, w);
  std::vector<row> ok;
  for (int k = 0; k < 1800; ++k) {
    const row rw{rng() % (m - w + 1), rng() | 1, static_cast<std::uint16_t>(rng())};
    if (sys.insert(rw).status != insert_status::failure) ok.push_back(rw);
  }
  solution_table t(m, 16);
  sys.back_substitute(t.mutable_slots(), 0, m);
  for (const auto& rw : ok) ASSERT_EQ(query_dot(t, rw.start, rw.coeff), rw.rhs);
}
