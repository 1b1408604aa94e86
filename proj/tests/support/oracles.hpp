#pragma once

// Test-only oracles, independent of the library's solving and query paths.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "burr/hashing.hpp"
#include "burr/layer.hpp"
#include "burr/ribbon_solver.hpp"

namespace burr::testing {

/// Dense GF(2) system over at most 64 columns with up to 16-bit right-hand
/// sides. Classification is by rank comparison, recomputed from scratch with
/// highest-column-first pivoting (unlike the incremental banded solver).
class dense_gf2_oracle {
 public:
  struct dense_row {
    std::uint64_t coeff;  // absolute column bits
    std::uint16_t rhs;
  };

  /// Same meaning as banded_system::insert on the same row order.
  insert_status add(std::uint64_t coeff, std::uint16_t rhs) {
    const std::size_t before = rank(rows_, false);
    auto with = rows_;
    with.push_back({coeff, rhs});
    const std::size_t after = rank(with, false);
    if (after == before + 1) {
      rows_ = std::move(with);
      return insert_status::inserted;
    }
    if (rank(with, true) == before) {
      rows_ = std::move(with);
      return insert_status::redundant;
    }
    return insert_status::failure;
  }

  [[nodiscard]] const std::vector<dense_row>& accepted() const noexcept { return rows_; }

 private:
  static std::size_t rank(std::vector<dense_row> rows, bool augmented) {
    std::size_t r = 0;
    for (int col = 64 + 16 - 1; col >= 0; --col) {
      auto bit = [&](const dense_row& x) {
        if (col >= 64) return augmented && ((x.rhs >> (col - 64)) & 1u);
        return ((x.coeff >> col) & 1u) != 0;
      };
      std::size_t piv = r;
      while (piv < rows.size() && !bit(rows[piv])) ++piv;
      if (piv == rows.size()) continue;
      std::swap(rows[r], rows[piv]);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i != r && bit(rows[i])) {
          rows[i].coeff ^= rows[r].coeff;
          rows[i].rhs = static_cast<std::uint16_t>(rows[i].rhs ^ rows[r].rhs);
        }
      }
      ++r;
    }
    return r;
  }

  std::vector<dense_row> rows_;
};

/// Evaluates an equation directly against a solution vector, bit by bit.
inline std::uint16_t evaluate(std::span<const std::uint16_t> z, std::size_t start, std::uint64_t coeff) {
  std::uint16_t acc = 0;
  for (unsigned j = 0; j < 64; ++j) {
    if ((coeff >> j) & 1u) acc = static_cast<std::uint16_t>(acc ^ z[start + j]);
  }
  return acc;
}

inline std::vector<key_value> random_pairs(std::size_t n, unsigned r, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<key_value> pairs(n);
  const auto mask = static_cast<std::uint16_t>((1u << r) - 1);
  for (auto& p : pairs) p = key_value{rng(), static_cast<std::uint16_t>(rng() & mask)};
  return pairs;
}

struct layer_check {
  std::size_t wrong_answers = 0;     // kept keys whose equation is violated
  std::size_t misclassified = 0;     // bumped list disagrees with the threshold rule
  std::size_t kept = 0;
  std::size_t bumped = 0;
};

/// Post-hoc check of a built layer against its input: every key below its
/// bucket threshold satisfies its equation; the bumped output is exactly the
/// multiset of keys at or above their threshold.
inline layer_check verify_layer(std::span<const key_value> input, const layer_result& res, const layer_config& cfg,
                                unsigned layer_index) {
  layer_check chk;
  std::map<std::pair<master_hash, std::uint16_t>, long> expected_bumped;
  const layer& l = res.built;
  for (const auto& kv : input) {
    const auto lh = layer_hash(kv.hash, layer_index, l.seed);
    const auto addr = make_row_address(lh, l.num_buckets, cfg.b);
    if (addr.offset >= l.thresholds.lookup(addr.bucket)) {
      ++expected_bumped[{kv.hash, kv.value}];
      continue;
    }
    ++chk.kept;
    if (evaluate(l.table.slots(), addr.start, coefficient_word(lh, cfg.w)) != (kv.value & cfg.value_mask())) {
      ++chk.wrong_answers;
    }
  }
  for (const auto& kv : res.bumped) {
    ++chk.bumped;
    if (--expected_bumped[{kv.hash, kv.value}] < 0) ++chk.misclassified;
  }
  for (const auto& [k, c] : expected_bumped) {
    if (c > 0) chk.misclassified += static_cast<std::size_t>(c);
  }
  return chk;
}

}  // namespace burr::testing
