#pragma once

// Incremental banded Gaussian elimination over GF(2)^r.
//
// Slot s of a banded_system holds at most one row whose coefficient word has
// bit 0 set, i.e. the row's pivot is s itself and its window covers
// [s, s + w). Inserting a row only ever mutates the incoming row, never a
// stored one, which is what makes suffix removal (uninstall_from) sound.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace burr {

struct row {
  std::size_t start = 0;
  std::uint64_t coeff = 1;  // bit 0 set
  std::uint16_t rhs = 0;
};

enum class insert_status : std::uint8_t { inserted, redundant, failure };

struct insert_result {
  insert_status status = insert_status::failure;
  std::size_t pivot = 0;  // valid when inserted
};

/// Rows of the bucket currently being processed, in insertion order.
struct bucket_journal {
  struct entry {
    unsigned offset;
    std::size_t pivot;
  };
  std::vector<entry> entries;

  void clear() noexcept { entries.clear(); }
  [[nodiscard]] bool empty() const noexcept { return entries.empty(); }
};

class banded_system {
 public:
  banded_system() = default;
  banded_system(std::size_t m, unsigned w) : w_(w), coeff_(m, 0), rhs_(m, 0) {}

  [[nodiscard]] std::size_t size() const noexcept { return coeff_.size(); }
  [[nodiscard]] unsigned width() const noexcept { return w_; }
  [[nodiscard]] bool occupied(std::size_t s) const noexcept { return coeff_[s] != 0; }
  [[nodiscard]] std::uint64_t coeff_at(std::size_t s) const noexcept { return coeff_[s]; }
  [[nodiscard]] std::uint16_t rhs_at(std::size_t s) const noexcept { return rhs_[s]; }

  /// Eliminates `r` against the stored rows. Safe to call concurrently for
  /// rows whose windows lie in disjoint slot ranges.
  insert_result insert(row r) noexcept {
    std::size_t s = r.start;
    std::uint64_t c = r.coeff;
    std::uint16_t v = r.rhs;
    for (;;) {
      if (coeff_[s] == 0) {
        coeff_[s] = c;
        rhs_[s] = v;
        return {insert_status::inserted, s};
      }
      c ^= coeff_[s];
      v ^= rhs_[s];
      if (c == 0) return {v == 0 ? insert_status::redundant : insert_status::failure, 0};
      const int z = std::countr_zero(c);
      c >>= z;
      s += static_cast<std::size_t>(z);
    }
  }

  insert_result insert(row r, bucket_journal& journal, unsigned offset) {
    const insert_result res = insert(r);
    if (res.status == insert_status::inserted) journal.entries.push_back({offset, res.pivot});
    return res;
  }

  /// Clears every journaled row with offset >= threshold. Only valid for the
  /// bucket being processed, before any later bucket inserts.
  std::size_t uninstall_from(bucket_journal& journal, unsigned threshold) noexcept {
    std::size_t removed = 0;
    while (!journal.entries.empty() && journal.entries.back().offset >= threshold) {
      const std::size_t p = journal.entries.back().pivot;
      coeff_[p] = 0;
      rhs_[p] = 0;
      journal.entries.pop_back();
      ++removed;
    }
    return removed;
  }

  /// Solves slots [lo, hi) right to left into `z` (indexed by absolute slot).
  /// Throws std::logic_error if a stored row in the range reaches slot hi or beyond.
  void back_substitute(std::span<std::uint16_t> z, std::size_t lo, std::size_t hi) const {
    if (hi > size() || z.size() < size()) throw std::logic_error("back_substitute: range exceeds system");
    for (std::size_t s = hi; s-- > lo;) {
      const std::uint64_t c = coeff_[s];
      if (c == 0) {
        z[s] = 0;
        continue;
      }
      if (s + static_cast<std::size_t>(std::bit_width(c)) > hi) {
        throw std::logic_error("back_substitute: row window crosses range end");
      }
      std::uint16_t acc = rhs_[s];
      for (std::uint64_t rest = c >> 1; rest != 0; rest &= rest - 1) {
        acc ^= z[s + 1 + static_cast<std::size_t>(std::countr_zero(rest))];
      }
      z[s] = acc;
    }
  }

 private:
  unsigned w_ = 64;
  std::vector<std::uint64_t> coeff_;  // 0 marks an empty slot
  std::vector<std::uint16_t> rhs_;
};

/// The solved table Z: one r-bit value per slot.
class solution_table {
 public:
  solution_table() = default;
  solution_table(std::size_t m, unsigned r) : r_(r), z_(m, 0) {}
  solution_table(std::vector<std::uint16_t> z, unsigned r) : r_(r), z_(std::move(z)) {}

  [[nodiscard]] std::size_t size() const noexcept { return z_.size(); }
  [[nodiscard]] unsigned value_bits() const noexcept { return r_; }
  [[nodiscard]] std::uint16_t operator[](std::size_t s) const noexcept { return z_[s]; }
  [[nodiscard]] std::span<std::uint16_t> mutable_slots() noexcept { return z_; }
  [[nodiscard]] std::span<const std::uint16_t> slots() const noexcept { return z_; }
  [[nodiscard]] std::size_t packed_bytes() const noexcept { return (z_.size() * r_ + 7) / 8; }

  friend bool operator==(const solution_table&, const solution_table&) = default;

 private:
  unsigned r_ = 8;
  std::vector<std::uint16_t> z_;
};

/// XOR of Z[start + j] over the set bits j of coeff.
inline std::uint16_t query_dot(std::span<const std::uint16_t> z, std::size_t start, std::uint64_t coeff) noexcept {
  std::uint16_t acc = 0;
  const std::uint16_t* base = z.data() + start;
  for (; coeff != 0; coeff &= coeff - 1) acc ^= base[std::countr_zero(coeff)];
  return acc;
}

inline std::uint16_t query_dot(const solution_table& z, std::size_t start, std::uint64_t coeff) noexcept {
  return query_dot(z.slots(), start, coeff);
}

}  // namespace burr
