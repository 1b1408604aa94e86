#pragma once

// Per-bucket bump thresholds. A key at intra-bucket offset o is bumped iff
// o >= t, so t = b bumps nothing and t = 0 bumps the whole bucket.
//
// Encodings:
//   uncompressed  8-bit exact threshold per bucket
//   two_bit       index into four fixed values {0, t1, t2, b}
//   one_plus_bit  one bit per bucket (0: t = b), exact threshold of the
//                 flagged buckets kept in an exception table

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "burr/config.hpp"

namespace burr {

constexpr bool is_bumped(unsigned offset, unsigned threshold) noexcept { return offset >= threshold; }

/// The four two-bit threshold values {0, b - w, b - w/4, b}, nudged apart when b is close to w.
constexpr std::array<unsigned, 4> two_bit_values(unsigned b, unsigned w) noexcept {
  const unsigned t1 = b > w ? b - w : 1u;
  unsigned t2 = b - w / 4;
  if (t2 <= t1) t2 = t1 + 1;
  return {0u, t1, t2, b};
}

class threshold_store {
 public:
  struct exception_entry {
    std::uint32_t bucket;
    std::uint8_t threshold;
    friend bool operator==(const exception_entry&, const exception_entry&) = default;
  };

  /// Accounted size of one exception: 4-byte bucket index plus 1-byte threshold.
  static constexpr std::size_t exception_entry_bytes = 5;

  threshold_store() = default;
  threshold_store(threshold_mode mode, unsigned b, unsigned w, std::size_t num_buckets)
      : mode_(mode), b_(b), w_(w), num_buckets_(num_buckets) {
    codes_.assign((num_buckets * code_bits() + 7) / 8, fill_byte());
  }

  [[nodiscard]] threshold_mode mode() const noexcept { return mode_; }
  [[nodiscard]] unsigned bucket_size() const noexcept { return b_; }
  [[nodiscard]] unsigned ribbon_width() const noexcept { return w_; }
  [[nodiscard]] std::size_t num_buckets() const noexcept { return num_buckets_; }
  [[nodiscard]] const std::vector<std::uint8_t>& codes() const noexcept { return codes_; }
  [[nodiscard]] const std::vector<exception_entry>& exceptions() const noexcept { return exceptions_; }

  [[nodiscard]] unsigned code_bits() const noexcept {
    switch (mode_) {
      case threshold_mode::uncompressed: return 8;
      case threshold_mode::two_bit: return 2;
      case threshold_mode::one_plus_bit: return 1;
    }
    return 8;
  }

  /// Largest representable threshold <= t (never bumps fewer keys than asked).
  [[nodiscard]] unsigned quantize(unsigned t) const noexcept {
    if (t >= b_) return b_;
    if (mode_ != threshold_mode::two_bit) return t;
    const auto vals = two_bit_values(b_, w_);
    unsigned q = 0;
    for (unsigned v : vals) {
      if (v <= t) q = v;
    }
    return q;
  }

  void set(std::size_t bucket, unsigned t) {
    if (bucket >= num_buckets_) throw std::out_of_range("threshold_store::set: bucket out of range");
    if (t > b_) throw std::logic_error("threshold_store::set: threshold above bucket size");
    switch (mode_) {
      case threshold_mode::uncompressed:
        codes_[bucket] = static_cast<std::uint8_t>(t);
        break;
      case threshold_mode::two_bit: {
        const auto vals = two_bit_values(b_, w_);
        const auto it = std::find(vals.begin(), vals.end(), t);
        if (it == vals.end()) throw std::logic_error("threshold_store::set: value not representable in 2-bit mode");
        const auto idx = static_cast<unsigned>(it - vals.begin());
        const std::size_t shift = (bucket % 4) * 2;
        codes_[bucket / 4] = static_cast<std::uint8_t>((codes_[bucket / 4] & ~(3u << shift)) | (idx << shift));
        break;
      }
      case threshold_mode::one_plus_bit: {
        const auto key = static_cast<std::uint32_t>(bucket);
        auto it = std::lower_bound(exceptions_.begin(), exceptions_.end(), key,
                                   [](const exception_entry& e, std::uint32_t k) { return e.bucket < k; });
        const bool present = it != exceptions_.end() && it->bucket == key;
        if (t == b_) {
          codes_[bucket / 8] = static_cast<std::uint8_t>(codes_[bucket / 8] & ~(1u << (bucket % 8)));
          if (present) exceptions_.erase(it);
        } else {
          codes_[bucket / 8] = static_cast<std::uint8_t>(codes_[bucket / 8] | (1u << (bucket % 8)));
          if (present) {
            it->threshold = static_cast<std::uint8_t>(t);
          } else {
            exceptions_.insert(it, {key, static_cast<std::uint8_t>(t)});
          }
        }
        break;
      }
    }
  }

  [[nodiscard]] unsigned lookup(std::size_t bucket) const noexcept {
    switch (mode_) {
      case threshold_mode::uncompressed:
        return codes_[bucket];
      case threshold_mode::two_bit:
        return two_bit_values(b_, w_)[(codes_[bucket / 4] >> ((bucket % 4) * 2)) & 3u];
      case threshold_mode::one_plus_bit: {
        if (((codes_[bucket / 8] >> (bucket % 8)) & 1u) == 0) return b_;
        const auto key = static_cast<std::uint32_t>(bucket);
        const auto it = std::lower_bound(exceptions_.begin(), exceptions_.end(), key,
                                         [](const exception_entry& e, std::uint32_t k) { return e.bucket < k; });
        return it->threshold;
      }
    }
    return b_;
  }

  /// Code array plus accounted exception table.
  [[nodiscard]] std::size_t bytes() const noexcept {
    return (num_buckets_ * code_bits() + 7) / 8 + exceptions_.size() * exception_entry_bytes;
  }

  /// Rebuilds a store from serialized parts; validates consistency.
  static threshold_store from_parts(threshold_mode mode, unsigned b, unsigned w, std::size_t num_buckets,
                                    std::vector<std::uint8_t> codes, std::vector<exception_entry> exceptions) {
    threshold_store s;
    s.mode_ = mode;
    s.b_ = b;
    s.w_ = w;
    s.num_buckets_ = num_buckets;
    if (codes.size() != (num_buckets * s.code_bits() + 7) / 8) {
      throw std::invalid_argument("threshold code array has wrong length");
    }
    if (mode != threshold_mode::one_plus_bit && !exceptions.empty()) {
      throw std::invalid_argument("exception table only valid in 1plus mode");
    }
    s.codes_ = std::move(codes);
    s.exceptions_ = std::move(exceptions);
    if (mode == threshold_mode::uncompressed) {
      for (std::size_t i = 0; i < num_buckets; ++i) {
        if (s.codes_[i] > b) throw std::invalid_argument("threshold code exceeds bucket size");
      }
    }
    if (mode == threshold_mode::one_plus_bit) {
      std::size_t flagged = 0;
      for (std::size_t i = 0; i < num_buckets; ++i) flagged += (s.codes_[i / 8] >> (i % 8)) & 1u;
      if (flagged != s.exceptions_.size()) throw std::invalid_argument("flag bits and exception table disagree");
      for (std::size_t i = 0; i < s.exceptions_.size(); ++i) {
        const auto& e = s.exceptions_[i];
        if (e.bucket >= num_buckets || e.threshold >= b || ((s.codes_[e.bucket / 8] >> (e.bucket % 8)) & 1u) == 0 ||
            (i > 0 && s.exceptions_[i - 1].bucket >= e.bucket)) {
          throw std::invalid_argument("malformed exception table");
        }
      }
    }
    return s;
  }

  friend bool operator==(const threshold_store&, const threshold_store&) = default;

 private:
  [[nodiscard]] std::uint8_t fill_byte() const noexcept {
    switch (mode_) {
      case threshold_mode::uncompressed: return static_cast<std::uint8_t>(b_);
      case threshold_mode::two_bit: return 0xff;  // index 3 == b
      case threshold_mode::one_plus_bit: return 0;
    }
    return 0;
  }

  threshold_mode mode_ = threshold_mode::uncompressed;
  unsigned b_ = 128;
  unsigned w_ = 64;
  std::size_t num_buckets_ = 0;
  std::vector<std::uint8_t> codes_;
  std::vector<exception_entry> exceptions_;
};

}  // namespace burr
