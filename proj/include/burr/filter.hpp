#pragma once

// Approximate membership filter: a retrieval structure storing each key's
// r-bit fingerprint. No false negatives; false positives at rate ~2^-r.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "burr/config.hpp"
#include "burr/hashing.hpp"
#include "burr/layered_structure.hpp"

namespace burr {

class ribbon_filter {
 public:
  ribbon_filter() = default;
  explicit ribbon_filter(retrieval_structure s) : s_(std::move(s)) {}

  [[nodiscard]] const retrieval_structure& structure() const noexcept { return s_; }
  [[nodiscard]] unsigned fingerprint_bits() const noexcept { return s_.config().r; }

  [[nodiscard]] bool may_contain_hash(master_hash h) const noexcept {
    return s_.query_hash(h) == fingerprint(h, s_.config().r);
  }

  template <class Key>
  [[nodiscard]] bool may_contain(const Key& key) const noexcept {
    return may_contain_hash(s_.hash(key));
  }

 private:
  retrieval_structure s_;
};

/// Key hashes -> (hash, fingerprint) pairs.
inline std::vector<key_value> fingerprint_pairs(std::span<const master_hash> hashes, unsigned r) {
  std::vector<key_value> pairs(hashes.size());
  for (std::size_t i = 0; i < hashes.size(); ++i) pairs[i] = key_value{hashes[i], fingerprint(hashes[i], r)};
  return pairs;
}

inline ribbon_filter build_filter_from_hashes(std::span<const master_hash> hashes, const layer_config& cfg,
                                              const thread_plan& plan = {}, build_stats* stats = nullptr) {
  const auto pairs = fingerprint_pairs(hashes, cfg.r);
  return ribbon_filter(construct(pairs, cfg, plan, stats));
}

/// Keys may repeat; duplicates become redundant equations.
template <class Key>
ribbon_filter build_filter(std::span<const Key> keys, const layer_config& cfg, const thread_plan& plan = {},
                           build_stats* stats = nullptr) {
  std::vector<master_hash> hashes(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) hashes[i] = hash_key(keys[i], cfg.seed);
  return build_filter_from_hashes(hashes, cfg, plan, stats);
}

}  // namespace burr
