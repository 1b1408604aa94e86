#pragma once

// Multi-layer bumped ribbon retrieval. Keys bumped from layer i cascade to
// layer i + 1; whatever is left after the last bumping layer goes into a
// plain ribbon base layer, which is scaled up and reseeded until it solves.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "burr/config.hpp"
#include "burr/hashing.hpp"
#include "burr/layer.hpp"
#include "burr/parallel_construction.hpp"
#include "burr/ribbon_solver.hpp"
#include "burr/threshold_store.hpp"

namespace burr {

struct base_layer {
  std::uint32_t seed = 0;
  solution_table table;

  [[nodiscard]] std::size_t slots() const noexcept { return table.size(); }
  friend bool operator==(const base_layer&, const base_layer&) = default;
};

inline std::size_t initial_base_slots(std::size_t n, const layer_config& cfg) noexcept {
  const auto slack = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * (1.0 + cfg.base_slack)));
  return std::max(slack, n + cfg.w);
}

inline std::uint32_t derive_base_seed(std::uint64_t global_seed, unsigned attempt) noexcept {
  return static_cast<std::uint32_t>(detail::fmix64(global_seed + detail::k_mul_b * (attempt + 1ull)));
}

/// Plain ribbon over `pairs` (no bumping). Grows by base_growth and reseeds
/// on failure; throws construction_error after max_base_attempts.
inline base_layer construct_base(std::span<const key_value> pairs, const layer_config& cfg,
                                 build_stats* stats = nullptr) {
  const unsigned base_index = cfg.layers;
  std::size_t m = initial_base_slots(pairs.size(), cfg);
  std::vector<sorted_row> rows(pairs.size());
  for (unsigned attempt = 0; attempt < cfg.max_base_attempts; ++attempt) {
    const std::uint32_t seed = derive_base_seed(cfg.seed, attempt);
    const std::size_t range = m - cfg.w + 1;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto lh = layer_hash(pairs[i].hash, base_index, seed);
      rows[i] = sorted_row{start_slot(lh, range), lh, pairs[i]};
    }
    std::sort(rows.begin(), rows.end(), construction_order);

    banded_system sys(m, cfg.w);
    bool ok = true;
    for (const auto& r : rows) {
      const row eq{r.start, coefficient_word(r.lhash, cfg.w), static_cast<std::uint16_t>(r.kv.value & cfg.value_mask())};
      if (sys.insert(eq).status == insert_status::failure) {
        ok = false;
        break;
      }
    }
    if (stats) stats->base_attempts = attempt + 1;
    if (ok) {
      base_layer base{seed, solution_table(m, cfg.r)};
      sys.back_substitute(base.table.mutable_slots(), 0, m);
      return base;
    }
    m = static_cast<std::size_t>(std::ceil(static_cast<double>(m) * cfg.base_growth));
  }
  throw construction_error("base layer (layer " + std::to_string(base_index) + ") unsolvable after " +
                           std::to_string(cfg.max_base_attempts) + " attempts with " + std::to_string(pairs.size()) +
                           " keys; input likely holds equal keys with different values");
}

/// The queryable result. Holds no record of the construction thread count.
class retrieval_structure {
 public:
  retrieval_structure() = default;
  retrieval_structure(layer_config cfg, std::vector<layer> layers, base_layer base)
      : cfg_(cfg), layers_(std::move(layers)), base_(std::move(base)) {}

  [[nodiscard]] const layer_config& config() const noexcept { return cfg_; }
  [[nodiscard]] const std::vector<layer>& layers() const noexcept { return layers_; }
  [[nodiscard]] const base_layer& base() const noexcept { return base_; }
  [[nodiscard]] std::uint64_t global_seed() const noexcept { return cfg_.seed; }

  [[nodiscard]] master_hash hash(std::string_view key) const noexcept { return hash_key(key, cfg_.seed); }
  [[nodiscard]] master_hash hash(std::uint64_t key) const noexcept { return hash_key(key, cfg_.seed); }

  /// Index of the layer answering h (layers().size() means the base).
  [[nodiscard]] std::size_t answering_layer(master_hash h) const noexcept {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const layer& l = layers_[i];
      const auto lh = layer_hash(h, static_cast<unsigned>(i), l.seed);
      const auto addr = make_row_address(lh, l.num_buckets, cfg_.b);
      if (!is_bumped(addr.offset, l.thresholds.lookup(addr.bucket))) return i;
    }
    return layers_.size();
  }

  [[nodiscard]] std::uint16_t query_hash(master_hash h) const noexcept {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const layer& l = layers_[i];
      const auto lh = layer_hash(h, static_cast<unsigned>(i), l.seed);
      const auto addr = make_row_address(lh, l.num_buckets, cfg_.b);
      if (is_bumped(addr.offset, l.thresholds.lookup(addr.bucket))) continue;
      return query_dot(l.table, addr.start, coefficient_word(lh, cfg_.w));
    }
    const auto lh = layer_hash(h, static_cast<unsigned>(layers_.size()), base_.seed);
    const std::size_t start = start_slot(lh, base_.slots() - cfg_.w + 1);
    return query_dot(base_.table, start, coefficient_word(lh, cfg_.w));
  }

  template <class Key>
  [[nodiscard]] std::uint16_t query(const Key& key) const noexcept {
    return query_hash(hash(key));
  }

  friend bool operator==(const retrieval_structure& a, const retrieval_structure& b) {
    return a.cfg_.r == b.cfg_.r && a.cfg_.w == b.cfg_.w && a.cfg_.b == b.cfg_.b && a.cfg_.overload == b.cfg_.overload &&
           a.cfg_.mode == b.cfg_.mode && a.cfg_.layers == b.cfg_.layers && a.cfg_.seed == b.cfg_.seed &&
           a.layers_ == b.layers_ && a.base_ == b.base_;
  }

 private:
  layer_config cfg_;
  std::vector<layer> layers_;
  base_layer base_;
};

/// Builds all bumping layers (parallel per plan) and the base layer.
/// Deterministic for fixed (pairs, cfg, plan).
inline retrieval_structure construct(std::span<const key_value> pairs, const layer_config& cfg,
                                     const thread_plan& plan = {}, build_stats* stats = nullptr) {
  cfg.validate();
  plan.validate();
  std::vector<layer> layers;
  layers.reserve(cfg.layers);
  std::vector<key_value> remaining;
  std::span<const key_value> current = pairs;
  for (unsigned i = 0; i < cfg.layers; ++i) {
    auto res = construct_layer_parallel(current, cfg, i, plan, stats);
    if (stats) stats->bumped_per_layer.push_back(res.bumped.size());
    layers.push_back(std::move(res.built));
    remaining = std::move(res.bumped);
    current = remaining;
  }
  const auto t0 = detail::clock::now();
  base_layer base = construct_base(current, cfg, stats);
  if (stats) stats->insert_seconds += detail::seconds_since(t0);
  return retrieval_structure(cfg, std::move(layers), std::move(base));
}

/// Hashes keys with the configured global seed and pairs them with values.
template <class Key>
std::vector<key_value> make_pairs(std::span<const Key> keys, std::span<const std::uint16_t> values,
                                  const layer_config& cfg) {
  std::vector<key_value> pairs(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    pairs[i] = key_value{hash_key(keys[i], cfg.seed), static_cast<std::uint16_t>(values[i] & cfg.value_mask())};
  }
  return pairs;
}

}  // namespace burr
