#pragma once

// One bumping layer: sizing, addressing + ordering of the layer's rows, and
// the bucket loop that inserts rows and bumps bucket suffixes on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "burr/config.hpp"
#include "burr/hashing.hpp"
#include "burr/ribbon_solver.hpp"
#include "burr/threshold_store.hpp"

namespace burr {

struct key_value {
  master_hash hash = 0;
  std::uint16_t value = 0;
  friend bool operator==(const key_value&, const key_value&) = default;
};

struct layer {
  std::size_t num_buckets = 1;
  std::uint32_t seed = 0;
  solution_table table;
  threshold_store thresholds;

  [[nodiscard]] std::size_t slots() const noexcept { return table.size(); }
  friend bool operator==(const layer&, const layer&) = default;
};

/// bucket -> forced threshold (upper bound on the bucket's threshold)
using forced_thresholds = std::map<std::size_t, unsigned>;

/// Wall-clock split of construction, summed over layers.
struct build_stats {
  double sort_seconds = 0;
  double insert_seconds = 0;
  double backsub_seconds = 0;
  std::vector<std::size_t> bumped_per_layer;
  std::vector<unsigned> threads_per_layer;
  std::vector<std::vector<std::size_t>> cuts_per_layer;
  unsigned base_attempts = 0;
  /// Test hook: called per bumping layer after insertion, before back substitution.
  std::function<void(const banded_system&, std::span<const std::size_t> cuts)> on_layer_inserted;
};

struct layer_result {
  layer built;
  std::vector<key_value> bumped;
};

inline std::size_t size_layer(std::size_t n_keys, const layer_config& cfg) noexcept {
  const double per_bucket = static_cast<double>(cfg.b) * (1.0 + cfg.overload);
  const auto nb = static_cast<std::size_t>(std::llround(static_cast<double>(n_keys) / per_bucket));
  return std::max<std::size_t>(1, nb);
}

inline std::size_t layer_slots(std::size_t num_buckets, const layer_config& cfg) noexcept {
  return num_buckets * cfg.b + cfg.w - 1;
}

inline std::uint32_t derive_layer_seed(std::uint64_t global_seed, unsigned layer_index) noexcept {
  return static_cast<std::uint32_t>(detail::fmix64(global_seed ^ ((layer_index + 1ull) * detail::k_golden)));
}

namespace detail {

using clock = std::chrono::steady_clock;

inline double seconds_since(clock::time_point t0) {
  return std::chrono::duration<double>(clock::now() - t0).count();
}

/// Runs fn(p) for p in [0, parts) on parts threads (inline when parts == 1).
/// The first exception thrown by any worker is rethrown after all have joined.
template <class Fn>
void run_parallel(unsigned parts, Fn&& fn) {
  if (parts <= 1) {
    fn(0u);
    return;
  }
  std::vector<std::exception_ptr> errors(parts);
  {
    std::vector<std::jthread> workers;
    workers.reserve(parts - 1);
    for (unsigned p = 1; p < parts; ++p) {
      workers.emplace_back([&fn, &errors, p] {
        try {
          fn(p);
        } catch (...) {
          errors[p] = std::current_exception();
        }
      });
    }
    try {
      fn(0u);
    } catch (...) {
      errors[0] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline std::pair<std::size_t, std::size_t> chunk(std::size_t n, unsigned parts, unsigned p) noexcept {
  return {n * p / parts, n * (p + 1) / parts};
}

}  // namespace detail

/// A row of the layer in construction order.
struct sorted_row {
  std::size_t start;
  std::uint64_t lhash;
  key_value kv;
};

inline bool construction_order(const sorted_row& a, const sorted_row& b) noexcept {
  if (a.start != b.start) return a.start < b.start;
  if (a.kv.hash != b.kv.hash) return a.kv.hash < b.kv.hash;
  return a.kv.value < b.kv.value;
}

/// Addresses every pair in the layer and orders the rows by (start, master
/// hash, value). Distributes by bucket, then sorts each bucket; the result is
/// identical for any thread count.
inline std::vector<sorted_row> address_and_sort(std::span<const key_value> pairs, std::size_t num_buckets,
                                                const layer_config& cfg, unsigned layer_index,
                                                std::uint32_t layer_seed, unsigned threads) {
  const std::size_t n = pairs.size();
  const unsigned parts = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(threads, n)));
  std::vector<sorted_row> out(n);
  if (n == 0) return out;

  std::vector<std::vector<std::uint32_t>> counts(parts, std::vector<std::uint32_t>(num_buckets, 0));
  detail::run_parallel(parts, [&](unsigned p) {
    const auto [lo, hi] = detail::chunk(n, parts, p);
    auto& cnt = counts[p];
    for (std::size_t i = lo; i < hi; ++i) {
      const auto lh = layer_hash(pairs[i].hash, layer_index, layer_seed);
      ++cnt[make_row_address(lh, num_buckets, cfg.b).bucket];
    }
  });

  // bucket_begin[k] = first output index of bucket k
  std::vector<std::size_t> bucket_begin(num_buckets + 1, 0);
  {
    std::size_t pos = 0;
    for (std::size_t k = 0; k < num_buckets; ++k) {
      bucket_begin[k] = pos;
      for (unsigned p = 0; p < parts; ++p) {
        const std::uint32_t c = counts[p][k];
        counts[p][k] = static_cast<std::uint32_t>(pos - bucket_begin[k]);  // per-thread offset within bucket
        pos += c;
      }
    }
    bucket_begin[num_buckets] = pos;
  }

  detail::run_parallel(parts, [&](unsigned p) {
    const auto [lo, hi] = detail::chunk(n, parts, p);
    auto& off = counts[p];
    for (std::size_t i = lo; i < hi; ++i) {
      const auto lh = layer_hash(pairs[i].hash, layer_index, layer_seed);
      const auto addr = make_row_address(lh, num_buckets, cfg.b);
      out[bucket_begin[addr.bucket] + off[addr.bucket]++] = sorted_row{addr.start, lh, pairs[i]};
    }
  });

  detail::run_parallel(parts, [&](unsigned p) {
    const auto [blo, bhi] = detail::chunk(num_buckets, parts, p);
    for (std::size_t k = blo; k < bhi; ++k) {
      std::sort(out.begin() + static_cast<std::ptrdiff_t>(bucket_begin[k]),
                out.begin() + static_cast<std::ptrdiff_t>(bucket_begin[k + 1]), construction_order);
    }
  });
  return out;
}

namespace detail {

struct partition_output {
  std::vector<std::pair<std::size_t, unsigned>> thresholds;  // (bucket, t) with t < b
  std::vector<key_value> bumped;
};

/// Bucket loop over `rows`, which must hold exactly the rows of a contiguous
/// bucket range in construction order. Buckets ascend, offsets ascend within
/// a bucket; a failure at offset o bumps the bucket suffix from quantize(o).
inline void insert_buckets(banded_system& sys, std::span<const sorted_row> rows, const layer_config& cfg,
                           const threshold_store& quantizer, const forced_thresholds& forced,
                           partition_output& out) {
  const unsigned b = cfg.b;
  bucket_journal journal;
  std::size_t i = 0;
  while (i < rows.size()) {
    const std::size_t bucket = rows[i].start / b;
    const std::size_t bucket_start = bucket * b;
    std::size_t end = i;
    while (end < rows.size() && rows[end].start / b == bucket) ++end;

    unsigned cap = b;
    if (auto it = forced.find(bucket); it != forced.end()) cap = quantizer.quantize(std::min(b, it->second));

    journal.clear();
    unsigned t = b;
    for (std::size_t k = i; k < end; ++k) {
      const auto off = static_cast<unsigned>(rows[k].start - bucket_start);
      if (off >= cap) {
        t = cap;
        break;
      }
      const row eq{rows[k].start, coefficient_word(rows[k].lhash, cfg.w),
                   static_cast<std::uint16_t>(rows[k].kv.value & cfg.value_mask())};
      if (sys.insert(eq, journal, off).status == insert_status::failure) {
        t = quantizer.quantize(off);
        sys.uninstall_from(journal, t);
        break;
      }
    }
    if (t < b) {
      out.thresholds.emplace_back(bucket, t);
      for (std::size_t k = i; k < end; ++k) {
        if (is_bumped(static_cast<unsigned>(rows[k].start - bucket_start), t)) out.bumped.push_back(rows[k].kv);
      }
    }
    i = end;
  }
}

}  // namespace detail

/// Single-threaded construction of bumping layer `layer_index`.
inline layer_result construct_layer_sequential(std::span<const key_value> pairs, const layer_config& cfg,
                                               unsigned layer_index, const forced_thresholds& forced = {},
                                               build_stats* stats = nullptr) {
  const std::size_t nb = size_layer(pairs.size(), cfg);
  const std::uint32_t seed = derive_layer_seed(cfg.seed, layer_index);
  const std::size_t m = layer_slots(nb, cfg);

  auto t0 = detail::clock::now();
  const auto rows = address_and_sort(pairs, nb, cfg, layer_index, seed, 1);
  if (stats) stats->sort_seconds += detail::seconds_since(t0);

  t0 = detail::clock::now();
  layer_result res;
  res.built.num_buckets = nb;
  res.built.seed = seed;
  res.built.thresholds = threshold_store(cfg.mode, cfg.b, cfg.w, nb);
  banded_system sys(m, cfg.w);
  detail::partition_output out;
  detail::insert_buckets(sys, rows, cfg, res.built.thresholds, forced, out);
  for (const auto& [bucket, t] : out.thresholds) res.built.thresholds.set(bucket, t);
  res.bumped = std::move(out.bumped);
  if (stats) {
    stats->insert_seconds += detail::seconds_since(t0);
    if (stats->on_layer_inserted) stats->on_layer_inserted(sys, {});
  }

  t0 = detail::clock::now();
  res.built.table = solution_table(m, cfg.r);
  sys.back_substitute(res.built.table.mutable_slots(), 0, m);
  if (stats) stats->backsub_seconds += detail::seconds_since(t0);
  return res;
}

}  // namespace burr
