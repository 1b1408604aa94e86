#pragma once

// Space and time measurement harness: structural byte counts, per-thread
// space overhead, and CSV emitters for the construction, strategy and filter
// benchmarks.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "burr/config.hpp"
#include "burr/filter.hpp"
#include "burr/hashing.hpp"
#include "burr/layered_structure.hpp"

namespace burr {

/// Solution tables + threshold codes + accounted exception entries; headers excluded.
inline std::size_t structural_bytes(const retrieval_structure& s) noexcept {
  std::size_t total = s.base().table.packed_bytes();
  for (const layer& l : s.layers()) total += l.table.packed_bytes() + l.thresholds.bytes();
  return total;
}

/// Distinct synthetic 64-bit keys: counters in [first, first + n) mixed with the run seed.
inline std::vector<std::uint64_t> synthetic_keys(std::size_t n, std::uint64_t run_seed, std::uint64_t first = 0) {
  std::vector<std::uint64_t> keys(n);
  const std::uint64_t salt = detail::fmix64(run_seed ^ detail::k_golden);
  for (std::size_t i = 0; i < n; ++i) keys[i] = detail::fmix64((first + i) ^ salt);
  return keys;
}

inline std::vector<master_hash> hash_all(std::span<const std::uint64_t> keys, std::uint64_t seed) {
  std::vector<master_hash> h(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) h[i] = hash_key(keys[i], seed);
  return h;
}

/// (bytes(T threads) - bytes(1 thread)) / (T - 1) for one fixed filter input.
inline double overhead_per_additional_thread(std::span<const master_hash> hashes, const layer_config& cfg,
                                             const thread_plan& plan, std::size_t one_thread_bytes) {
  if (plan.threads < 2) return 0.0;
  const auto s = build_filter_from_hashes(hashes, cfg, plan);
  return (static_cast<double>(structural_bytes(s.structure())) - static_cast<double>(one_thread_bytes)) /
         static_cast<double>(plan.threads - 1);
}

inline double overhead_per_additional_thread(std::span<const master_hash> hashes, const layer_config& cfg,
                                             const thread_plan& plan) {
  thread_plan single = plan;
  single.threads = 1;
  const auto base = structural_bytes(build_filter_from_hashes(hashes, cfg, single).structure());
  return overhead_per_additional_thread(hashes, cfg, plan, base);
}

inline double overhead_per_additional_thread(std::size_t n, const layer_config& cfg, const thread_plan& plan) {
  const auto hashes = hash_all(synthetic_keys(n, cfg.seed), cfg.seed);
  return overhead_per_additional_thread(hashes, cfg, plan);
}

struct bench_record {
  std::size_t n = 0;
  unsigned threads = 1;
  std::size_t minbpt = 0;
  threshold_mode mode = threshold_mode::one_plus_bit;
  cut_strategy strategy = cut_strategy::nosearch;
  std::size_t search_range = 0;
  std::uint64_t seed = 0;
  unsigned repeat = 0;
  double sort_seconds = 0;
  double insert_seconds = 0;
  double backsub_seconds = 0;
  double total_seconds = 0;
  std::size_t structural_bytes = 0;
  std::vector<std::size_t> bumped_per_layer;
  double fp_rate = -1;  // < 0: not measured

  static std::string csv_header() {
    return "n,threads,minbpt,mode,strategy,search_range,seed,repeat,sort_seconds,insert_seconds,backsub_seconds,"
           "total_seconds,structural_bytes,bits_per_key,bumped_per_layer,fp_rate";
  }

  [[nodiscard]] std::string csv_row() const {
    std::ostringstream os;
    os.precision(9);
    os << n << ',' << threads << ',' << minbpt << ',' << to_string(mode) << ',' << to_string(strategy) << ','
       << search_range << ',' << seed << ',' << repeat << ',' << sort_seconds << ',' << insert_seconds << ','
       << backsub_seconds << ',' << total_seconds << ',' << structural_bytes << ','
       << (n ? 8.0 * static_cast<double>(structural_bytes) / static_cast<double>(n) : 0.0) << ',';
    for (std::size_t i = 0; i < bumped_per_layer.size(); ++i) os << (i ? ";" : "") << bumped_per_layer[i];
    os << ',';
    if (fp_rate >= 0) os << fp_rate;
    return os.str();
  }
};

/// Builds an r-bit filter over synthetic keys once and times it.
inline bench_record timed_filter_build(std::span<const master_hash> hashes, const layer_config& cfg,
                                       const thread_plan& plan, ribbon_filter* out = nullptr) {
  build_stats stats;
  const auto t0 = std::chrono::steady_clock::now();
  auto filter = build_filter_from_hashes(hashes, cfg, plan, &stats);
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  bench_record rec;
  rec.n = hashes.size();
  rec.threads = plan.threads;
  rec.minbpt = plan.minbpt;
  rec.mode = cfg.mode;
  rec.strategy = plan.strategy;
  rec.search_range = plan.search_range;
  rec.seed = cfg.seed;
  rec.sort_seconds = stats.sort_seconds;
  rec.insert_seconds = stats.insert_seconds;
  rec.backsub_seconds = stats.backsub_seconds;
  rec.total_seconds = total;
  rec.structural_bytes = structural_bytes(filter.structure());
  rec.bumped_per_layer = stats.bumped_per_layer;
  if (out) *out = std::move(filter);
  return rec;
}

/// One CSV row per (thread count, repeat).
inline std::vector<bench_record> bench_construct(std::size_t n, std::span<const unsigned> threads_list,
                                                 unsigned repeats, const layer_config& cfg, const thread_plan& plan,
                                                 std::ostream& csv) {
  const auto hashes = hash_all(synthetic_keys(n, cfg.seed), cfg.seed);
  std::vector<bench_record> records;
  csv << bench_record::csv_header() << '\n';
  for (unsigned t : threads_list) {
    thread_plan p = plan;
    p.threads = t;
    for (unsigned rep = 0; rep < repeats; ++rep) {
      auto rec = timed_filter_build(hashes, cfg, p);
      rec.repeat = rep;
      csv << rec.csv_row() << '\n';
      records.push_back(std::move(rec));
    }
  }
  return records;
}

struct strategy_result {
  threshold_mode mode;
  cut_strategy strategy;
  double mean_overhead = 0;
  std::vector<double> per_seed;
};

/// Mean per-thread overhead for every (mode, strategy), over `seeds` runs.
/// The single-thread reference build is shared by all strategies of a seed.
inline std::vector<strategy_result> bench_strategies(std::size_t n, unsigned threads, std::size_t minbpt,
                                                     std::size_t search_range, std::span<const threshold_mode> modes,
                                                     std::span<const cut_strategy> strategies, unsigned seeds,
                                                     const layer_config& base_cfg, std::ostream& csv) {
  std::vector<strategy_result> results;
  for (threshold_mode mode : modes) {
    for (cut_strategy st : strategies) results.push_back({mode, st, 0, {}});
  }
  for (unsigned s = 0; s < seeds; ++s) {
    layer_config cfg = base_cfg;
    cfg.seed = base_cfg.seed + s;
    const auto hashes = hash_all(synthetic_keys(n, cfg.seed), cfg.seed);
    for (threshold_mode mode : modes) {
      cfg.mode = mode;
      thread_plan single{1, minbpt, cut_strategy::nosearch, search_range};
      const auto reference = structural_bytes(build_filter_from_hashes(hashes, cfg, single).structure());
      for (auto& res : results) {
        if (res.mode != mode) continue;
        const thread_plan plan{threads, minbpt, res.strategy, search_range};
        res.per_seed.push_back(overhead_per_additional_thread(hashes, cfg, plan, reference));
      }
    }
  }
  csv << "n,threads,minbpt,search_range,mode,strategy,seeds,mean_overhead_bytes,min_overhead_bytes,max_overhead_bytes\n";
  for (auto& res : results) {
    double lo = 0, hi = 0;
    if (!res.per_seed.empty()) {
      res.mean_overhead = std::accumulate(res.per_seed.begin(), res.per_seed.end(), 0.0) /
                          static_cast<double>(res.per_seed.size());
      lo = *std::min_element(res.per_seed.begin(), res.per_seed.end());
      hi = *std::max_element(res.per_seed.begin(), res.per_seed.end());
    }
    csv << n << ',' << threads << ',' << minbpt << ',' << search_range << ',' << to_string(res.mode) << ','
        << to_string(res.strategy) << ',' << seeds << ',' << res.mean_overhead << ',' << lo << ',' << hi << '\n';
  }
  return results;
}

struct filter_measurement {
  std::size_t false_negatives = 0;
  std::size_t false_positives = 0;
  std::size_t negatives = 0;
  [[nodiscard]] double fp_rate() const noexcept {
    return negatives ? static_cast<double>(false_positives) / static_cast<double>(negatives) : 0.0;
  }
};

/// Probes every build key and `negatives` keys drawn from a disjoint counter range.
inline filter_measurement measure_filter(const ribbon_filter& f, std::span<const master_hash> key_hashes,
                                         std::size_t negatives, std::uint64_t run_seed) {
  filter_measurement m;
  for (master_hash h : key_hashes) m.false_negatives += f.may_contain_hash(h) ? 0 : 1;
  const auto neg = synthetic_keys(negatives, run_seed, key_hashes.size());
  for (std::uint64_t k : neg) m.false_positives += f.may_contain(k) ? 1 : 0;
  m.negatives = negatives;
  return m;
}

inline bench_record bench_filter(std::size_t n, std::size_t negatives, const layer_config& cfg, const thread_plan& plan,
                                 std::ostream& csv, filter_measurement* measured = nullptr) {
  const auto hashes = hash_all(synthetic_keys(n, cfg.seed), cfg.seed);
  ribbon_filter f;
  auto rec = timed_filter_build(hashes, cfg, plan, &f);
  const auto m = measure_filter(f, hashes, negatives, cfg.seed);
  rec.fp_rate = m.fp_rate();
  csv << bench_record::csv_header() << ",false_negatives,negatives\n";
  csv << rec.csv_row() << ',' << m.false_negatives << ',' << m.negatives << '\n';
  if (measured) *measured = m;
  return rec;
}

}  // namespace burr
