#pragma once

// Parallel construction of one bumping layer. The bucket range is cut into
// one partition per thread; the last bucket before every cut gets a forced
// threshold b - w + 1, so no kept row's window crosses a cut slot c * b and
// the partitions' equation systems are independent. Queries never see this:
// the forced bumps are ordinary thresholds.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ranges>
#include <span>
#include <vector>

#include "burr/config.hpp"
#include "burr/layer.hpp"

namespace burr {

/// min(threads, max(1, floor(num_buckets / minbpt)))
constexpr unsigned effective_threads(std::size_t num_buckets, unsigned threads, std::size_t minbpt) noexcept {
  const std::size_t by_size = std::max<std::size_t>(1, num_buckets / std::max<std::size_t>(1, minbpt));
  return static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), by_size));
}

struct cut_metrics_t {
  std::size_t directly_bumped = 0;  // starts in [c*b - (w-1), c*b - 1]
  std::size_t prev_window = 0;      // starts in [c*b - 2(w-1), c*b - w]
  friend constexpr bool operator==(const cut_metrics_t&, const cut_metrics_t&) = default;
};

namespace detail {

template <class R, class Proj>
std::size_t count_starts(const R& sorted, Proj proj, std::size_t lo, std::size_t hi_inclusive) {
  if (hi_inclusive < lo) return 0;
  const auto first = std::ranges::lower_bound(sorted, lo, {}, proj);
  const auto last = std::ranges::upper_bound(sorted, hi_inclusive, {}, proj);
  return static_cast<std::size_t>(last - first);
}

}  // namespace detail

/// Window counts around candidate cut bucket c (c >= 1). directly_bumped is
/// what a cut at c forces out of the layer; prev_window counts the kept keys
/// whose windows reach into the gap that those bumps leave.
template <std::ranges::random_access_range R, class Proj = std::identity>
cut_metrics_t cut_metrics(const R& sorted_starts, std::size_t c, unsigned w, unsigned b, Proj proj = {}) {
  cut_metrics_t m;
  const std::size_t boundary = c * b;
  const std::size_t span = w - 1;
  if (boundary == 0) return m;
  const std::size_t gap_lo = boundary > span ? boundary - span : 0;
  m.directly_bumped = detail::count_starts(sorted_starts, proj, gap_lo, boundary - 1);
  if (gap_lo > 0) {
    const std::size_t prev_lo = gap_lo > span ? gap_lo - span : 0;
    m.prev_window = detail::count_starts(sorted_starts, proj, prev_lo, gap_lo - 1);
  }
  return m;
}

/// Cut bucket indices (P - 1 of them, strictly increasing, each partition
/// keeping at least max(1, minbpt) buckets whenever P > 1).
template <std::ranges::random_access_range R, class Proj = std::identity>
std::vector<std::size_t> plan_cuts(const R& sorted_starts, std::size_t num_buckets, unsigned parts,
                                   cut_strategy strategy, std::size_t search_range, unsigned w, unsigned b,
                                   std::size_t minbpt = 1, Proj proj = {}) {
  std::vector<std::size_t> cuts;
  if (parts <= 1 || num_buckets < 2) return cuts;
  const std::size_t min_part = std::max<std::size_t>(1, std::min(minbpt, num_buckets / parts));
  cuts.reserve(parts - 1);
  std::size_t prev = 0;
  for (unsigned p = 1; p < parts; ++p) {
    // round(p * nb / P)
    const std::size_t home = (2 * p * num_buckets + parts) / (2 * parts);
    if (strategy == cut_strategy::nosearch) {
      cuts.push_back(home);
      prev = home;
      continue;
    }
    const std::size_t upper_limit = num_buckets - (parts - p) * min_part;
    const std::size_t lo = std::max({home > search_range ? home - search_range : 0, prev + min_part, std::size_t{1}});
    std::size_t hi = std::min(home + search_range, upper_limit);
    if (hi < lo) hi = lo;

    std::size_t best = lo;
    long long best_score = 0;
    bool have = false;
    for (std::size_t c = lo; c <= hi; ++c) {
      const auto m = cut_metrics(sorted_starts, c, w, b, proj);
      const auto bumped = static_cast<long long>(m.directly_bumped);
      const auto prevw = static_cast<long long>(m.prev_window);
      long long score = 0;  // lower is better
      switch (strategy) {
        case cut_strategy::minbump: score = bumped; break;
        case cut_strategy::maxprev: score = -prevw; break;
        case cut_strategy::diff: score = bumped > prevw ? bumped - prevw : prevw - bumped; break;
        case cut_strategy::nosearch: break;
      }
      const auto dist = [home](std::size_t x) { return x > home ? x - home : home - x; };
      if (!have || score < best_score || (score == best_score && dist(c) < dist(best))) {
        best = c;
        best_score = score;
        have = true;
      }
    }
    cuts.push_back(best);
    prev = best;
  }
  return cuts;
}

/// Bucket c - 1 of every cut c is capped at b - w + 1: its keys from that
/// offset on would have windows reaching slot c * b.
inline forced_thresholds forced_boundary_thresholds(std::span<const std::size_t> cuts, unsigned w, unsigned b) {
  forced_thresholds forced;
  for (std::size_t c : cuts) {
    if (c > 0) forced[c - 1] = b - w + 1;
  }
  return forced;
}

/// Layer construction with up to plan.threads partitions. With one
/// effective thread this is exactly construct_layer_sequential.
inline layer_result construct_layer_parallel(std::span<const key_value> pairs, const layer_config& cfg,
                                             unsigned layer_index, const thread_plan& plan,
                                             build_stats* stats = nullptr) {
  const std::size_t nb = size_layer(pairs.size(), cfg);
  const std::uint32_t seed = derive_layer_seed(cfg.seed, layer_index);
  const std::size_t m = layer_slots(nb, cfg);
  const unsigned parts = effective_threads(nb, plan.threads, plan.minbpt);

  auto t0 = detail::clock::now();
  const auto rows = address_and_sort(pairs, nb, cfg, layer_index, seed, parts);
  if (stats) stats->sort_seconds += detail::seconds_since(t0);

  t0 = detail::clock::now();
  const auto cuts = plan_cuts(rows, nb, parts, plan.strategy, plan.search_range, cfg.w, cfg.b, plan.minbpt,
                              &sorted_row::start);
  const auto forced = forced_boundary_thresholds(cuts, cfg.w, cfg.b);

  // partition p owns buckets [bucket_cut[p], bucket_cut[p+1])
  std::vector<std::size_t> bucket_cut{0};
  bucket_cut.insert(bucket_cut.end(), cuts.begin(), cuts.end());
  bucket_cut.push_back(nb);
  std::vector<std::size_t> row_cut(parts + 1);
  for (unsigned p = 0; p <= parts; ++p) {
    row_cut[p] = static_cast<std::size_t>(
        std::ranges::lower_bound(rows, bucket_cut[p] * cfg.b, {}, &sorted_row::start) - rows.begin());
  }

  layer_result res;
  res.built.num_buckets = nb;
  res.built.seed = seed;
  res.built.thresholds = threshold_store(cfg.mode, cfg.b, cfg.w, nb);
  banded_system sys(m, cfg.w);
  std::vector<detail::partition_output> outputs(parts);
  const std::span<const sorted_row> all_rows(rows);
  detail::run_parallel(parts, [&](unsigned p) {
    detail::insert_buckets(sys, all_rows.subspan(row_cut[p], row_cut[p + 1] - row_cut[p]), cfg, res.built.thresholds,
                           forced, outputs[p]);
  });
  for (const auto& out : outputs) {
    for (const auto& [bucket, t] : out.thresholds) res.built.thresholds.set(bucket, t);
  }
  std::size_t total_bumped = 0;
  for (const auto& out : outputs) total_bumped += out.bumped.size();
  res.bumped.reserve(total_bumped);
  for (auto& out : outputs) res.bumped.insert(res.bumped.end(), out.bumped.begin(), out.bumped.end());
  if (stats) {
    stats->insert_seconds += detail::seconds_since(t0);
    if (stats->on_layer_inserted) stats->on_layer_inserted(sys, cuts);
  }

  t0 = detail::clock::now();
  res.built.table = solution_table(m, cfg.r);
  const auto z = res.built.table.mutable_slots();
  detail::run_parallel(parts, [&](unsigned p) {
    const std::size_t lo = bucket_cut[p] * cfg.b;
    const std::size_t hi = p + 1 == parts ? m : bucket_cut[p + 1] * cfg.b;
    sys.back_substitute(z, lo, hi);
  });
  if (stats) {
    stats->backsub_seconds += detail::seconds_since(t0);
    stats->threads_per_layer.push_back(parts);
    stats->cuts_per_layer.push_back(cuts);
  }
  return res;
}

}  // namespace burr
