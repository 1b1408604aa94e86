// Builds an 8-bit fingerprint filter over a million synthetic keys with four
// threads, then probes members and non-members.

#include <cstdio>

#include "burr/burr.hpp"

int main() {
  burr::layer_config cfg;
  cfg.r = 8;
  const burr::thread_plan plan{4, 1000, burr::cut_strategy::maxprev, 50};

  const auto keys = burr::synthetic_keys(1'000'000, 42);
  const auto filter = burr::build_filter<std::uint64_t>(keys, cfg, plan);

  std::size_t members = 0;
  for (auto k : keys) members += filter.may_contain(k);

  const auto others = burr::synthetic_keys(1'000'000, 42, keys.size());
  std::size_t false_pos = 0;
  for (auto k : others) false_pos += filter.may_contain(k);

  const auto bytes = burr::structural_bytes(filter.structure());
  std::printf("members found      %zu / %zu\n", members, keys.size());
  std::printf("false positives    %zu / %zu (%.4f%%)\n", false_pos, others.size(), 100.0 * false_pos / others.size());
  std::printf("space              %.3f bits/key (%.4f x r)\n", 8.0 * bytes / keys.size(),
              8.0 * bytes / keys.size() / cfg.r);
  return members == keys.size() ? 0 : 1;
}
