// Static string -> small integer map: store a 4-bit category per word and
// read it back; a saved copy answers identically.

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "burr/burr.hpp"

int main() {
  std::vector<std::string> words;
  std::vector<std::uint16_t> category;
  for (int i = 0; i < 50'000; ++i) {
    words.push_back("word-" + std::to_string(i));
    category.push_back(static_cast<std::uint16_t>(i % 13));
  }

  burr::layer_config cfg;
  cfg.r = 4;
  cfg.mode = burr::threshold_mode::two_bit;
  const std::vector<std::string_view> views(words.begin(), words.end());
  const auto pairs = burr::make_pairs<std::string_view>(views, category, cfg);
  const auto map = burr::construct(pairs, cfg, burr::thread_plan{2, 100});

  const auto copy = burr::deserialize(burr::serialize(map));
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    wrong += map.query(std::string_view(words[i])) != category[i];
    wrong += copy.query(std::string_view(words[i])) != category[i];
  }
  std::printf("%s -> %u\n", words[1234].c_str(), map.query(std::string_view(words[1234])));
  std::printf("wrong answers: %zu, %.2f bits/key\n", wrong,
              8.0 * burr::structural_bytes(map) / static_cast<double>(words.size()));
  return wrong == 0 ? 0 : 1;
}
