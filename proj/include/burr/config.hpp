#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace burr {

/// Raised when the non-bumping base layer cannot be solved within its retry budget.
class construction_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by configuration validation.
class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class threshold_mode : std::uint8_t { uncompressed = 0, two_bit = 1, one_plus_bit = 2 };

enum class cut_strategy : std::uint8_t { nosearch = 0, minbump = 1, maxprev = 2, diff = 3 };

inline constexpr std::string_view to_string(threshold_mode m) noexcept {
  switch (m) {
    case threshold_mode::uncompressed: return "uncompressed";
    case threshold_mode::two_bit: return "2bit";
    case threshold_mode::one_plus_bit: return "1plus";
  }
  return "?";
}

inline constexpr std::string_view to_string(cut_strategy s) noexcept {
  switch (s) {
    case cut_strategy::nosearch: return "nosearch";
    case cut_strategy::minbump: return "minbump";
    case cut_strategy::maxprev: return "maxprev";
    case cut_strategy::diff: return "diff";
  }
  return "?";
}

inline std::optional<threshold_mode> parse_threshold_mode(std::string_view s) noexcept {
  if (s == "uncompressed") return threshold_mode::uncompressed;
  if (s == "2bit") return threshold_mode::two_bit;
  if (s == "1plus") return threshold_mode::one_plus_bit;
  return std::nullopt;
}

inline std::optional<cut_strategy> parse_cut_strategy(std::string_view s) noexcept {
  if (s == "nosearch") return cut_strategy::nosearch;
  if (s == "minbump") return cut_strategy::minbump;
  if (s == "maxprev") return cut_strategy::maxprev;
  if (s == "diff") return cut_strategy::diff;
  return std::nullopt;
}

/// Tunables that shape the stored structure. Everything here is serialized;
/// nothing about how many threads built it is.
struct layer_config {
  unsigned r = 8;            // bits per stored value, 1..16
  unsigned w = 64;           // ribbon width: 16, 32 or 64
  unsigned b = 128;          // bucket size in slots
  double overload = 0.05;    // expected keys per bucket = b * (1 + overload)
  threshold_mode mode = threshold_mode::one_plus_bit;
  unsigned layers = 4;       // bumping layers before the base layer
  double base_slack = 0.10;
  double base_growth = 1.25;
  unsigned max_base_attempts = 8;
  std::uint64_t seed = 0x5eed'b0bb'1e5f'0001ULL;

  void validate() const {
    if (r < 1 || r > 16) throw config_error("r must be in [1, 16], got " + std::to_string(r));
    if (w != 16 && w != 32 && w != 64) throw config_error("w must be 16, 32 or 64, got " + std::to_string(w));
    if (b < w) throw config_error("bucket size b must be >= w");
    if (b > 255) throw config_error("bucket size b must be <= 255 (8-bit threshold codes)");
    if (!(overload >= 0.0)) throw config_error("overload must be >= 0");
    if (layers < 1 || layers > 255) throw config_error("layers must be in [1, 255]");
    if (!(base_slack >= 0.0)) throw config_error("base_slack must be >= 0");
    if (!(base_growth > 1.0)) throw config_error("base_growth must be > 1");
    if (max_base_attempts < 1) throw config_error("max_base_attempts must be >= 1");
  }

  [[nodiscard]] std::uint16_t value_mask() const noexcept {
    return static_cast<std::uint16_t>((1u << r) - 1u);
  }
};

/// How construction is spread over threads. Not part of the stored structure.
struct thread_plan {
  unsigned threads = 1;
  std::size_t minbpt = 1000;  // minimum buckets per thread
  cut_strategy strategy = cut_strategy::nosearch;
  std::size_t search_range = 50;

  void validate() const {
    if (threads < 1) throw config_error("threads must be >= 1");
    if (minbpt < 1) throw config_error("minbpt must be >= 1");
  }
};

}  // namespace burr
