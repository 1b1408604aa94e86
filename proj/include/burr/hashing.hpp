#pragma once

// Seeded key hashing and the per-layer derivations built on it: the start
// slot (spatial coupling), the w-bit coefficient word and the fingerprint.
// Each derivation is an independent remix of one 64-bit hash, so the streams
// are decorrelated from each other.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>

namespace burr {

using master_hash = std::uint64_t;

namespace detail {

inline constexpr std::uint64_t k_golden = 0x9e3779b97f4a7c15ULL;
inline constexpr std::uint64_t k_mul_a = 0xa0761d6478bd642fULL;
inline constexpr std::uint64_t k_mul_b = 0xe7037ed1a0b428dbULL;
inline constexpr std::uint64_t k_coeff_salt = 0x8ebc6af09c88c6e3ULL;
inline constexpr std::uint64_t k_fp_salt = 0x589965cc75374cc3ULL;
inline constexpr std::uint64_t k_layer_salt = 0x1d8e4e27c47d124fULL;

// murmur3 64-bit finalizer
constexpr std::uint64_t fmix64(std::uint64_t h) noexcept {
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return h;
}

constexpr std::uint64_t mum(std::uint64_t a, std::uint64_t b) noexcept {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  return static_cast<std::uint64_t>(p) ^ static_cast<std::uint64_t>(p >> 64);
}

inline std::uint64_t load_le(const unsigned char* p, std::size_t n) noexcept {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace detail

/// Keyed 64-bit hash of a byte string.
inline master_hash hash_bytes(std::span<const std::byte> key, std::uint64_t seed) noexcept {
  const auto* p = reinterpret_cast<const unsigned char*>(key.data());
  const std::size_t len = key.size();
  std::uint64_t h = detail::fmix64(seed ^ detail::k_golden) ^ (len * detail::k_mul_a);
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    h = detail::mum(detail::load_le(p + i, 8) ^ detail::k_mul_a, h ^ detail::k_mul_b);
  }
  if (i < len) {
    h = detail::mum(detail::load_le(p + i, len - i) ^ detail::k_mul_b, h ^ detail::k_mul_a);
  }
  return detail::fmix64(h ^ len ^ seed);
}

inline master_hash hash_key(std::string_view key, std::uint64_t seed) noexcept {
  return hash_bytes(std::as_bytes(std::span(key.data(), key.size())), seed);
}

/// Integer keys hash as their 8-byte little-endian rendering, so
/// hash_key(k, s) == hash_key(std::string_view(8 LE bytes of k), s).
inline master_hash hash_key(std::uint64_t key, std::uint64_t seed) noexcept {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(key >> (8 * i));
  return hash_bytes(std::as_bytes(std::span(buf)), seed);
}

/// Independent remix of a master hash for one layer.
constexpr std::uint64_t layer_hash(master_hash h, unsigned layer, std::uint32_t layer_seed) noexcept {
  const std::uint64_t tweak = ((static_cast<std::uint64_t>(layer_seed) << 32) | (layer + 1u)) * detail::k_layer_salt;
  return detail::fmix64(detail::fmix64(h ^ tweak) + detail::k_golden);
}

struct row_address {
  std::size_t start = 0;
  std::size_t bucket = 0;
  unsigned offset = 0;

  friend constexpr bool operator==(const row_address&, const row_address&) = default;
};

/// start = floor(h * num_buckets * b / 2^64); monotone in h.
constexpr row_address make_row_address(std::uint64_t h, std::size_t num_buckets, unsigned b) noexcept {
  const unsigned __int128 range = static_cast<unsigned __int128>(num_buckets) * b;
  const auto start = static_cast<std::size_t>((static_cast<unsigned __int128>(h) * range) >> 64);
  return {start, start / b, static_cast<unsigned>(start % b)};
}

/// Only the start slot, for callers without bucket geometry (the base layer).
constexpr std::size_t start_slot(std::uint64_t h, std::size_t range) noexcept {
  return static_cast<std::size_t>((static_cast<unsigned __int128>(h) * range) >> 64);
}

constexpr std::uint64_t width_mask(unsigned w) noexcept {
  return w >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << w) - 1);
}

/// w-bit coefficient word; bit j covers slot start + j and bit 0 is always set.
constexpr std::uint64_t coefficient_word(std::uint64_t h, unsigned w) noexcept {
  return (detail::fmix64(h ^ detail::k_coeff_salt) & width_mask(w)) | 1u;
}

constexpr std::uint16_t fingerprint(master_hash h, unsigned r) noexcept {
  return static_cast<std::uint16_t>(detail::fmix64(h + detail::k_fp_salt) >> (64 - r));
}

}  // namespace burr
