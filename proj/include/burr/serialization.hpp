#pragma once

// Structure file format. All integers little-endian, fixed width.
//
//   "BURR"  u32 version
//   config  u32 length(=40) u8 r u8 w u16 b f64 overload u8 mode u8 layers
//           u16 reserved(0) u64 seed f64 base_slack f64 base_growth
//           (max_base_attempts is construction-only and not stored)
//   per bumping layer:
//           u64 num_buckets u32 layer_seed
//           u64 n_code_bytes  codes[n_code_bytes]
//           u64 n_exceptions  { u32 bucket u8 threshold } sorted by bucket
//           u64 n_table_bytes table[n_table_bytes]   (r bits per slot, LSB first)
//   base:   u64 m_base u32 seed u64 n_table_bytes table[n_table_bytes]

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "burr/config.hpp"
#include "burr/layered_structure.hpp"

namespace burr {

class format_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t k_format_version = 1;
inline constexpr std::uint32_t k_config_block_bytes = 40;

/// r bits per slot, contiguous, LSB first; ceil(size * r / 8) bytes.
inline std::vector<std::uint8_t> pack_table(const solution_table& t) {
  const unsigned r = t.value_bits();
  std::vector<std::uint8_t> out(t.packed_bytes(), 0);
  std::size_t bit = 0;
  for (std::uint16_t v : t.slots()) {
    for (unsigned j = 0; j < r; ++j, ++bit) {
      if ((v >> j) & 1u) out[bit / 8] = static_cast<std::uint8_t>(out[bit / 8] | (1u << (bit % 8)));
    }
  }
  return out;
}

inline solution_table unpack_table(std::span<const std::uint8_t> bytes, std::size_t slots, unsigned r) {
  if (bytes.size() != (slots * r + 7) / 8) throw format_error("packed table has wrong length");
  std::vector<std::uint16_t> z(slots, 0);
  std::size_t bit = 0;
  for (std::size_t s = 0; s < slots; ++s) {
    std::uint16_t v = 0;
    for (unsigned j = 0; j < r; ++j, ++bit) v = static_cast<std::uint16_t>(v | (((bytes[bit / 8] >> (bit % 8)) & 1u) << j));
    z[s] = v;
  }
  return solution_table(std::move(z), r);
}

namespace detail {

class byte_writer {
 public:
  template <class T>
  void put(T v) {
    static_assert(std::is_integral_v<T>);
    for (std::size_t i = 0; i < sizeof(T); ++i) buf_.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(v) >> (8 * i)));
  }
  void put_f64(double d) { put(std::bit_cast<std::uint64_t>(d)); }
  void put_bytes(std::span<const std::uint8_t> bytes) { buf_.insert(buf_.end(), bytes.begin(), bytes.end()); }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class byte_reader {
 public:
  explicit byte_reader(std::span<const std::uint8_t> data) : data_(data) {}

  template <class T>
  T get(const char* what) {
    need(sizeof(T), what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }
  double get_f64(const char* what) { return std::bit_cast<double>(get<std::uint64_t>(what)); }
  std::span<const std::uint8_t> get_bytes(std::uint64_t n, const char* what) {
    need(n, what);
    auto s = data_.subspan(pos_, static_cast<std::size_t>(n));
    pos_ += static_cast<std::size_t>(n);
    return s;
  }
  [[nodiscard]] std::size_t remaining() const noexcept { return data_.size() - pos_; }

 private:
  void need(std::uint64_t n, const char* what) const {
    if (n > data_.size() - pos_) throw format_error(std::string("truncated structure file while reading ") + what);
  }
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<std::uint8_t> serialize(const retrieval_structure& s) {
  const layer_config& cfg = s.config();
  detail::byte_writer w;
  for (char c : std::string_view("BURR")) w.put(static_cast<std::uint8_t>(c));
  w.put<std::uint32_t>(k_format_version);
  w.put<std::uint32_t>(k_config_block_bytes);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(cfg.r));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(cfg.w));
  w.put<std::uint16_t>(static_cast<std::uint16_t>(cfg.b));
  w.put_f64(cfg.overload);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(cfg.mode));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(cfg.layers));
  w.put<std::uint16_t>(0);
  w.put<std::uint64_t>(cfg.seed);
  w.put_f64(cfg.base_slack);
  w.put_f64(cfg.base_growth);
  for (const layer& l : s.layers()) {
    w.put<std::uint64_t>(l.num_buckets);
    w.put<std::uint32_t>(l.seed);
    w.put<std::uint64_t>(l.thresholds.codes().size());
    w.put_bytes(l.thresholds.codes());
    w.put<std::uint64_t>(l.thresholds.exceptions().size());
    for (const auto& e : l.thresholds.exceptions()) {
      w.put<std::uint32_t>(e.bucket);
      w.put<std::uint8_t>(e.threshold);
    }
    const auto packed = pack_table(l.table);
    w.put<std::uint64_t>(packed.size());
    w.put_bytes(packed);
  }
  w.put<std::uint64_t>(s.base().slots());
  w.put<std::uint32_t>(s.base().seed);
  const auto packed = pack_table(s.base().table);
  w.put<std::uint64_t>(packed.size());
  w.put_bytes(packed);
  return w.take();
}

inline retrieval_structure deserialize(std::span<const std::uint8_t> data) {
  detail::byte_reader rd(data);
  const auto magic = rd.get_bytes(4, "magic");
  if (std::memcmp(magic.data(), "BURR", 4) != 0) throw format_error("bad magic: not a BURR structure file");
  const auto version = rd.get<std::uint32_t>("version");
  if (version != k_format_version) throw format_error("unsupported format version " + std::to_string(version));
  if (rd.get<std::uint32_t>("config length") != k_config_block_bytes) throw format_error("unexpected config block length");

  layer_config cfg;
  cfg.r = rd.get<std::uint8_t>("r");
  cfg.w = rd.get<std::uint8_t>("w");
  cfg.b = rd.get<std::uint16_t>("b");
  cfg.overload = rd.get_f64("overload");
  const auto mode = rd.get<std::uint8_t>("mode");
  if (mode > 2) throw format_error("unknown threshold mode " + std::to_string(mode));
  cfg.mode = static_cast<threshold_mode>(mode);
  cfg.layers = rd.get<std::uint8_t>("layers");
  if (rd.get<std::uint16_t>("reserved") != 0) throw format_error("reserved config field not zero");
  cfg.seed = rd.get<std::uint64_t>("seed");
  cfg.base_slack = rd.get_f64("base_slack");
  cfg.base_growth = rd.get_f64("base_growth");
  try {
    cfg.validate();
  } catch (const config_error& e) {
    throw format_error(std::string("invalid config block: ") + e.what());
  }

  std::vector<layer> layers(cfg.layers);
  for (auto& l : layers) {
    l.num_buckets = rd.get<std::uint64_t>("num_buckets");
    if (l.num_buckets == 0 || l.num_buckets > (std::size_t{1} << 40)) throw format_error("implausible bucket count");
    l.seed = rd.get<std::uint32_t>("layer seed");
    const auto n_codes = rd.get<std::uint64_t>("code length");
    const auto codes = rd.get_bytes(n_codes, "threshold codes");
    const auto n_exc = rd.get<std::uint64_t>("exception count");
    if (n_exc > rd.remaining() / 5) throw format_error("truncated structure file while reading exceptions");
    std::vector<threshold_store::exception_entry> exc(static_cast<std::size_t>(n_exc));
    for (auto& e : exc) {
      e.bucket = rd.get<std::uint32_t>("exception bucket");
      e.threshold = rd.get<std::uint8_t>("exception threshold");
    }
    try {
      l.thresholds = threshold_store::from_parts(cfg.mode, cfg.b, cfg.w, l.num_buckets,
                                                 std::vector<std::uint8_t>(codes.begin(), codes.end()), std::move(exc));
    } catch (const std::invalid_argument& e) {
      throw format_error(std::string("bad threshold section: ") + e.what());
    }
    const auto n_table = rd.get<std::uint64_t>("table length");
    l.table = unpack_table(rd.get_bytes(n_table, "solution table"), layer_slots(l.num_buckets, cfg), cfg.r);
  }

  base_layer base;
  const auto m_base = rd.get<std::uint64_t>("base slots");
  if (m_base < cfg.w) throw format_error("base layer smaller than ribbon width");
  base.seed = rd.get<std::uint32_t>("base seed");
  const auto n_table = rd.get<std::uint64_t>("base table length");
  base.table = unpack_table(rd.get_bytes(n_table, "base table"), static_cast<std::size_t>(m_base), cfg.r);
  if (rd.remaining() != 0) throw format_error("trailing bytes after structure");
  return retrieval_structure(cfg, std::move(layers), std::move(base));
}

inline void save(const retrieval_structure& s, const std::string& path) {
  const auto bytes = serialize(s);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline retrieval_structure load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace burr
