#include "statconv/snapshot.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace statconv {

namespace {

constexpr char kMagic[8] = {'S', 'C', 'N', 'V', 'S', 'N', 'P', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderSize = 64;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

double get_f64(const std::uint8_t* p) { return std::bit_cast<double>(get_u64(p)); }

std::uint64_t fnv1a(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const FieldSequence& seq) {
  for (double v : seq.raw())
    if (!std::isfinite(v))
      throw std::invalid_argument("snapshot: sequence contains non-finite values");

  const Grid& g = seq.grid();
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + seq.raw().size() * 8 + 8);
  out.insert(out.end(), kMagic, kMagic + 8);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(g.space_dim));
  put_u32(out, static_cast<std::uint32_t>(seq.state_dim()));
  put_u32(out, static_cast<std::uint32_t>(seq.length()));
  put_u32(out, static_cast<std::uint32_t>(g.time_steps));
  put_u32(out, static_cast<std::uint32_t>(g.cells[0]));
  put_u32(out, static_cast<std::uint32_t>(g.cells[1]));
  put_f64(out, g.final_time);
  put_f64(out, g.lengths[0]);
  put_f64(out, g.lengths[1]);
  while (out.size() < kHeaderSize) out.push_back(0);

  for (double v : seq.raw()) put_f64(out, v);
  std::uint64_t sum = fnv1a({out.data(), out.size()});
  put_u64(out, sum);
  return out;
}

FieldSequence decode_snapshot(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize + 8)
    throw std::runtime_error("snapshot: truncated header");
  if (std::memcmp(bytes.data(), kMagic, 8) != 0)
    throw std::runtime_error("snapshot: bad tag, not a recognized snapshot version");
  std::uint32_t version = get_u32(bytes.data() + 8);
  if (version != kVersion)
    throw std::runtime_error("snapshot: unsupported version " + std::to_string(version));

  Grid g;
  g.space_dim = static_cast<int>(get_u32(bytes.data() + 12));
  int state_dim = static_cast<int>(get_u32(bytes.data() + 16));
  int length = static_cast<int>(get_u32(bytes.data() + 20));
  g.time_steps = static_cast<int>(get_u32(bytes.data() + 24));
  g.cells[0] = static_cast<int>(get_u32(bytes.data() + 28));
  g.cells[1] = static_cast<int>(get_u32(bytes.data() + 32));
  g.final_time = get_f64(bytes.data() + 36);
  g.lengths[0] = get_f64(bytes.data() + 44);
  g.lengths[1] = get_f64(bytes.data() + 52);
  g.validate();
  if (state_dim < 1 || length < 1)
    throw std::runtime_error("snapshot: invalid state dimension or member count");

  std::size_t values = static_cast<std::size_t>(length) * g.cell_count() * state_dim;
  std::size_t expected = kHeaderSize + values * 8 + 8;
  if (bytes.size() != expected)
    throw std::runtime_error("snapshot: truncated payload (expected " +
                             std::to_string(expected) + " bytes, found " +
                             std::to_string(bytes.size()) + ")");

  std::uint64_t stored = get_u64(bytes.data() + bytes.size() - 8);
  std::uint64_t sum = fnv1a(bytes.subspan(0, bytes.size() - 8));
  if (stored != sum) throw std::runtime_error("snapshot: checksum mismatch");

  FieldSequence seq(g, state_dim, length);
  auto raw = seq.raw();
  const std::uint8_t* p = bytes.data() + kHeaderSize;
  for (std::size_t i = 0; i < values; ++i) raw[i] = get_f64(p + i * 8);
  return seq;
}

void save_snapshot(const FieldSequence& seq, const std::string& path) {
  auto bytes = encode_snapshot(seq);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("snapshot: cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("snapshot: write failed for " + path);
}

FieldSequence load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw std::runtime_error("snapshot: cannot open " + path);
  std::streamsize size = in.tellg();
  in.seekg(0);
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
  if (size > 0) in.read(reinterpret_cast<char*>(bytes.data()), size);
  if (!in) throw std::runtime_error("snapshot: read failed for " + path);
  return decode_snapshot(bytes);
}

}  // namespace statconv
