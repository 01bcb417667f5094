#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "statconv/grid.hpp"

namespace statconv {

/// Binary sequence container: a 64-byte header (tag, format version, grid,
/// state dimension, member count), a little-endian float64 payload in
/// (member, cell, component) order, and a trailing FNV-1a checksum.
/// Round-trips bit-exactly.

std::vector<std::uint8_t> encode_snapshot(const FieldSequence& seq);
FieldSequence decode_snapshot(std::span<const std::uint8_t> bytes);

void save_snapshot(const FieldSequence& seq, const std::string& path);
FieldSequence load_snapshot(const std::string& path);

}  // namespace statconv
