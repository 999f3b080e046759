#pragma once

// Serialised packed-code files.
//
//   offset  size  field
//   0       4     magic: "EVPB" (two-plane ternary) or "EVPS" (single-plane binary)
//   4       1     version (1)
//   5       4     d, u32 little-endian
//   9       4     x, u32 little-endian (EVP budget; 0 for b1.58; d for 1-bit)
//   13      8     row count, u64 little-endian
//   21      ...   rows; each plane is padded_bits/8 bytes, words little-endian
//                 (so logical bit i is bit i%8 of byte i/8). EVPB rows store
//                 the plus plane then the minus plane.

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "evpq/quantize.hpp"

namespace evpq {

inline constexpr std::uint8_t kCodeFileVersion = 1;
inline constexpr std::size_t kCodeFileHeaderBytes = 21;

void write_codes(std::ostream& out, const ProxyCodes& codes);
void write_codes(const std::filesystem::path& path, const ProxyCodes& codes);

/// Throws ParseError on a bad header or truncated body and CorruptionError
/// when a row violates the plane invariants (overlap, set pad bits, budget).
ProxyCodes read_codes(std::istream& in);
ProxyCodes read_codes(const std::filesystem::path& path);

}  // namespace evpq
