#pragma once

// Bit-plane encodings of quantised vectors and the distance kernels over them.
//
// Layout: logical element i lives in word i / 64 at bit i % 64 (least
// significant bit first). Each plane is zero-padded up to the next multiple
// of 256 bits. A ternary code holds two planes: `plus` marks +1 positions and
// `minus` marks -1 positions; the planes never overlap. A binary (1-bit) code
// holds a single plane.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "evpq/ternary.hpp"

namespace evpq {

using Word = std::uint64_t;

inline constexpr std::size_t kWordBits = 64;
inline constexpr std::size_t kPlaneAlignBits = 256;

/// Smallest multiple of 256 that is >= dim.
constexpr std::size_t padded_bits_for(std::size_t dim) {
  return (dim + kPlaneAlignBits - 1) / kPlaneAlignBits * kPlaneAlignBits;
}

constexpr std::size_t words_for(std::size_t dim) { return padded_bits_for(dim) / kWordBits; }

/// SWAR population count, independent of any hardware instruction.
constexpr int popcount_portable(Word x) {
  x = x - ((x >> 1) & 0x5555555555555555ULL);
  x = (x & 0x3333333333333333ULL) + ((x >> 2) & 0x3333333333333333ULL);
  x = (x + (x >> 4)) & 0x0F0F0F0F0F0F0F0FULL;
  return static_cast<int>((x * 0x0101010101010101ULL) >> 56);
}

/// std::popcount; lowers to the native instruction when the target has one.
inline int popcount_native(Word x) { return std::popcount(x); }

/// Mask of the valid (non-pad) bits of word `w` for a plane of `dim` bits.
constexpr Word valid_bits_mask(std::size_t dim, std::size_t w) {
  const std::size_t first = w * kWordBits;
  if (first + kWordBits <= dim) return ~Word{0};
  if (first >= dim) return 0;
  return (Word{1} << (dim - first)) - 1;
}

/// Two-plane packed ternary code.
class PackedTernary {
 public:
  /// All-zero code of the given logical dimension (>= 1).
  explicit PackedTernary(std::size_t dim);

  /// Adopts existing planes. Throws CorruptionError when the planes overlap,
  /// pad bits are set, or the plane length is not words_for(dim).
  static PackedTernary from_planes(std::size_t dim, std::vector<Word> plus,
                                   std::vector<Word> minus);

  std::size_t dim() const { return dim_; }
  std::size_t padded_bits() const { return plus_.size() * kWordBits; }
  std::size_t words() const { return plus_.size(); }
  std::span<const Word> plus() const { return plus_; }
  std::span<const Word> minus() const { return minus_; }

  std::int8_t at(std::size_t i) const;
  std::size_t nonzeros() const;

  friend bool operator==(const PackedTernary&, const PackedTernary&) = default;

 private:
  PackedTernary(std::size_t dim, std::vector<Word> plus, std::vector<Word> minus)
      : dim_(dim), plus_(std::move(plus)), minus_(std::move(minus)) {}

  std::size_t dim_;
  std::vector<Word> plus_;
  std::vector<Word> minus_;
};

/// Single-plane packed binary code.
class PackedBinary {
 public:
  explicit PackedBinary(std::size_t dim);
  /// Throws CorruptionError on wrong length or set pad bits.
  static PackedBinary from_bits(std::size_t dim, std::vector<Word> bits);

  std::size_t dim() const { return dim_; }
  std::size_t padded_bits() const { return bits_.size() * kWordBits; }
  std::span<const Word> bits() const { return bits_; }
  bool test(std::size_t i) const { return (bits_[i / kWordBits] >> (i % kWordBits)) & 1U; }
  void set(std::size_t i) { bits_[i / kWordBits] |= Word{1} << (i % kWordBits); }

  friend bool operator==(const PackedBinary&, const PackedBinary&) = default;

 private:
  std::size_t dim_;
  std::vector<Word> bits_;
};

PackedTernary pack(const TernaryVector& v);

/// Inverse of pack. The raw-plane overload checks the planes and throws
/// CorruptionError if any position is marked both +1 and -1.
TernaryVector unpack(const PackedTernary& p);
TernaryVector unpack(std::size_t dim, std::span<const Word> plus, std::span<const Word> minus);

/// Bitwise scalar product: popcount(a AND b). Throws ValidationError on
/// length mismatch.
std::size_t bsp(std::span<const Word> a, std::span<const Word> b);

/// Hot-loop form of the ternary scalar product over raw planes of `words`
/// words each. Since plus and minus never overlap, (a+ & b+) and (a- & b-)
/// mark disjoint positions, so the four bsp terms fold into two popcounts.
inline std::int64_t b2sp_words(const Word* a_plus, const Word* a_minus, const Word* b_plus,
                               const Word* b_minus, std::size_t words) {
  std::int64_t same = 0;
  std::int64_t opposite = 0;
  for (std::size_t w = 0; w < words; ++w) {
    same += std::popcount((a_plus[w] & b_plus[w]) | (a_minus[w] & b_minus[w]));
    opposite += std::popcount((a_plus[w] & b_minus[w]) | (a_minus[w] & b_plus[w]));
  }
  return same - opposite;
}

inline std::int64_t hamming_words(const Word* a, const Word* b, std::size_t words) {
  std::int64_t count = 0;
  for (std::size_t w = 0; w < words; ++w) count += std::popcount(a[w] ^ b[w]);
  return count;
}

/// Integer scalar product of two ternary codes:
/// (bsp(v+,w+) + bsp(v-,w-)) - (bsp(v+,w-) + bsp(v-,w+)).
/// Throws ValidationError on dimension mismatch.
std::int64_t b2sp(const PackedTernary& v, const PackedTernary& w);

/// Number of differing bits. Throws ValidationError on dimension mismatch.
std::int64_t hamming(const PackedBinary& a, const PackedBinary& b);

/// Ternary-by-float scalar product by masked addition: sum of w over the
/// plus plane minus sum of w over the minus plane.
double masked_add_sp(const PackedTernary& v, std::span<const float> w);
double masked_add_words(const Word* plus, const Word* minus, std::size_t words,
                        const float* w);

/// Naive element-wise integer dot product; the reference for b2sp.
std::int64_t ternary_dot_reference(const TernaryVector& a, const TernaryVector& b);

/// Row-contiguous collection of ternary codes sharing one dimension. Row r
/// occupies 2 * words_per_plane() words: its plus plane followed by its minus
/// plane (the same order as the serialised form).
class TernaryCodeSet {
 public:
  TernaryCodeSet(std::size_t dim, std::size_t rows, std::optional<std::size_t> nonzero_budget);

  /// Adopts raw row words; validates every row like PackedTernary::from_planes.
  static TernaryCodeSet from_words(std::size_t dim, std::size_t rows,
                                   std::optional<std::size_t> nonzero_budget,
                                   std::vector<Word> words);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return rows_; }
  std::size_t words_per_plane() const { return words_; }
  std::optional<std::size_t> nonzero_budget() const { return budget_; }

  const Word* plus_data(std::size_t r) const { return data_.data() + r * 2 * words_; }
  const Word* minus_data(std::size_t r) const { return plus_data(r) + words_; }
  std::span<const Word> words() const { return data_; }
  std::size_t nonzeros(std::size_t r) const { return nonzeros_[r]; }

  /// Packs v into row r. Distinct rows may be written concurrently.
  void assign(std::size_t r, const TernaryVector& v);
  void assign(std::size_t r, const PackedTernary& p);
  PackedTernary row(std::size_t r) const;

  friend bool operator==(const TernaryCodeSet&, const TernaryCodeSet&) = default;

 private:
  std::size_t dim_;
  std::size_t rows_;
  std::size_t words_;
  std::optional<std::size_t> budget_;
  std::vector<Word> data_;
  std::vector<std::uint32_t> nonzeros_;
};

/// Row-contiguous collection of binary codes.
class BinaryCodeSet {
 public:
  BinaryCodeSet(std::size_t dim, std::size_t rows);
  static BinaryCodeSet from_words(std::size_t dim, std::size_t rows, std::vector<Word> words);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return rows_; }
  std::size_t words_per_plane() const { return words_; }
  const Word* row_data(std::size_t r) const { return data_.data() + r * words_; }
  std::span<const Word> words() const { return data_; }

  void assign(std::size_t r, const PackedBinary& code);
  PackedBinary row(std::size_t r) const;

  friend bool operator==(const BinaryCodeSet&, const BinaryCodeSet&) = default;

 private:
  std::size_t dim_;
  std::size_t rows_;
  std::size_t words_;
  std::vector<Word> data_;
};

}  // namespace evpq
