#include "evpq/bitcode.hpp"

#include <algorithm>
#include <string>

#include "evpq/error.hpp"

namespace evpq {

void validate(const TernaryVector& v) {
  for (std::size_t i = 0; i < v.elems.size(); ++i) {
    const auto e = v.elems[i];
    if (e < -1 || e > 1) {
      throw ValidationError("ternary element " + std::to_string(i) + " is " + std::to_string(e) +
                            ", not in {-1,0,1}");
    }
  }
  if (v.nonzero_budget && v.nonzeros() > *v.nonzero_budget) {
    throw ValidationError("ternary code has " + std::to_string(v.nonzeros()) +
                          " nonzeros, budget is " + std::to_string(*v.nonzero_budget));
  }
}

namespace {

void require_dim(std::size_t dim) {
  if (dim == 0) throw ValidationError("code dimension must be >= 1");
}

void check_plane(std::size_t dim, std::span<const Word> plane, const char* what) {
  if (plane.size() != words_for(dim)) {
    throw CorruptionError(std::string(what) + " plane has " + std::to_string(plane.size()) +
                          " words, expected " + std::to_string(words_for(dim)));
  }
  for (std::size_t w = 0; w < plane.size(); ++w) {
    if (plane[w] & ~valid_bits_mask(dim, w)) {
      throw CorruptionError(std::string(what) + " plane has pad bits set in word " +
                            std::to_string(w));
    }
  }
}

void check_disjoint(std::span<const Word> plus, std::span<const Word> minus) {
  for (std::size_t w = 0; w < plus.size(); ++w) {
    if (const Word overlap = plus[w] & minus[w]) {
      throw CorruptionError("bit planes overlap at position " +
                            std::to_string(w * kWordBits + std::countr_zero(overlap)));
    }
  }
}

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw ValidationError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

PackedTernary::PackedTernary(std::size_t dim)
    : dim_(dim), plus_(words_for(dim), 0), minus_(words_for(dim), 0) {
  require_dim(dim);
}

PackedTernary PackedTernary::from_planes(std::size_t dim, std::vector<Word> plus,
                                         std::vector<Word> minus) {
  require_dim(dim);
  check_plane(dim, plus, "plus");
  check_plane(dim, minus, "minus");
  check_disjoint(plus, minus);
  return PackedTernary(dim, std::move(plus), std::move(minus));
}

std::int8_t PackedTernary::at(std::size_t i) const {
  const Word bit = Word{1} << (i % kWordBits);
  if (plus_[i / kWordBits] & bit) return 1;
  if (minus_[i / kWordBits] & bit) return -1;
  return 0;
}

std::size_t PackedTernary::nonzeros() const {
  std::size_t count = 0;
  for (std::size_t w = 0; w < plus_.size(); ++w) {
    count += static_cast<std::size_t>(std::popcount(plus_[w]) + std::popcount(minus_[w]));
  }
  return count;
}

PackedBinary::PackedBinary(std::size_t dim) : dim_(dim), bits_(words_for(dim), 0) {
  require_dim(dim);
}

PackedBinary PackedBinary::from_bits(std::size_t dim, std::vector<Word> bits) {
  require_dim(dim);
  check_plane(dim, bits, "binary");
  PackedBinary out(dim);
  out.bits_ = std::move(bits);
  return out;
}

PackedTernary pack(const TernaryVector& v) {
  validate(v);
  PackedTernary out(v.size());
  std::vector<Word> plus(out.words(), 0);
  std::vector<Word> minus(out.words(), 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Word bit = Word{1} << (i % kWordBits);
    if (v.elems[i] > 0) plus[i / kWordBits] |= bit;
    if (v.elems[i] < 0) minus[i / kWordBits] |= bit;
  }
  return PackedTernary::from_planes(v.size(), std::move(plus), std::move(minus));
}

TernaryVector unpack(std::size_t dim, std::span<const Word> plus, std::span<const Word> minus) {
  require_dim(dim);
  check_plane(dim, plus, "plus");
  check_plane(dim, minus, "minus");
  check_disjoint(plus, minus);
  TernaryVector out;
  out.elems.resize(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const Word bit = Word{1} << (i % kWordBits);
    if (plus[i / kWordBits] & bit) out.elems[i] = 1;
    if (minus[i / kWordBits] & bit) out.elems[i] = -1;
  }
  return out;
}

TernaryVector unpack(const PackedTernary& p) { return unpack(p.dim(), p.plus(), p.minus()); }

std::size_t bsp(std::span<const Word> a, std::span<const Word> b) {
  if (a.size() != b.size()) {
    throw ValidationError("bit plane length mismatch: " + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + " words");
  }
  std::size_t count = 0;
  for (std::size_t w = 0; w < a.size(); ++w) {
    count += static_cast<std::size_t>(popcount_native(a[w] & b[w]));
  }
  return count;
}

std::int64_t b2sp(const PackedTernary& v, const PackedTernary& w) {
  require_same_dim(v.dim(), w.dim());
  return b2sp_words(v.plus().data(), v.minus().data(), w.plus().data(), w.minus().data(),
                    v.words());
}

std::int64_t hamming(const PackedBinary& a, const PackedBinary& b) {
  require_same_dim(a.dim(), b.dim());
  return hamming_words(a.bits().data(), b.bits().data(), a.bits().size());
}

double masked_add_words(const Word* plus, const Word* minus, std::size_t words, const float* w) {
  double sum = 0.0;
  for (std::size_t i = 0; i < words; ++i) {
    for (Word bits = plus[i]; bits != 0; bits &= bits - 1) {
      sum += w[i * kWordBits + static_cast<std::size_t>(std::countr_zero(bits))];
    }
    for (Word bits = minus[i]; bits != 0; bits &= bits - 1) {
      sum -= w[i * kWordBits + static_cast<std::size_t>(std::countr_zero(bits))];
    }
  }
  return sum;
}

double masked_add_sp(const PackedTernary& v, std::span<const float> w) {
  require_same_dim(v.dim(), w.size());
  return masked_add_words(v.plus().data(), v.minus().data(), v.words(), w.data());
}

std::int64_t ternary_dot_reference(const TernaryVector& a, const TernaryVector& b) {
  require_same_dim(a.size(), b.size());
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += static_cast<std::int64_t>(a.elems[i]) * static_cast<std::int64_t>(b.elems[i]);
  }
  return sum;
}

TernaryCodeSet::TernaryCodeSet(std::size_t dim, std::size_t rows,
                               std::optional<std::size_t> nonzero_budget)
    : dim_(dim),
      rows_(rows),
      words_(words_for(dim)),
      budget_(nonzero_budget),
      data_(rows * 2 * words_for(dim), 0),
      nonzeros_(rows, 0) {
  require_dim(dim);
  if (budget_ && (*budget_ == 0 || *budget_ > dim)) {
    throw ValidationError("nonzero budget must satisfy 1 <= x <= d");
  }
}

TernaryCodeSet TernaryCodeSet::from_words(std::size_t dim, std::size_t rows,
                                          std::optional<std::size_t> nonzero_budget,
                                          std::vector<Word> words) {
  TernaryCodeSet out(dim, rows, nonzero_budget);
  if (words.size() != out.data_.size()) {
    throw CorruptionError("code set has " + std::to_string(words.size()) + " words, expected " +
                          std::to_string(out.data_.size()));
  }
  out.data_ = std::move(words);
  const std::size_t w = out.words_;
  for (std::size_t r = 0; r < rows; ++r) {
    std::span<const Word> plus(out.plus_data(r), w);
    std::span<const Word> minus(out.minus_data(r), w);
    try {
      check_plane(dim, plus, "plus");
      check_plane(dim, minus, "minus");
      check_disjoint(plus, minus);
    } catch (const CorruptionError& e) {
      throw CorruptionError("row " + std::to_string(r) + ": " + e.what());
    }
    std::size_t nz = 0;
    for (std::size_t i = 0; i < w; ++i) {
      nz += static_cast<std::size_t>(std::popcount(plus[i]) + std::popcount(minus[i]));
    }
    if (nonzero_budget && nz > *nonzero_budget) {
      throw CorruptionError("row " + std::to_string(r) + " has " + std::to_string(nz) +
                            " nonzeros, budget is " + std::to_string(*nonzero_budget));
    }
    out.nonzeros_[r] = static_cast<std::uint32_t>(nz);
  }
  return out;
}

void TernaryCodeSet::assign(std::size_t r, const TernaryVector& v) {
  require_same_dim(dim_, v.size());
  validate(v);
  Word* plus = data_.data() + r * 2 * words_;
  Word* minus = plus + words_;
  std::fill(plus, plus + 2 * words_, Word{0});
  std::uint32_t nz = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Word bit = Word{1} << (i % kWordBits);
    if (v.elems[i] > 0) plus[i / kWordBits] |= bit;
    if (v.elems[i] < 0) minus[i / kWordBits] |= bit;
    nz += v.elems[i] != 0;
  }
  if (budget_ && nz > *budget_) throw ValidationError("code exceeds nonzero budget");
  nonzeros_[r] = nz;
}

void TernaryCodeSet::assign(std::size_t r, const PackedTernary& p) {
  require_same_dim(dim_, p.dim());
  if (budget_ && p.nonzeros() > *budget_) throw ValidationError("code exceeds nonzero budget");
  Word* plus = data_.data() + r * 2 * words_;
  std::copy(p.plus().begin(), p.plus().end(), plus);
  std::copy(p.minus().begin(), p.minus().end(), plus + words_);
  nonzeros_[r] = static_cast<std::uint32_t>(p.nonzeros());
}

PackedTernary TernaryCodeSet::row(std::size_t r) const {
  return PackedTernary::from_planes(dim_, std::vector<Word>(plus_data(r), plus_data(r) + words_),
                                    std::vector<Word>(minus_data(r), minus_data(r) + words_));
}

BinaryCodeSet::BinaryCodeSet(std::size_t dim, std::size_t rows)
    : dim_(dim), rows_(rows), words_(words_for(dim)), data_(rows * words_for(dim), 0) {
  require_dim(dim);
}

BinaryCodeSet BinaryCodeSet::from_words(std::size_t dim, std::size_t rows,
                                        std::vector<Word> words) {
  BinaryCodeSet out(dim, rows);
  if (words.size() != out.data_.size()) {
    throw CorruptionError("code set has " + std::to_string(words.size()) + " words, expected " +
                          std::to_string(out.data_.size()));
  }
  out.data_ = std::move(words);
  for (std::size_t r = 0; r < rows; ++r) {
    try {
      check_plane(dim, std::span<const Word>(out.row_data(r), out.words_), "binary");
    } catch (const CorruptionError& e) {
      throw CorruptionError("row " + std::to_string(r) + ": " + e.what());
    }
  }
  return out;
}

void BinaryCodeSet::assign(std::size_t r, const PackedBinary& code) {
  require_same_dim(dim_, code.dim());
  std::copy(code.bits().begin(), code.bits().end(), data_.begin() + static_cast<std::ptrdiff_t>(r * words_));
}

PackedBinary BinaryCodeSet::row(std::size_t r) const {
  return PackedBinary::from_bits(dim_, std::vector<Word>(row_data(r), row_data(r) + words_));
}

}  // namespace evpq
