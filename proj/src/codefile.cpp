#include "evpq/codefile.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <limits>

#include "evpq/byteio.hpp"
#include "evpq/error.hpp"

namespace evpq {

namespace {

constexpr std::array<char, 4> kTernaryMagic{'E', 'V', 'P', 'B'};
constexpr std::array<char, 4> kBinaryMagic{'E', 'V', 'P', 'S'};

void write_header(std::ostream& out, const std::array<char, 4>& magic, std::size_t dim,
                  std::size_t x, std::size_t rows) {
  if (dim > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("dimension too large for code file");
  }
  out.write(magic.data(), magic.size());
  byteio::write_le(out, kCodeFileVersion);
  byteio::write_le(out, static_cast<std::uint32_t>(dim));
  byteio::write_le(out, static_cast<std::uint32_t>(x));
  byteio::write_le(out, static_cast<std::uint64_t>(rows));
}

std::vector<Word> read_words(std::istream& in, std::size_t count) {
  std::vector<Word> words(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!byteio::read_le(in, words[i])) {
      throw ParseError("code file truncated at body word " + std::to_string(i) + " (offset " +
                       std::to_string(kCodeFileHeaderBytes + 8 * i) + ")");
    }
  }
  return words;
}

}  // namespace

void write_codes(std::ostream& out, const ProxyCodes& codes) {
  if (const auto* t = codes.ternary()) {
    write_header(out, kTernaryMagic, t->dim(), t->nonzero_budget().value_or(0), t->size());
    for (Word w : t->words()) byteio::write_le(out, w);
  } else {
    const auto* b = codes.binary();
    write_header(out, kBinaryMagic, b->dim(), b->dim(), b->size());
    for (Word w : b->words()) byteio::write_le(out, w);
  }
  if (!out) throw IoError("code file write failed");
}

void write_codes(const std::filesystem::path& path, const ProxyCodes& codes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_codes(out, codes);
}

ProxyCodes read_codes(std::istream& in) {
  std::array<char, 4> magic{};
  std::uint8_t version = 0;
  std::uint32_t dim = 0;
  std::uint32_t x = 0;
  std::uint64_t rows = 0;
  if (!in.read(magic.data(), magic.size()) || !byteio::read_le(in, version) ||
      !byteio::read_le(in, dim) || !byteio::read_le(in, x) || !byteio::read_le(in, rows)) {
    throw ParseError("code file header truncated (need " + std::to_string(kCodeFileHeaderBytes) +
                     " bytes)");
  }
  const bool is_ternary = magic == kTernaryMagic;
  if (!is_ternary && magic != kBinaryMagic) throw ParseError("bad code file magic at offset 0");
  if (version != kCodeFileVersion) {
    throw ParseError("unsupported code file version " + std::to_string(version) + " at offset 4");
  }
  if (dim == 0) throw ParseError("code file dimension is 0 at offset 5");
  if (x > dim) throw ParseError("code file x exceeds d at offset 9");

  const std::size_t plane_words = words_for(dim);
  const std::size_t per_row = is_ternary ? 2 * plane_words : plane_words;
  if (rows > std::numeric_limits<std::size_t>::max() / (per_row * sizeof(Word))) {
    throw ParseError("code file row count too large at offset 13");
  }
  auto words = read_words(in, static_cast<std::size_t>(rows) * per_row);
  if (in.peek() != std::char_traits<char>::eof()) throw ParseError("trailing bytes after code file body");

  if (!is_ternary) {
    if (x != dim) throw ParseError("binary code file must carry x = d at offset 9");
    return ProxyCodes(BinaryCodeSet::from_words(dim, rows, std::move(words)));
  }
  const std::optional<std::size_t> budget = x == 0 ? std::nullopt : std::optional<std::size_t>(x);
  auto set = TernaryCodeSet::from_words(dim, rows, budget, std::move(words));
  return ProxyCodes(budget ? QuantizerKind::Evp : QuantizerKind::B158, std::move(set));
}

ProxyCodes read_codes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return read_codes(in);
}

}  // namespace evpq
