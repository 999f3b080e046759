#include "evpq/vecstore.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "evpq/byteio.hpp"
#include "evpq/error.hpp"
#include "evpq/random.hpp"

namespace evpq {

namespace {

void require_finite(std::span<const float> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ValidationError("non-finite element at position " + std::to_string(i));
    }
  }
}

std::uint64_t fnv1a(std::uint64_t hash, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    hash ^= p[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace

Dataset::Dataset(std::string name, std::size_t dim, std::vector<float> values)
    : name_(std::move(name)), dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) throw ValidationError("dataset dimension must be >= 1");
  if (values_.size() % dim_ != 0) {
    throw ValidationError("dataset of " + std::to_string(values_.size()) +
                          " elements is not a multiple of d=" + std::to_string(dim_));
  }
  require_finite(values_);
}

bool Dataset::is_normalized() const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (std::abs(l2_norm(row(i)) - 1.0) > kUnitNormTolerance) return false;
  }
  return !empty();
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) throw ValidationError("slice out of range");
  return Dataset(name_, dim_,
                 std::vector<float>(values_.begin() + static_cast<std::ptrdiff_t>(begin * dim_),
                                    values_.begin() + static_cast<std::ptrdiff_t>(end * dim_)));
}

Dataset Dataset::select(std::span<const std::size_t> rows) const {
  std::vector<float> out;
  out.reserve(rows.size() * dim_);
  for (std::size_t r : rows) {
    if (r >= size()) throw ValidationError("row " + std::to_string(r) + " out of range");
    auto v = row(r);
    out.insert(out.end(), v.begin(), v.end());
  }
  return Dataset(name_, dim_, std::move(out));
}

std::uint64_t Dataset::content_hash() const {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  const std::uint64_t d = dim_;
  hash = fnv1a(hash, &d, sizeof d);
  return fnv1a(hash, values_.data(), values_.size() * sizeof(float));
}

double l2_norm(std::span<const float> v) {
  double sum = 0.0;
  for (float x : v) sum += static_cast<double>(x) * x;
  return std::sqrt(sum);
}

FloatVector l2_normalize(std::span<const float> v) {
  require_finite(v);
  const double norm = l2_norm(v);
  if (norm == 0.0) throw ValidationError("cannot normalise zero vector");
  FloatVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] / norm);
  return out;
}

Dataset normalize_rows(const Dataset& data) {
  std::vector<float> out;
  out.reserve(data.values().size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto unit = l2_normalize(data.row(i));
    out.insert(out.end(), unit.begin(), unit.end());
  }
  return Dataset(data.name(), data.dim(), std::move(out));
}

Dataset generate_uniform_sphere(std::uint64_t seed, std::size_t n, std::size_t d) {
  if (n == 0 || d == 0) throw ValidationError("generate_uniform_sphere needs n >= 1 and d >= 1");
  Rng rng(seed);
  std::vector<float> values(n * d);
  std::vector<double> raw(d);
  for (std::size_t r = 0; r < n; ++r) {
    double sum = 0.0;
    do {
      sum = 0.0;
      for (auto& x : raw) {
        x = rng.normal();
        sum += x * x;
      }
    } while (sum == 0.0);
    const double inv = 1.0 / std::sqrt(sum);
    for (std::size_t c = 0; c < d; ++c) values[r * d + c] = static_cast<float>(raw[c] * inv);
  }
  return Dataset("uniform-sphere", d, std::move(values));
}

RotationMatrix::RotationMatrix(std::size_t dim, std::uint64_t seed, std::vector<double> entries)
    : dim_(dim), seed_(seed), entries_(std::move(entries)) {
  if (dim_ == 0 || entries_.size() != dim_ * dim_) {
    throw ValidationError("rotation matrix must be d x d with d >= 1");
  }
}

FloatVector RotationMatrix::apply(std::span<const float> v) const {
  if (v.size() != dim_) throw ValidationError("rotation dimension mismatch");
  FloatVector out(dim_);
  for (std::size_t r = 0; r < dim_; ++r) {
    double acc = 0.0;
    const double* row = entries_.data() + r * dim_;
    for (std::size_t c = 0; c < dim_; ++c) acc += row[c] * v[c];
    out[r] = static_cast<float>(acc);
  }
  return out;
}

Dataset RotationMatrix::apply(const Dataset& data) const {
  std::vector<float> out;
  out.reserve(data.values().size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto rotated = apply(data.row(i));
    out.insert(out.end(), rotated.begin(), rotated.end());
  }
  return Dataset(data.name(), data.dim(), std::move(out));
}

RotationMatrix random_rotation(std::uint64_t seed, std::size_t d) {
  if (d == 0) throw ValidationError("rotation dimension must be >= 1");
  Rng rng(seed);
  std::vector<double> q(d * d);
  for (auto& x : q) x = rng.normal();

  for (std::size_t r = 0; r < d; ++r) {
    double* row = q.data() + r * d;
    // Two projection passes keep the result orthonormal to ~1e-15 even for
    // nearly dependent rows.
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t p = 0; p < r; ++p) {
        const double* prev = q.data() + p * d;
        double proj = 0.0;
        for (std::size_t c = 0; c < d; ++c) proj += row[c] * prev[c];
        for (std::size_t c = 0; c < d; ++c) row[c] -= proj * prev[c];
      }
    }
    double norm = 0.0;
    for (std::size_t c = 0; c < d; ++c) norm += row[c] * row[c];
    norm = std::sqrt(norm);
    if (norm < 1e-12) throw Error("rotation: degenerate Gaussian draw");
    for (std::size_t c = 0; c < d; ++c) row[c] /= norm;
  }
  return RotationMatrix(d, seed, std::move(q));
}

DataFormat parse_data_format(std::string_view text) {
  if (text == "fvecs") return DataFormat::Fvecs;
  if (text == "raw-f32" || text == "f32" || text == "raw") return DataFormat::RawF32;
  if (text == "csv") return DataFormat::Csv;
  throw ValidationError("unknown data format '" + std::string(text) + "'");
}

std::string_view to_string(DataFormat format) {
  switch (format) {
    case DataFormat::Fvecs: return "fvecs";
    case DataFormat::RawF32: return "raw-f32";
    case DataFormat::Csv: return "csv";
  }
  return "?";
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::vector<float> read_raw_f32(std::ifstream& in, const std::filesystem::path& path,
                                std::size_t dim) {
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::uint64_t>(in.tellg());
  in.seekg(0);
  const std::uint64_t row_bytes = 4ULL * dim;
  if (bytes % row_bytes != 0) {
    throw ParseError("'" + path.string() + "': length " + std::to_string(bytes) +
                     " is not a multiple of 4*d=" + std::to_string(row_bytes) +
                     " (trailing partial row at offset " +
                     std::to_string(bytes - bytes % row_bytes) + ")");
  }
  std::vector<float> values(bytes / 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!byteio::read_le(in, values[i])) {
      throw ParseError("'" + path.string() + "': short read at offset " + std::to_string(4 * i));
    }
  }
  return values;
}

std::vector<float> read_fvecs(std::ifstream& in, const std::filesystem::path& path,
                              std::size_t dim) {
  std::vector<float> values;
  std::uint64_t offset = 0;
  while (in.peek() != std::char_traits<char>::eof()) {
    std::int32_t header = 0;
    if (!byteio::read_le(in, header)) {
      throw ParseError("'" + path.string() + "': truncated record header at offset " +
                       std::to_string(offset));
    }
    if (header < 0 || static_cast<std::size_t>(header) != dim) {
      throw ParseError("'" + path.string() + "': record at offset " + std::to_string(offset) +
                       " has dimension " + std::to_string(header) + ", expected " +
                       std::to_string(dim));
    }
    offset += 4;
    for (std::size_t c = 0; c < dim; ++c) {
      float x;
      if (!byteio::read_le(in, x)) {
        throw ParseError("'" + path.string() + "': truncated record body at offset " +
                         std::to_string(offset));
      }
      values.push_back(x);
      offset += 4;
    }
  }
  return values;
}

std::vector<float> read_csv(std::ifstream& in, const std::filesystem::path& path,
                            std::size_t dim) {
  std::vector<float> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t fields = 0;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      float x = 0.0F;
      auto [next, ec] = std::from_chars(p, end, x);
      if (ec != std::errc()) {
        throw ParseError("'" + path.string() + "': line " + std::to_string(line_no) +
                         ", column " + std::to_string(p - line.data() + 1) +
                         ": expected a number");
      }
      values.push_back(x);
      ++fields;
      p = next;
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p == end) break;
      if (*p != ',') {
        throw ParseError("'" + path.string() + "': line " + std::to_string(line_no) +
                         ", column " + std::to_string(p - line.data() + 1) +
                         ": expected ','");
      }
      ++p;
    }
    if (fields != dim) {
      throw ParseError("'" + path.string() + "': line " + std::to_string(line_no) + " has " +
                       std::to_string(fields) + " values, expected " + std::to_string(dim));
    }
  }
  return values;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path, DataFormat format, std::size_t dim) {
  if (dim == 0) throw ValidationError("dataset dimension must be >= 1");
  auto in = open_input(path);
  std::vector<float> values;
  switch (format) {
    case DataFormat::RawF32: values = read_raw_f32(in, path, dim); break;
    case DataFormat::Fvecs: values = read_fvecs(in, path, dim); break;
    case DataFormat::Csv: values = read_csv(in, path, dim); break;
  }
  try {
    return Dataset(path.stem().string(), dim, std::move(values));
  } catch (const ValidationError& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

void write_dataset(const std::filesystem::path& path, const Dataset& data, DataFormat format) {
  auto out = open_output(path);
  switch (format) {
    case DataFormat::RawF32:
      for (float x : data.values()) byteio::write_le(out, x);
      break;
    case DataFormat::Fvecs:
      for (std::size_t r = 0; r < data.size(); ++r) {
        byteio::write_le(out, static_cast<std::int32_t>(data.dim()));
        for (float x : data.row(r)) byteio::write_le(out, x);
      }
      break;
    case DataFormat::Csv: {
      char buf[32];
      for (std::size_t r = 0; r < data.size(); ++r) {
        auto row = data.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) {
          if (c) out.put(',');
          auto [end, ec] = std::to_chars(buf, buf + sizeof buf, row[c]);
          out.write(buf, end - buf);
        }
        out.put('\n');
      }
      break;
    }
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace evpq
