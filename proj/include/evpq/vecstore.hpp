#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evpq {

/// Owned d-dimensional embedding. Views are passed around as
/// std::span<const float>.
using FloatVector = std::vector<float>;

/// Tolerance on | ||v|| - 1 | for a vector to count as normalised.
inline constexpr double kUnitNormTolerance = 1e-6;

/// Immutable row-major collection of float32 vectors sharing one dimension.
/// Row index is the identity used by search results.
class Dataset {
 public:
  Dataset() = default;

  /// Takes ownership of `values` (size must be a multiple of `dim`). Throws
  /// ValidationError on dim == 0, ragged size or non-finite elements.
  Dataset(std::string name, std::size_t dim, std::vector<float> values);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : values_.size() / dim_; }
  bool empty() const { return values_.empty(); }

  std::span<const float> row(std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<const float> values() const { return values_; }

  /// True when every row has unit l2 norm within kUnitNormTolerance.
  bool is_normalized() const;

  /// Copy of rows [begin, end).
  Dataset slice(std::size_t begin, std::size_t end) const;

  /// Copy of the selected rows, in the given order.
  Dataset select(std::span<const std::size_t> rows) const;

  /// 64-bit FNV-1a over dim and the raw element bytes; used as a cache key.
  std::uint64_t content_hash() const;

  void set_name(std::string name) { name_ = std::move(name); }

 private:
  std::string name_;
  std::size_t dim_ = 0;
  std::vector<float> values_;
};

double l2_norm(std::span<const float> v);

/// Returns v / ||v||. Throws ValidationError("cannot normalise zero vector").
FloatVector l2_normalize(std::span<const float> v);

/// Row-wise l2_normalize.
Dataset normalize_rows(const Dataset& data);

/// n unit vectors, each built from d standard normals (see Rng) and then
/// normalised. Uniform on the unit hypersphere; deterministic per seed.
Dataset generate_uniform_sphere(std::uint64_t seed, std::size_t n, std::size_t d);

/// Seeded orthonormal d x d matrix.
class RotationMatrix {
 public:
  RotationMatrix(std::size_t dim, std::uint64_t seed, std::vector<double> entries);

  std::size_t dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }
  /// Row-major entries.
  std::span<const double> entries() const { return entries_; }
  double at(std::size_t r, std::size_t c) const { return entries_[r * dim_ + c]; }

  /// Q * v.
  FloatVector apply(std::span<const float> v) const;
  /// Q applied to every row.
  Dataset apply(const Dataset& data) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
  std::vector<double> entries_;
};

/// Orthonormalises (modified Gram-Schmidt, two passes) a d x d matrix of
/// standard normals drawn from Rng(seed) in row-major order.
RotationMatrix random_rotation(std::uint64_t seed, std::size_t d);

enum class DataFormat { Fvecs, RawF32, Csv };

/// "fvecs", "raw-f32"/"f32"/"raw", "csv". Throws ValidationError otherwise.
DataFormat parse_data_format(std::string_view text);
std::string_view to_string(DataFormat format);

/// Reads a dataset. Row order follows the file. Throws IoError when the file
/// cannot be opened and ParseError (naming the byte offset or line) on
/// malformed content, including an fvecs header that disagrees with `dim`.
Dataset load_dataset(const std::filesystem::path& path, DataFormat format, std::size_t dim);

/// Writes a dataset. fvecs and raw-f32 are value-exact; csv uses the shortest
/// round-tripping decimal form.
void write_dataset(const std::filesystem::path& path, const Dataset& data, DataFormat format);

}  // namespace evpq
