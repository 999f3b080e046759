#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "evpq/bitcode.hpp"
#include "evpq/ternary.hpp"
#include "evpq/vecstore.hpp"

namespace evpq {

/// Parameters of the {x,d} EVP: codes have d elements, x of them nonzero.
struct EvpConfig {
  std::size_t dim;
  std::size_t nonzeros;

  /// Throws ValidationError unless 1 <= nonzeros <= dim.
  EvpConfig(std::size_t dim, std::size_t nonzeros);

  /// {select_x(d), d}.
  static EvpConfig for_dimension(std::size_t dim);
};

struct B158Config {
  /// Added to the mean absolute value before dividing. Must be > 0.
  double epsilon = 1e-6;
};

/// The x that maximises C(d,x) * 2^x, i.e. 2d/3 rounded to nearest. d >= 2.
std::size_t select_x(std::size_t dim);

/// log10(C(d,x) * 2^x), the number of vertices of the {x,d} EVP, via lgamma.
double log10_vertex_count(const EvpConfig& cfg);

/// Nearest {x,d} EVP vertex: the x coordinates of largest magnitude keep
/// their sign, everything else becomes 0. Magnitude ties go to the lower
/// index. A selected coordinate that is exactly 0 stays 0, so such inputs
/// yield fewer than x nonzeros.
TernaryVector evp_quantize(std::span<const float> u, const EvpConfig& cfg);

/// Sign bit per coordinate: bit i is set iff u_i > 0.
PackedBinary one_bit_quantize(std::span<const float> u);

/// Ternary code scaled by the vector's own mean absolute value g:
/// clamp(round(u_i / (g + epsilon)), -1, 1), rounding half away from zero.
/// (The original formulation takes g over a whole weight matrix; here each
/// embedding is its own matrix.)
TernaryVector b158_quantize(std::span<const float> u, const B158Config& cfg = {});

enum class QuantizerKind { Evp, OneBit, B158 };

/// "evp", "one-bit", "b158". Throws ValidationError otherwise.
QuantizerKind parse_quantizer_kind(std::string_view text);
std::string_view to_string(QuantizerKind kind);

struct QuantizerConfig {
  QuantizerKind kind = QuantizerKind::Evp;
  /// EVP x; defaults to select_x(d) when empty.
  std::optional<std::size_t> nonzeros;
  double epsilon = 1e-6;

  /// Resolves the EVP parameters for a dimension (validating x <= d).
  EvpConfig evp_for(std::size_t dim) const;
};

/// How proxy distances between codes are formed; smaller is always closer.
enum class ProxyMetric {
  /// -b2sp. Used for EVP codes, whose nonzero count is fixed.
  NegatedScalarProduct,
  /// ||a - b||^2 = nnz(a) + nnz(b) - 2 b2sp. Used for b1.58 codes, whose
  /// nonzero count varies per vector.
  CodeSquaredDistance,
  /// Hamming distance between 1-bit codes.
  Hamming,
};

ProxyMetric proxy_metric_for(QuantizerKind kind);

/// A quantised dataset together with the rule for comparing its codes.
class ProxyCodes {
 public:
  ProxyCodes(QuantizerKind kind, TernaryCodeSet codes);
  explicit ProxyCodes(BinaryCodeSet codes);

  QuantizerKind kind() const { return kind_; }
  ProxyMetric metric() const { return proxy_metric_for(kind_); }
  std::size_t size() const;
  std::size_t dim() const;

  const TernaryCodeSet* ternary() const { return std::get_if<TernaryCodeSet>(&codes_); }
  const BinaryCodeSet* binary() const { return std::get_if<BinaryCodeSet>(&codes_); }

  /// Throws ValidationError unless both sets use the same quantiser,
  /// dimension and nonzero budget.
  void require_compatible(const ProxyCodes& other) const;

  /// Proxy distance between row a of this set and row b of `other`.
  std::int64_t distance(std::size_t a, const ProxyCodes& other, std::size_t b) const;

 private:
  QuantizerKind kind_;
  std::variant<TernaryCodeSet, BinaryCodeSet> codes_;
};

/// Quantises every row. Rows are processed in parallel; the output is
/// independent of `threads` (0 = all cores).
ProxyCodes encode_dataset(const Dataset& data, const QuantizerConfig& cfg,
                          std::size_t threads = 0);

}  // namespace evpq
