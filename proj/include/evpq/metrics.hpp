#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "evpq/quantize.hpp"
#include "evpq/vecstore.hpp"

namespace evpq {

// Exact float-space measures. These accumulate in double and throw
// ValidationError on a dimension mismatch.
double dot(std::span<const float> u, std::span<const float> v);
double squared_euclidean(std::span<const float> u, std::span<const float> v);
double euclidean(std::span<const float> u, std::span<const float> v);

/// Plain float32 Euclidean distance: one float accumulator, then sqrt. This is
/// the uncompressed baseline that the bit kernels are timed against.
float euclidean_f32(const float* u, const float* v, std::size_t dim);

struct IndexPair {
  std::size_t first;
  std::size_t second;
  friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

/// `count` distinct unordered pairs (first < second) drawn uniformly from the
/// rows [0, rows). Deterministic per seed. Throws ValidationError when rows < 2
/// or count exceeds rows*(rows-1)/2.
std::vector<IndexPair> sample_pairs(std::size_t rows, std::size_t count, std::uint64_t seed);
std::vector<IndexPair> sample_pairs(const Dataset& data, std::size_t count, std::uint64_t seed);

/// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of the average ranks. Throws ValidationError on unequal
/// or empty input and "degenerate ranks" when either side is constant.
double spearman_rho(std::span<const double> xs, std::span<const double> ys);

struct PairValue {
  double true_distance;
  double proxy_value;
};

struct DistancePairSample {
  std::vector<PairValue> pairs;
  QuantizerKind proxy_kind = QuantizerKind::Evp;
  std::uint64_t sample_seed = 0;

  std::vector<double> true_distances() const;
  std::vector<double> proxy_values() const;
};

/// Euclidean distance between the original rows alongside the proxy distance
/// between their codes, for every pair.
DistancePairSample measure_pairs(const Dataset& data, const ProxyCodes& codes,
                                 std::span<const IndexPair> pairs, std::uint64_t sample_seed,
                                 std::size_t threads = 0);

/// rho between proxy values and true distances.
double spearman_rho(const DistancePairSample& sample);

/// Least-squares non-decreasing step function of true distance over proxy
/// value. One breakpoint per distinct proxy value.
struct IsotonicFit {
  std::vector<double> breakpoints;
  std::vector<double> levels;

  /// Level at x, linearly interpolated between breakpoints and held constant
  /// beyond the ends.
  double predict(double x) const;
};

/// Pool-adjacent-violators. Points sharing an x are pooled first, so the fit
/// is a function of x. Throws ValidationError on empty or unequal input.
IsotonicFit isotonic_fit(std::span<const double> xs, std::span<const double> ys);
IsotonicFit isotonic_fit(const DistancePairSample& sample);

}  // namespace evpq
