#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "evpq/quantize.hpp"
#include "evpq/vecstore.hpp"

namespace evpq {

enum class BenchKernel { B2sp, EuclideanF32, Hamming, MaskedAdd };

/// "b2sp", "euclidean-f32", "hamming", "masked-add". Throws ValidationError.
BenchKernel parse_bench_kernel(std::string_view text);
std::string_view to_string(BenchKernel kernel);

/// Wall-clock statistics over repeated trials of `count` comparisons each.
struct BenchReport {
  std::string kernel;
  std::size_t dim = 0;
  /// Comparisons per trial.
  std::size_t count = 0;
  std::size_t repetitions = 0;
  double fastest_ms = 0.0;
  double slowest_ms = 0.0;
  double median_ms = 0.0;
  double mean_ms = 0.0;
  /// mean_ms / count, in nanoseconds.
  double per_op_ns = 0.0;
  /// Sum of every kernel output in one trial; identical for every trial.
  double checksum = 0.0;
  std::string hardware;
};

/// Fills the four statistics and per_op_ns from per-trial timings.
BenchReport summarize_trials(std::string kernel, std::size_t dim, std::size_t count,
                             std::span<const double> trial_ms);

struct KernelBenchOptions {
  BenchKernel kernel = BenchKernel::B2sp;
  std::size_t dim = 384;
  std::size_t count = 1'000'000;
  std::size_t trials = 10;
  std::uint64_t seed = 42;
  /// Distinct operand vectors cycled through by the comparisons.
  std::size_t pool = 1024;
};

/// Times `trials` runs of `count` comparisons (after one untimed warm-up run).
/// Operands are random unit vectors and their EVP / 1-bit codes, generated
/// before timing. Single-threaded.
BenchReport bench_kernel(const KernelBenchOptions& options);

/// The checksum bench_kernel reports, computed by an untimed plain run.
double kernel_checksum(const KernelBenchOptions& options);

struct FullScanReport {
  BenchReport float_scan;
  BenchReport code_scan;
  /// float_scan.mean_ms / code_scan.mean_ms.
  double speedup = 0.0;
};

/// Times exhaustive nearest-neighbour scans for `queries` query rows (drawn
/// from `data` by seed) over every row: once over float32 vectors with
/// euclidean_f32 and once over the quantised codes. Quantisation happens
/// before timing. Single-threaded.
FullScanReport bench_full_scan(const Dataset& data, std::size_t queries,
                               const QuantizerConfig& quantizer, std::size_t trials = 5,
                               std::uint64_t seed = 42);

/// CPU model and core count, best effort.
std::string hardware_description();

}  // namespace evpq
