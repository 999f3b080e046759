#include "evpq/bench.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>
#include <vector>

#include "evpq/error.hpp"
#include "evpq/metrics.hpp"
#include "evpq/random.hpp"

namespace evpq {

namespace {

template <typename T>
inline void keep_alive(T const& value) {
#if defined(__GNUC__) || defined(__clang__)
  asm volatile("" : : "r,m"(value) : "memory");
#else
  static volatile T sink;
  sink = value;
#endif
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

/// Operands for the micro-benchmarks, laid out contiguously.
struct KernelOperands {
  std::size_t dim;
  std::size_t pool;
  Dataset vectors;
  TernaryCodeSet ternary;
  BinaryCodeSet binary;
};

KernelOperands make_operands(const KernelBenchOptions& o) {
  if (o.count == 0) throw ValidationError("bench count must be >= 1");
  if (o.trials == 0) throw ValidationError("bench trials must be >= 1");
  if (o.dim < 2) throw ValidationError("bench dimension must be >= 2");
  if (o.pool < 2) throw ValidationError("bench operand pool must be >= 2");
  auto vectors = generate_uniform_sphere(o.seed, o.pool, o.dim);
  const auto evp = EvpConfig::for_dimension(o.dim);
  TernaryCodeSet ternary(o.dim, o.pool, evp.nonzeros);
  BinaryCodeSet binary(o.dim, o.pool);
  for (std::size_t r = 0; r < o.pool; ++r) {
    ternary.assign(r, evp_quantize(vectors.row(r), evp));
    binary.assign(r, one_bit_quantize(vectors.row(r)));
  }
  return {o.dim, o.pool, std::move(vectors), std::move(ternary), std::move(binary)};
}

/// Runs `count` comparisons. Comparison i pairs operand a = i mod pool with
/// b = (a + 1 + i / pool) mod pool, the same sequence for every kernel.
template <typename Kernel>
double run_comparisons(std::size_t count, std::size_t pool, Kernel&& kernel) {
  double checksum = 0.0;
  std::size_t a = 0;
  std::size_t offset = 1;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t b = a + offset;
    if (b >= pool) b -= pool;
    checksum += kernel(a, b);
    if (++a == pool) {
      a = 0;
      if (++offset == pool) offset = 1;
    }
  }
  return checksum;
}

double run_kernel_once(BenchKernel kernel, const KernelOperands& ops, std::size_t count) {
  const std::size_t dim = ops.dim;
  const std::size_t words = ops.ternary.words_per_plane();
  switch (kernel) {
    case BenchKernel::B2sp:
      return run_comparisons(count, ops.pool, [&](std::size_t a, std::size_t b) {
        return static_cast<double>(b2sp_words(ops.ternary.plus_data(a), ops.ternary.minus_data(a),
                                              ops.ternary.plus_data(b), ops.ternary.minus_data(b),
                                              words));
      });
    case BenchKernel::EuclideanF32:
      return run_comparisons(count, ops.pool, [&](std::size_t a, std::size_t b) {
        return static_cast<double>(
            euclidean_f32(ops.vectors.row(a).data(), ops.vectors.row(b).data(), dim));
      });
    case BenchKernel::Hamming:
      return run_comparisons(count, ops.pool, [&](std::size_t a, std::size_t b) {
        return static_cast<double>(
            hamming_words(ops.binary.row_data(a), ops.binary.row_data(b), words));
      });
    case BenchKernel::MaskedAdd:
      return run_comparisons(count, ops.pool, [&](std::size_t a, std::size_t b) {
        return masked_add_words(ops.ternary.plus_data(a), ops.ternary.minus_data(a), words,
                                ops.vectors.row(b).data());
      });
  }
  return 0.0;
}

}  // namespace

BenchKernel parse_bench_kernel(std::string_view text) {
  if (text == "b2sp") return BenchKernel::B2sp;
  if (text == "euclidean-f32" || text == "euclidean") return BenchKernel::EuclideanF32;
  if (text == "hamming") return BenchKernel::Hamming;
  if (text == "masked-add") return BenchKernel::MaskedAdd;
  throw ValidationError("unknown kernel '" + std::string(text) + "'");
}

std::string_view to_string(BenchKernel kernel) {
  switch (kernel) {
    case BenchKernel::B2sp: return "b2sp";
    case BenchKernel::EuclideanF32: return "euclidean-f32";
    case BenchKernel::Hamming: return "hamming";
    case BenchKernel::MaskedAdd: return "masked-add";
  }
  return "?";
}

BenchReport summarize_trials(std::string kernel, std::size_t dim, std::size_t count,
                             std::span<const double> trial_ms) {
  if (trial_ms.empty()) throw ValidationError("no trials to summarise");
  if (count == 0) throw ValidationError("comparison count must be >= 1");
  std::vector<double> sorted(trial_ms.begin(), trial_ms.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  BenchReport r;
  r.kernel = std::move(kernel);
  r.dim = dim;
  r.count = count;
  r.repetitions = m;
  r.fastest_ms = sorted.front();
  r.slowest_ms = sorted.back();
  r.median_ms = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  r.mean_ms = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(m);
  r.per_op_ns = r.mean_ms * 1e6 / static_cast<double>(count);
  return r;
}

BenchReport bench_kernel(const KernelBenchOptions& options) {
  const auto ops = make_operands(options);
  const double warm = run_kernel_once(options.kernel, ops, options.count);
  keep_alive(warm);
  std::vector<double> trial_ms;
  double checksum = warm;
  for (std::size_t t = 0; t < options.trials; ++t) {
    const auto start = Clock::now();
    const double sum = run_kernel_once(options.kernel, ops, options.count);
    keep_alive(sum);
    trial_ms.push_back(elapsed_ms(start));
    if (sum != checksum) throw CorruptionError("benchmark checksum changed between trials");
  }
  auto report = summarize_trials(std::string(to_string(options.kernel)), options.dim,
                                 options.count, trial_ms);
  report.checksum = checksum;
  report.hardware = hardware_description();
  return report;
}

double kernel_checksum(const KernelBenchOptions& options) {
  const auto ops = make_operands(options);
  return run_kernel_once(options.kernel, ops, options.count);
}

namespace {

double float_scan(const Dataset& data, std::span<const std::size_t> query_rows) {
  double checksum = 0.0;
  const std::size_t dim = data.dim();
  const float* base = data.values().data();
  for (std::size_t q : query_rows) {
    const float* query = data.row(q).data();
    float best = std::numeric_limits<float>::infinity();
    std::size_t best_row = 0;
    for (std::size_t r = 0; r < data.size(); ++r) {
      const float dist = euclidean_f32(base + r * dim, query, dim);
      if (dist < best) {
        best = dist;
        best_row = r;
      }
    }
    checksum += static_cast<double>(best_row) + best;
  }
  return checksum;
}

double code_scan(const ProxyCodes& codes, std::span<const std::size_t> query_rows) {
  double checksum = 0.0;
  for (std::size_t q : query_rows) {
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    std::size_t best_row = 0;
    if (const auto* t = codes.ternary()) {
      const std::size_t words = t->words_per_plane();
      const bool squared = codes.metric() == ProxyMetric::CodeSquaredDistance;
      const auto q_nonzeros = static_cast<std::int64_t>(t->nonzeros(q));
      for (std::size_t r = 0; r < t->size(); ++r) {
        const std::int64_t sp =
            b2sp_words(t->plus_data(r), t->minus_data(r), t->plus_data(q), t->minus_data(q), words);
        const std::int64_t score =
            squared ? static_cast<std::int64_t>(t->nonzeros(r)) + q_nonzeros - 2 * sp : -sp;
        if (score < best) {
          best = score;
          best_row = r;
        }
      }
    } else {
      const auto* b = codes.binary();
      const std::size_t words = b->words_per_plane();
      for (std::size_t r = 0; r < b->size(); ++r) {
        const std::int64_t score = hamming_words(b->row_data(r), b->row_data(q), words);
        if (score < best) {
          best = score;
          best_row = r;
        }
      }
    }
    checksum += static_cast<double>(best_row) + static_cast<double>(best);
  }
  return checksum;
}

template <typename Scan>
BenchReport time_scan(const std::string& label, std::size_t dim, std::size_t comparisons,
                      std::size_t trials, Scan&& scan) {
  const double checksum = scan();
  keep_alive(checksum);
  std::vector<double> trial_ms;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto start = Clock::now();
    const double sum = scan();
    keep_alive(sum);
    trial_ms.push_back(elapsed_ms(start));
    if (sum != checksum) throw CorruptionError("scan checksum changed between trials");
  }
  auto report = summarize_trials(label, dim, comparisons, trial_ms);
  report.checksum = checksum;
  report.hardware = hardware_description();
  return report;
}

}  // namespace

FullScanReport bench_full_scan(const Dataset& data, std::size_t queries,
                               const QuantizerConfig& quantizer, std::size_t trials,
                               std::uint64_t seed) {
  if (data.empty()) throw ValidationError("full scan needs a nonempty dataset");
  if (queries == 0) throw ValidationError("full scan needs at least one query");
  if (trials == 0) throw ValidationError("bench trials must be >= 1");
  Rng rng(seed);
  std::vector<std::size_t> query_rows(queries);
  for (auto& q : query_rows) q = static_cast<std::size_t>(rng.below(data.size()));

  const auto codes = encode_dataset(data, quantizer, 1);
  const std::size_t comparisons = queries * data.size();
  FullScanReport out;
  out.float_scan = time_scan("euclidean-f32-scan", data.dim(), comparisons, trials,
                             [&] { return float_scan(data, query_rows); });
  const std::string code_label =
      codes.binary() ? "hamming-scan" : std::string("b2sp-scan-") + std::string(to_string(codes.kind()));
  out.code_scan = time_scan(code_label, data.dim(), comparisons, trials,
                            [&] { return code_scan(codes, query_rows); });
  out.speedup = out.float_scan.mean_ms / out.code_scan.mean_ms;
  return out;
}

std::string hardware_description() {
  std::string model = "unknown cpu";
  std::ifstream cpuinfo("/proc/cpuinfo");
  for (std::string line; std::getline(cpuinfo, line);) {
    if (line.rfind("model name", 0) == 0) {
      if (auto colon = line.find(':'); colon != std::string::npos) {
        model = line.substr(line.find_first_not_of(' ', colon + 1));
      }
      break;
    }
  }
  return model + ", " + std::to_string(std::thread::hardware_concurrency()) + " logical cores";
}

}  // namespace evpq
