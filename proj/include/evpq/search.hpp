#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evpq/bitcode.hpp"
#include "evpq/quantize.hpp"
#include "evpq/vecstore.hpp"

namespace evpq {

struct Neighbor {
  std::size_t index;
  /// Smaller is closer.
  double score;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Ranked result, ascending by (score, index).
struct NeighborList {
  std::vector<Neighbor> entries;

  std::size_t size() const { return entries.size(); }
  const Neighbor& operator[](std::size_t i) const { return entries[i]; }
  std::vector<std::size_t> indices() const;
  friend bool operator==(const NeighborList&, const NeighborList&) = default;
};

/// The k rows nearest to q by Euclidean distance (score = distance), ties to
/// the lower row index. k larger than the dataset yields every row.
NeighborList exact_knn(const Dataset& data, std::span<const float> q, std::size_t k);

/// The n codes nearest to q under `metric`; ties to the lower row index.
NeighborList proxy_knn(const TernaryCodeSet& codes, const PackedTernary& q, std::size_t n,
                       ProxyMetric metric = ProxyMetric::NegatedScalarProduct);
NeighborList proxy_knn(const BinaryCodeSet& codes, const PackedBinary& q, std::size_t n);
/// Uses row `query_row` of `queries` as the query code. Throws ValidationError
/// when the two code sets were built with different quantisers or shapes.
NeighborList proxy_knn(const ProxyCodes& codes, const ProxyCodes& queries, std::size_t query_row,
                       std::size_t n);

/// |top-k(truth) intersect top-n(proxy)| / k. Throws ValidationError if either
/// list is too short or k == 0.
double recall_k_at_n(const NeighborList& truth, const NeighborList& proxy, std::size_t k,
                     std::size_t n);

/// Re-scores candidates by exact Euclidean distance to q and keeps the best k.
NeighborList rerank(const NeighborList& candidates, const Dataset& data,
                    std::span<const float> q, std::size_t k);

inline constexpr std::size_t kRecallHistogramBins = 20;

struct RecallReport {
  std::string quantizer;
  std::size_t k = 0;
  std::size_t n = 0;
  std::vector<double> per_query;
  double mean = 0.0;

  /// Counts over 20 equal bins on [0, 1]; a recall of exactly 1 lands in the
  /// last bin.
  std::array<std::size_t, kRecallHistogramBins> histogram() const;
};

/// exact_knn for every query row.
std::vector<NeighborList> compute_ground_truth(const Dataset& data, const Dataset& queries,
                                               std::size_t k, std::size_t threads = 0);

/// As compute_ground_truth, but reuses `cache_dir/gt-<data>-<queries>-k<k>.bin`
/// (keyed by content hashes) when present and writes it otherwise.
std::vector<NeighborList> load_or_compute_ground_truth(const Dataset& data, const Dataset& queries,
                                                       std::size_t k,
                                                       const std::filesystem::path& cache_dir,
                                                       std::size_t threads = 0);

/// proxy_knn for every query row.
std::vector<NeighborList> proxy_rankings(const ProxyCodes& codes, const ProxyCodes& query_codes,
                                         std::size_t n, std::size_t threads = 0);

/// One report per n in `ns`, comparing each truth list with its proxy list.
std::vector<RecallReport> recall_reports(std::span<const NeighborList> truth,
                                         std::span<const NeighborList> proxy, std::size_t k,
                                         std::span<const std::size_t> ns, const std::string& label);

struct RecallOptions {
  std::size_t k = 30;
  std::vector<std::size_t> ns{30, 50, 100, 200, 500};
  std::size_t threads = 0;
  std::optional<std::filesystem::path> ground_truth_cache;
};

/// Quantises data and queries with the same config, ranks every query in
/// proxy space to depth max(ns), and reports k@n recall against the exact
/// Euclidean ranking for each n.
std::vector<RecallReport> run_recall_experiment(const Dataset& data, const Dataset& queries,
                                                const QuantizerConfig& quantizer,
                                                const RecallOptions& options);

/// Same, reusing precomputed ground truth (one list of >= k entries per query).
std::vector<RecallReport> run_recall_experiment(const Dataset& data, const Dataset& queries,
                                                std::span<const NeighborList> truth,
                                                const QuantizerConfig& quantizer,
                                                const RecallOptions& options);

}  // namespace evpq
