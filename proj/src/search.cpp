#include "evpq/search.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "evpq/byteio.hpp"
#include "evpq/error.hpp"
#include "evpq/metrics.hpp"
#include "evpq/parallel.hpp"

namespace evpq {

namespace {

/// Keeps the `limit` smallest (score, index) pairs seen so far.
template <typename Score>
class TopSelector {
 public:
  explicit TopSelector(std::size_t limit) : limit_(limit) {}

  void offer(Score score, std::size_t index) {
    if (limit_ == 0) return;
    if (heap_.size() < limit_) {
      heap_.emplace(score, index);
    } else if (std::pair(score, index) < heap_.top()) {
      heap_.pop();
      heap_.emplace(score, index);
    }
  }

  NeighborList finish() {
    NeighborList out;
    out.entries.resize(heap_.size());
    for (std::size_t i = heap_.size(); i-- > 0;) {
      out.entries[i] = {heap_.top().second, static_cast<double>(heap_.top().first)};
      heap_.pop();
    }
    return out;
  }

 private:
  std::size_t limit_;
  std::priority_queue<std::pair<Score, std::size_t>> heap_;
};

void require_dim(std::size_t expected, std::size_t got) {
  if (expected != got) {
    throw ValidationError("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                          std::to_string(got));
  }
}

}  // namespace

std::vector<std::size_t> NeighborList::indices() const {
  std::vector<std::size_t> out(entries.size());
  std::transform(entries.begin(), entries.end(), out.begin(), [](const Neighbor& n) { return n.index; });
  return out;
}

NeighborList exact_knn(const Dataset& data, std::span<const float> q, std::size_t k) {
  if (k == 0) throw ValidationError("k must be >= 1");
  require_dim(data.dim(), q.size());
  TopSelector<double> top(std::min(k, data.size()));
  for (std::size_t r = 0; r < data.size(); ++r) top.offer(squared_euclidean(data.row(r), q), r);
  auto out = top.finish();
  for (auto& e : out.entries) e.score = std::sqrt(e.score);
  return out;
}

NeighborList proxy_knn(const TernaryCodeSet& codes, const PackedTernary& q, std::size_t n,
                       ProxyMetric metric) {
  if (n == 0) throw ValidationError("n must be >= 1");
  require_dim(codes.dim(), q.dim());
  if (metric == ProxyMetric::Hamming) throw ValidationError("Hamming metric needs binary codes");
  const std::size_t words = codes.words_per_plane();
  const auto q_nonzeros = static_cast<std::int64_t>(q.nonzeros());
  TopSelector<std::int64_t> top(std::min(n, codes.size()));
  for (std::size_t r = 0; r < codes.size(); ++r) {
    const std::int64_t sp =
        b2sp_words(codes.plus_data(r), codes.minus_data(r), q.plus().data(), q.minus().data(), words);
    const std::int64_t score = metric == ProxyMetric::NegatedScalarProduct
                                   ? -sp
                                   : static_cast<std::int64_t>(codes.nonzeros(r)) + q_nonzeros - 2 * sp;
    top.offer(score, r);
  }
  return top.finish();
}

NeighborList proxy_knn(const BinaryCodeSet& codes, const PackedBinary& q, std::size_t n) {
  if (n == 0) throw ValidationError("n must be >= 1");
  require_dim(codes.dim(), q.dim());
  const std::size_t words = codes.words_per_plane();
  TopSelector<std::int64_t> top(std::min(n, codes.size()));
  for (std::size_t r = 0; r < codes.size(); ++r) {
    top.offer(hamming_words(codes.row_data(r), q.bits().data(), words), r);
  }
  return top.finish();
}

NeighborList proxy_knn(const ProxyCodes& codes, const ProxyCodes& queries, std::size_t query_row,
                       std::size_t n) {
  codes.require_compatible(queries);
  if (query_row >= queries.size()) throw ValidationError("query row out of range");
  if (const auto* t = codes.ternary()) {
    return proxy_knn(*t, queries.ternary()->row(query_row), n, codes.metric());
  }
  return proxy_knn(*codes.binary(), queries.binary()->row(query_row), n);
}

double recall_k_at_n(const NeighborList& truth, const NeighborList& proxy, std::size_t k,
                     std::size_t n) {
  if (k == 0) throw ValidationError("k must be >= 1");
  if (truth.size() < k) {
    throw ValidationError("truth list has " + std::to_string(truth.size()) + " entries, need k=" +
                          std::to_string(k));
  }
  if (proxy.size() < n) {
    throw ValidationError("proxy list has " + std::to_string(proxy.size()) + " entries, need n=" +
                          std::to_string(n));
  }
  std::unordered_set<std::size_t> candidates;
  candidates.reserve(n);
  for (std::size_t i = 0; i < n; ++i) candidates.insert(proxy[i].index);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) hits += candidates.count(truth[i].index);
  return static_cast<double>(hits) / static_cast<double>(k);
}

NeighborList rerank(const NeighborList& candidates, const Dataset& data, std::span<const float> q,
                    std::size_t k) {
  if (candidates.entries.empty()) throw ValidationError("rerank needs at least one candidate");
  if (k == 0 || k > candidates.size()) {
    throw ValidationError("rerank k must satisfy 1 <= k <= candidate count");
  }
  require_dim(data.dim(), q.size());
  TopSelector<double> top(k);
  for (const auto& c : candidates.entries) {
    if (c.index >= data.size()) {
      throw ValidationError("candidate index " + std::to_string(c.index) + " out of range");
    }
    top.offer(squared_euclidean(data.row(c.index), q), c.index);
  }
  auto out = top.finish();
  for (auto& e : out.entries) e.score = std::sqrt(e.score);
  return out;
}

std::array<std::size_t, kRecallHistogramBins> RecallReport::histogram() const {
  std::array<std::size_t, kRecallHistogramBins> bins{};
  for (double r : per_query) {
    auto bin = static_cast<std::size_t>(r * kRecallHistogramBins);
    bins[std::min(bin, kRecallHistogramBins - 1)]++;
  }
  return bins;
}

std::vector<NeighborList> compute_ground_truth(const Dataset& data, const Dataset& queries,
                                               std::size_t k, std::size_t threads) {
  require_dim(data.dim(), queries.dim());
  std::vector<NeighborList> truth(queries.size());
  parallel_for(queries.size(), threads,
               [&](std::size_t q) { truth[q] = exact_knn(data, queries.row(q), k); });
  return truth;
}

namespace {

constexpr char kTruthMagic[4] = {'E', 'V', 'G', 'T'};

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

std::optional<std::vector<NeighborList>> read_truth(const std::filesystem::path& path,
                                                    std::size_t k, std::size_t queries) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  char magic[4];
  std::uint32_t file_k = 0;
  std::uint64_t count = 0;
  if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kTruthMagic) ||
      !byteio::read_le(in, file_k) || !byteio::read_le(in, count) || file_k != k ||
      count != queries) {
    return std::nullopt;
  }
  std::vector<NeighborList> truth(queries);
  for (auto& list : truth) {
    std::uint32_t len = 0;
    if (!byteio::read_le(in, len)) return std::nullopt;
    list.entries.resize(len);
    for (auto& e : list.entries) {
      std::uint64_t index = 0;
      if (!byteio::read_le(in, index) || !byteio::read_le(in, e.score)) return std::nullopt;
      e.index = static_cast<std::size_t>(index);
    }
  }
  return truth;
}

void write_truth(const std::filesystem::path& path, std::size_t k,
                 std::span<const NeighborList> truth) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write ground-truth cache '" + tmp + "'");
    out.write(kTruthMagic, 4);
    byteio::write_le(out, static_cast<std::uint32_t>(k));
    byteio::write_le(out, static_cast<std::uint64_t>(truth.size()));
    for (const auto& list : truth) {
      byteio::write_le(out, static_cast<std::uint32_t>(list.size()));
      for (const auto& e : list.entries) {
        byteio::write_le(out, static_cast<std::uint64_t>(e.index));
        byteio::write_le(out, e.score);
      }
    }
    if (!out) throw IoError("write to '" + tmp + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::vector<NeighborList> load_or_compute_ground_truth(const Dataset& data, const Dataset& queries,
                                                       std::size_t k,
                                                       const std::filesystem::path& cache_dir,
                                                       std::size_t threads) {
  std::error_code ec;
  std::filesystem::create_directories(cache_dir, ec);
  if (ec) throw IoError("cannot create cache directory '" + cache_dir.string() + "'");
  const auto path = cache_dir / ("gt-" + hex64(data.content_hash()) + "-" +
                                 hex64(queries.content_hash()) + "-k" + std::to_string(k) + ".bin");
  if (auto cached = read_truth(path, k, queries.size())) return std::move(*cached);
  auto truth = compute_ground_truth(data, queries, k, threads);
  write_truth(path, k, truth);
  return truth;
}

std::vector<NeighborList> proxy_rankings(const ProxyCodes& codes, const ProxyCodes& query_codes,
                                         std::size_t n, std::size_t threads) {
  codes.require_compatible(query_codes);
  std::vector<NeighborList> out(query_codes.size());
  parallel_for(query_codes.size(), threads,
               [&](std::size_t q) { out[q] = proxy_knn(codes, query_codes, q, n); });
  return out;
}

std::vector<RecallReport> recall_reports(std::span<const NeighborList> truth,
                                         std::span<const NeighborList> proxy, std::size_t k,
                                         std::span<const std::size_t> ns, const std::string& label) {
  if (truth.size() != proxy.size()) throw ValidationError("truth/proxy query counts differ");
  if (truth.empty()) throw ValidationError("recall needs at least one query");
  std::vector<RecallReport> reports;
  for (std::size_t n : ns) {
    RecallReport report;
    report.quantizer = label;
    report.k = k;
    report.n = n;
    report.per_query.reserve(truth.size());
    double sum = 0.0;
    for (std::size_t q = 0; q < truth.size(); ++q) {
      const double r = recall_k_at_n(truth[q], proxy[q], k, n);
      report.per_query.push_back(r);
      sum += r;
    }
    report.mean = sum / static_cast<double>(truth.size());
    reports.push_back(std::move(report));
  }
  return reports;
}

std::vector<RecallReport> run_recall_experiment(const Dataset& data, const Dataset& queries,
                                                std::span<const NeighborList> truth,
                                                const QuantizerConfig& quantizer,
                                                const RecallOptions& options) {
  if (options.ns.empty()) throw ValidationError("recall needs at least one n");
  const std::size_t depth = *std::max_element(options.ns.begin(), options.ns.end());
  if (depth > data.size()) {
    throw ValidationError("n=" + std::to_string(depth) + " exceeds the dataset size " +
                          std::to_string(data.size()));
  }
  const auto codes = encode_dataset(data, quantizer, options.threads);
  const auto query_codes = encode_dataset(queries, quantizer, options.threads);
  const auto proxy = proxy_rankings(codes, query_codes, depth, options.threads);
  return recall_reports(truth, proxy, options.k, options.ns, std::string(to_string(quantizer.kind)));
}

std::vector<RecallReport> run_recall_experiment(const Dataset& data, const Dataset& queries,
                                                const QuantizerConfig& quantizer,
                                                const RecallOptions& options) {
  if (options.k > data.size()) throw ValidationError("k exceeds the dataset size");
  const auto truth = options.ground_truth_cache
                         ? load_or_compute_ground_truth(data, queries, options.k,
                                                        *options.ground_truth_cache, options.threads)
                         : compute_ground_truth(data, queries, options.k, options.threads);
  return run_recall_experiment(data, queries, truth, quantizer, options);
}

}  // namespace evpq
