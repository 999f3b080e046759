#include "evpq/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "evpq/error.hpp"
#include "evpq/parallel.hpp"
#include "evpq/random.hpp"

namespace evpq {

namespace {

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) {
    throw ValidationError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

double dot(std::span<const float> u, std::span<const float> v) {
  require_same_size(u.size(), v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += static_cast<double>(u[i]) * v[i];
  return sum;
}

double squared_euclidean(std::span<const float> u, std::span<const float> v) {
  require_same_size(u.size(), v.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double diff = static_cast<double>(u[i]) - v[i];
    sum += diff * diff;
  }
  return sum;
}

double euclidean(std::span<const float> u, std::span<const float> v) {
  return std::sqrt(squared_euclidean(u, v));
}

float euclidean_f32(const float* u, const float* v, std::size_t dim) {
  float sum = 0.0F;
  for (std::size_t i = 0; i < dim; ++i) {
    const float diff = u[i] - v[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

std::vector<IndexPair> sample_pairs(std::size_t rows, std::size_t count, std::uint64_t seed) {
  if (rows < 2) throw ValidationError("pair sampling needs at least 2 rows");
  const std::uint64_t total = static_cast<std::uint64_t>(rows) * (rows - 1) / 2;
  if (count > total) {
    throw ValidationError("requested " + std::to_string(count) + " pairs but only " +
                          std::to_string(total) + " distinct pairs exist");
  }
  Rng rng(seed);
  std::vector<IndexPair> out;
  out.reserve(count);

  if (count * 2 >= total) {
    // Dense request: enumerate every pair, then a partial Fisher-Yates shuffle.
    std::vector<IndexPair> all;
    all.reserve(static_cast<std::size_t>(total));
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = i + 1; j < rows; ++j) all.push_back({i, j});
    }
    for (std::size_t k = 0; k < count; ++k) {
      const auto pick = k + static_cast<std::size_t>(rng.below(all.size() - k));
      std::swap(all[k], all[pick]);
      out.push_back(all[k]);
    }
    return out;
  }

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(count * 2);
  while (out.size() < count) {
    auto i = static_cast<std::size_t>(rng.below(rows));
    auto j = static_cast<std::size_t>(rng.below(rows - 1));
    if (j >= i) ++j;
    if (i > j) std::swap(i, j);
    if (seen.insert(static_cast<std::uint64_t>(i) * rows + j).second) out.push_back({i, j});
  }
  return out;
}

std::vector<IndexPair> sample_pairs(const Dataset& data, std::size_t count, std::uint64_t seed) {
  return sample_pairs(data.size(), count, seed);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start + 1;
    while (end < order.size() && values[order[end]] == values[order[start]]) ++end;
    // Positions start..end-1 hold equal values; ranks are 1-based.
    const double rank = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t k = start; k < end; ++k) ranks[order[k]] = rank;
    start = end;
  }
  return ranks;
}

double spearman_rho(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || xs.size() != ys.size()) {
    throw ValidationError("spearman_rho needs two nonempty sequences of equal length");
  }
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double mean = 0.5 * static_cast<double>(xs.size() + 1);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ValidationError("degenerate ranks");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> DistancePairSample::true_distances() const {
  std::vector<double> out(pairs.size());
  std::transform(pairs.begin(), pairs.end(), out.begin(),
                 [](const PairValue& p) { return p.true_distance; });
  return out;
}

std::vector<double> DistancePairSample::proxy_values() const {
  std::vector<double> out(pairs.size());
  std::transform(pairs.begin(), pairs.end(), out.begin(),
                 [](const PairValue& p) { return p.proxy_value; });
  return out;
}

DistancePairSample measure_pairs(const Dataset& data, const ProxyCodes& codes,
                                 std::span<const IndexPair> pairs, std::uint64_t sample_seed,
                                 std::size_t threads) {
  if (codes.size() != data.size() || codes.dim() != data.dim()) {
    throw ValidationError("codes do not match the dataset shape");
  }
  if (pairs.empty()) throw ValidationError("pair sample must be nonempty");
  DistancePairSample sample;
  sample.proxy_kind = codes.kind();
  sample.sample_seed = sample_seed;
  sample.pairs.resize(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t k) {
    const auto [i, j] = pairs[k];
    if (i >= data.size() || j >= data.size()) throw ValidationError("pair index out of range");
    sample.pairs[k] = {euclidean(data.row(i), data.row(j)),
                       static_cast<double>(codes.distance(i, codes, j))};
  });
  return sample;
}

double spearman_rho(const DistancePairSample& sample) {
  const auto proxy = sample.proxy_values();
  const auto truth = sample.true_distances();
  return spearman_rho(proxy, truth);
}

double IsotonicFit::predict(double x) const {
  if (breakpoints.empty()) throw ValidationError("empty isotonic fit");
  if (x <= breakpoints.front()) return levels.front();
  if (x >= breakpoints.back()) return levels.back();
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  const auto hi = static_cast<std::size_t>(it - breakpoints.begin());
  const std::size_t lo = hi - 1;
  const double t = (x - breakpoints[lo]) / (breakpoints[hi] - breakpoints[lo]);
  return levels[lo] + t * (levels[hi] - levels[lo]);
}

IsotonicFit isotonic_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || xs.size() != ys.size()) {
    throw ValidationError("isotonic_fit needs two nonempty sequences of equal length");
  }
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });

  struct Block {
    double sum;
    double weight;
    std::size_t first_x;  // index into `distinct`
    double mean() const { return sum / weight; }
  };
  std::vector<double> distinct;
  std::vector<Block> blocks;
  for (std::size_t k = 0; k < order.size();) {
    const double x = xs[order[k]];
    Block block{0.0, 0.0, distinct.size()};
    for (; k < order.size() && xs[order[k]] == x; ++k) {
      block.sum += ys[order[k]];
      block.weight += 1.0;
    }
    distinct.push_back(x);
    blocks.push_back(block);
    while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
      const Block last = blocks.back();
      blocks.pop_back();
      blocks.back().sum += last.sum;
      blocks.back().weight += last.weight;
    }
  }

  IsotonicFit fit;
  fit.breakpoints = distinct;
  fit.levels.resize(distinct.size());
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::size_t end = b + 1 < blocks.size() ? blocks[b + 1].first_x : distinct.size();
    std::fill(fit.levels.begin() + static_cast<std::ptrdiff_t>(blocks[b].first_x),
              fit.levels.begin() + static_cast<std::ptrdiff_t>(end), blocks[b].mean());
  }
  return fit;
}

IsotonicFit isotonic_fit(const DistancePairSample& sample) {
  const auto proxy = sample.proxy_values();
  const auto truth = sample.true_distances();
  return isotonic_fit(proxy, truth);
}

}  // namespace evpq
