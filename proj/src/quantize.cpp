#include "evpq/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "evpq/error.hpp"
#include "evpq/parallel.hpp"

namespace evpq {

EvpConfig::EvpConfig(std::size_t dim, std::size_t nonzeros) : dim(dim), nonzeros(nonzeros) {
  if (dim == 0) throw ValidationError("EVP dimension must be >= 1");
  if (nonzeros == 0 || nonzeros > dim) {
    throw ValidationError("EVP x must satisfy 1 <= x <= d (got x=" + std::to_string(nonzeros) +
                          ", d=" + std::to_string(dim) + ")");
  }
}

EvpConfig EvpConfig::for_dimension(std::size_t dim) { return EvpConfig(dim, select_x(dim)); }

std::size_t select_x(std::size_t dim) {
  if (dim < 2) throw ValidationError("select_x needs d >= 2");
  // 2d/3 has fractional part 0, 1/3 or 2/3, so adding 1/3 and truncating rounds to nearest.
  return (2 * dim + 1) / 3;
}

double log10_vertex_count(const EvpConfig& cfg) {
  const auto d = static_cast<double>(cfg.dim);
  const auto x = static_cast<double>(cfg.nonzeros);
  const double log_binomial = std::lgamma(d + 1) - std::lgamma(x + 1) - std::lgamma(d - x + 1);
  return log_binomial / std::numbers::ln10 + x * std::log10(2.0);
}

TernaryVector evp_quantize(std::span<const float> u, const EvpConfig& cfg) {
  if (u.size() != cfg.dim) {
    throw ValidationError("evp_quantize: vector has d=" + std::to_string(u.size()) +
                          ", config expects d=" + std::to_string(cfg.dim));
  }
  std::vector<std::uint32_t> order(u.size());
  std::iota(order.begin(), order.end(), 0U);
  const auto larger = [&](std::uint32_t a, std::uint32_t b) {
    const float ma = std::abs(u[a]);
    const float mb = std::abs(u[b]);
    return ma > mb || (ma == mb && a < b);
  };
  const auto cut = order.begin() + static_cast<std::ptrdiff_t>(cfg.nonzeros);
  if (cut != order.end()) std::nth_element(order.begin(), cut - 1, order.end(), larger);

  TernaryVector out;
  out.elems.assign(u.size(), 0);
  out.nonzero_budget = cfg.nonzeros;
  for (auto it = order.begin(); it != cut; ++it) {
    const float value = u[*it];
    out.elems[*it] = static_cast<std::int8_t>((value > 0) - (value < 0));
  }
  return out;
}

PackedBinary one_bit_quantize(std::span<const float> u) {
  if (u.empty()) throw ValidationError("one_bit_quantize: empty vector");
  PackedBinary out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] > 0) out.set(i);
  }
  return out;
}

TernaryVector b158_quantize(std::span<const float> u, const B158Config& cfg) {
  if (u.empty()) throw ValidationError("b158_quantize: empty vector");
  if (!(cfg.epsilon > 0)) throw ValidationError("b158 epsilon must be > 0");
  double gamma = 0.0;
  for (float x : u) gamma += std::abs(static_cast<double>(x));
  gamma /= static_cast<double>(u.size());
  const double scale = gamma + cfg.epsilon;

  TernaryVector out;
  out.elems.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = std::round(static_cast<double>(u[i]) / scale);
    out.elems[i] = static_cast<std::int8_t>(std::clamp(r, -1.0, 1.0));
  }
  return out;
}

QuantizerKind parse_quantizer_kind(std::string_view text) {
  if (text == "evp") return QuantizerKind::Evp;
  if (text == "one-bit" || text == "1-bit" || text == "onebit") return QuantizerKind::OneBit;
  if (text == "b158" || text == "b1.58") return QuantizerKind::B158;
  throw ValidationError("unknown quantizer '" + std::string(text) + "'");
}

std::string_view to_string(QuantizerKind kind) {
  switch (kind) {
    case QuantizerKind::Evp: return "evp";
    case QuantizerKind::OneBit: return "one-bit";
    case QuantizerKind::B158: return "b158";
  }
  return "?";
}

EvpConfig QuantizerConfig::evp_for(std::size_t dim) const {
  return nonzeros ? EvpConfig(dim, *nonzeros) : EvpConfig::for_dimension(dim);
}

ProxyMetric proxy_metric_for(QuantizerKind kind) {
  switch (kind) {
    case QuantizerKind::Evp: return ProxyMetric::NegatedScalarProduct;
    case QuantizerKind::B158: return ProxyMetric::CodeSquaredDistance;
    case QuantizerKind::OneBit: return ProxyMetric::Hamming;
  }
  return ProxyMetric::Hamming;
}

ProxyCodes::ProxyCodes(QuantizerKind kind, TernaryCodeSet codes)
    : kind_(kind), codes_(std::move(codes)) {
  if (kind == QuantizerKind::OneBit) {
    throw ValidationError("one-bit codes cannot be held in a ternary code set");
  }
  if (kind == QuantizerKind::Evp && !std::get<TernaryCodeSet>(codes_).nonzero_budget()) {
    throw ValidationError("EVP code set needs a nonzero budget");
  }
}

ProxyCodes::ProxyCodes(BinaryCodeSet codes) : kind_(QuantizerKind::OneBit), codes_(std::move(codes)) {}

std::size_t ProxyCodes::size() const {
  return std::visit([](const auto& c) { return c.size(); }, codes_);
}

std::size_t ProxyCodes::dim() const {
  return std::visit([](const auto& c) { return c.dim(); }, codes_);
}

void ProxyCodes::require_compatible(const ProxyCodes& other) const {
  if (kind_ != other.kind_) {
    throw ValidationError("quantizer mismatch: " + std::string(to_string(kind_)) + " vs " +
                          std::string(to_string(other.kind_)));
  }
  if (dim() != other.dim()) {
    throw ValidationError("code dimension mismatch: " + std::to_string(dim()) + " vs " +
                          std::to_string(other.dim()));
  }
  if (const auto* t = ternary(); t && t->nonzero_budget() != other.ternary()->nonzero_budget()) {
    throw ValidationError("EVP nonzero budget mismatch");
  }
}

std::int64_t ProxyCodes::distance(std::size_t a, const ProxyCodes& other, std::size_t b) const {
  if (const auto* bin = binary()) {
    return hamming_words(bin->row_data(a), other.binary()->row_data(b), bin->words_per_plane());
  }
  const auto& lhs = *ternary();
  const auto& rhs = *other.ternary();
  const std::int64_t sp = b2sp_words(lhs.plus_data(a), lhs.minus_data(a), rhs.plus_data(b),
                                     rhs.minus_data(b), lhs.words_per_plane());
  if (metric() == ProxyMetric::NegatedScalarProduct) return -sp;
  return static_cast<std::int64_t>(lhs.nonzeros(a) + rhs.nonzeros(b)) - 2 * sp;
}

ProxyCodes encode_dataset(const Dataset& data, const QuantizerConfig& cfg, std::size_t threads) {
  if (data.empty()) throw ValidationError("cannot quantise an empty dataset");
  const std::size_t n = data.size();
  const std::size_t d = data.dim();
  switch (cfg.kind) {
    case QuantizerKind::Evp: {
      const EvpConfig evp = cfg.evp_for(d);
      TernaryCodeSet codes(d, n, evp.nonzeros);
      parallel_for(n, threads, [&](std::size_t r) { codes.assign(r, evp_quantize(data.row(r), evp)); });
      return ProxyCodes(QuantizerKind::Evp, std::move(codes));
    }
    case QuantizerKind::B158: {
      const B158Config b158{cfg.epsilon};
      TernaryCodeSet codes(d, n, std::nullopt);
      parallel_for(n, threads, [&](std::size_t r) { codes.assign(r, b158_quantize(data.row(r), b158)); });
      return ProxyCodes(QuantizerKind::B158, std::move(codes));
    }
    case QuantizerKind::OneBit: {
      BinaryCodeSet codes(d, n);
      parallel_for(n, threads, [&](std::size_t r) { codes.assign(r, one_bit_quantize(data.row(r))); });
      return ProxyCodes(std::move(codes));
    }
  }
  throw ValidationError("unknown quantizer");
}

}  // namespace evpq
