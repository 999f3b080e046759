#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evpq/error.hpp"
#include "evpq/quantize.hpp"
#include "evpq/random.hpp"
#include "oracles.hpp"

using namespace evpq;

namespace {

std::vector<float> random_vector(Rng& rng, std::size_t d) {
  std::vector<float> v(d);
  for (auto& x : v) x = static_cast<float>(rng.normal());
  return v;
}

std::vector<std::int8_t> negate(std::vector<std::int8_t> v) {
  for (auto& x : v) x = static_cast<std::int8_t>(-x);
  return v;
}

}  // namespace

TEST(SelectX, PublishedInstances) {
  EXPECT_EQ(select_x(100), 67U);
  EXPECT_EQ(select_x(384), 256U);
  EXPECT_EQ(select_x(500), 333U);
  EXPECT_EQ(select_x(1000), 667U);
  EXPECT_EQ(select_x(3), 2U);
  EXPECT_THROW(select_x(1), ValidationError);
}

TEST(SelectX, MaximisesVertexCount) {
  // Brute-force argmax of C(d,x) 2^x, comparing exact term-by-term sums.
  for (std::size_t d = 2; d <= 1200; ++d) {
    std::size_t best = 1;
    double best_value = oracle::log10_vertices_by_sum(d, 1);
    for (std::size_t x = 2; x <= d; ++x) {
      const double value = oracle::log10_vertices_by_sum(d, x);
      if (value > best_value + 1e-9) {
        best_value = value;
        best = x;
      }
    }
    ASSERT_EQ(select_x(d), best) << "d=" << d;
  }
}

TEST(Log10VertexCount, Examples) {
  EXPECT_NEAR(log10_vertex_count({3, 2}), std::log10(12.0), 1e-9);
  EXPECT_NEAR(log10_vertex_count({100, 67}), 46.0, 1.0);
  EXPECT_NEAR(log10_vertex_count({500, 333}), 237.0, 0.5);
  EXPECT_NEAR(log10_vertex_count({40, 40}), 40 * std::log10(2.0), 1e-9);
  for (auto [d, x] : {std::pair<std::size_t, std::size_t>{384, 256}, {1000, 667}, {17, 5}}) {
    EXPECT_NEAR(log10_vertex_count({d, x}), oracle::log10_vertices_by_sum(d, x), 1e-8);
  }
}

TEST(EvpConfig, Validates) {
  EXPECT_THROW(EvpConfig(10, 0), ValidationError);
  EXPECT_THROW(EvpConfig(10, 11), ValidationError);
  EXPECT_THROW(EvpConfig(0, 0), ValidationError);
  EXPECT_EQ(EvpConfig::for_dimension(384).nonzeros, 256U);
}

TEST(EvpQuantize, WorkedExample) {
  EXPECT_EQ(evp_quantize(oracle::kU1, {10, 5}).elems, oracle::kV1);
  // The published v2 has -1 at position 8 where u2 holds +0.4; every other
  // entry follows the sign rule, and flipping that input reproduces v2.
  auto v2 = oracle::kV2;
  v2[8] = 1;
  EXPECT_EQ(evp_quantize(oracle::kU2, {10, 5}).elems, v2);
  auto u2 = oracle::kU2;
  u2[8] = -u2[8];
  EXPECT_EQ(evp_quantize(u2, {10, 5}).elems, oracle::kV2);
}

TEST(EvpQuantize, SmallExamples) {
  EXPECT_EQ(evp_quantize(std::vector<float>{1, 0, 0}, {3, 1}).elems,
            (std::vector<std::int8_t>{1, 0, 0}));
  const std::vector<float> u{0.1F, -0.2F, 0.3F};
  const auto expected = oracle::best_vertex(u, 2);
  EXPECT_EQ(expected, (std::vector<std::int8_t>{0, -1, 1}));
  EXPECT_EQ(evp_quantize(u, {3, 2}).elems, expected);
}

TEST(EvpQuantize, TiesPreferLowerIndex) {
  const std::vector<float> u{0.5F, -0.5F, 0.5F, 0.1F};
  EXPECT_EQ(evp_quantize(u, {4, 2}).elems, (std::vector<std::int8_t>{1, -1, 0, 0}));
}

TEST(EvpQuantize, SelectedZerosStayZero) {
  const std::vector<float> u{0.0F, 2.0F, 0.0F, 0.0F};
  auto v = evp_quantize(u, {4, 3});
  EXPECT_EQ(v.elems, (std::vector<std::int8_t>{0, 1, 0, 0}));
  EXPECT_EQ(v.nonzeros(), 1U);
  EXPECT_EQ(v.nonzero_budget, 3U);
}

TEST(EvpQuantize, DimensionMismatch) {
  EXPECT_THROW(evp_quantize(std::vector<float>{1, 2, 3}, {4, 2}), ValidationError);
}

TEST(EvpQuantize, OptimalAgainstExhaustiveSearch) {
  Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + rng.below(10);
    const std::size_t x = 1 + rng.below(d);
    const auto u = random_vector(rng, d);
    const auto v = evp_quantize(u, {d, x});
    EXPECT_GE(oracle::ternary_float_dot(v.elems, u), oracle::best_vertex_product(u, x) - 1e-9);
    EXPECT_EQ(v.nonzeros(), x);
  }
}

TEST(EvpQuantize, SignSymmetryAndPermutationEquivariance) {
  Rng rng(202);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + rng.below(60);
    const std::size_t x = 1 + rng.below(d);
    auto u = random_vector(rng, d);
    const auto v = evp_quantize(u, {d, x}).elems;

    std::vector<float> neg(u);
    for (auto& e : neg) e = -e;
    EXPECT_EQ(evp_quantize(neg, {d, x}).elems, negate(v));

    std::vector<std::size_t> perm(d);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = d; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    std::vector<float> permuted(d);
    for (std::size_t i = 0; i < d; ++i) permuted[i] = u[perm[i]];
    const auto pv = evp_quantize(permuted, {d, x}).elems;
    for (std::size_t i = 0; i < d; ++i) ASSERT_EQ(pv[i], v[perm[i]]);
  }
}

TEST(OneBitQuantize, WorkedExample) {
  auto bits = one_bit_quantize(oracle::kU1);
  // Sign rule applied per coordinate of the published row.
  for (std::size_t i = 0; i < oracle::kU1.size(); ++i) {
    EXPECT_EQ(bits.test(i), oracle::kU1[i] > 0) << i;
  }
  const std::vector<int> expected{1, 1, 0, 0, 1, 1, 1, 0, 1, 0};
  for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_EQ(bits.test(i), expected[i] == 1);
}

TEST(OneBitQuantize, SignSymmetry) {
  auto all_pos = one_bit_quantize(std::vector<float>(70, 0.25F));
  for (std::size_t i = 0; i < 70; ++i) EXPECT_TRUE(all_pos.test(i));
  Rng rng(3);
  auto u = random_vector(rng, 130);
  std::vector<float> neg(u);
  for (auto& e : neg) e = -e;
  auto a = one_bit_quantize(u);
  auto b = one_bit_quantize(neg);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NE(a.test(i), b.test(i));
  EXPECT_THROW(one_bit_quantize(std::vector<float>{}), ValidationError);
}

TEST(OneBitQuantize, MatchesFullBudgetEvpVertex) {
  Rng rng(4);
  auto u = random_vector(rng, 77);
  auto bits = one_bit_quantize(u);
  auto vertex = evp_quantize(u, {77, 77});
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_EQ(bits.test(i), vertex.elems[i] == 1);
}

TEST(B158Quantize, WorkedExample) {
  // gamma = 2.88 / 10 = 0.288; codes frozen from evaluating the formula by hand.
  auto v = b158_quantize(oracle::kU1);
  EXPECT_EQ(v.elems, (std::vector<std::int8_t>{1, 1, -1, -1, 1, 1, 1, -1, 1, 0}));
  EXPECT_FALSE(v.nonzero_budget.has_value());
}

TEST(B158Quantize, ConstantAndScaleInvariance) {
  EXPECT_EQ(b158_quantize(std::vector<float>(9, 0.3F)).elems, std::vector<std::int8_t>(9, 1));
  EXPECT_EQ(b158_quantize(std::vector<float>(5, 0.0F)).elems, std::vector<std::int8_t>(5, 0));
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    auto u = random_vector(rng, 50);
    std::vector<float> doubled(u);
    for (auto& e : doubled) e *= 2;
    EXPECT_EQ(b158_quantize(u).elems, b158_quantize(doubled).elems);
  }
}

TEST(B158Quantize, RoundsToNearestAfterScaling) {
  // gamma = 1, so +-0.5 sits just below the half after adding epsilon.
  const std::vector<float> u{0.5F, -0.5F, 2.0F, -1.0F};
  B158Config cfg{1e-12};
  EXPECT_EQ(b158_quantize(u, cfg).elems, (std::vector<std::int8_t>{0, 0, 1, -1}));
  // gamma = 0.75, and 0.4 / 0.75 rounds up.
  const std::vector<float> w{0.4F, -0.4F, 1.5F, -0.7F};
  EXPECT_EQ(b158_quantize(w, cfg).elems, (std::vector<std::int8_t>{1, -1, 1, -1}));
  EXPECT_THROW(b158_quantize(u, B158Config{0.0}), ValidationError);
}

TEST(QuantizerKind, ParseRoundTrip) {
  for (auto k : {QuantizerKind::Evp, QuantizerKind::OneBit, QuantizerKind::B158}) {
    EXPECT_EQ(parse_quantizer_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_quantizer_kind("pq"), ValidationError);
}

TEST(EncodeDataset, IndependentOfThreadCount) {
  auto data = generate_uniform_sphere(12, 301, 40);
  for (auto kind : {QuantizerKind::Evp, QuantizerKind::OneBit, QuantizerKind::B158}) {
    QuantizerConfig cfg{kind, std::nullopt, 1e-6};
    auto one = encode_dataset(data, cfg, 1);
    auto four = encode_dataset(data, cfg, 4);
    if (one.ternary()) {
      EXPECT_EQ(*one.ternary(), *four.ternary());
    } else {
      EXPECT_EQ(*one.binary(), *four.binary());
    }
  }
}

TEST(EncodeDataset, RowsMatchSingleVectorQuantisers) {
  auto data = generate_uniform_sphere(13, 20, 100);
  auto evp = encode_dataset(data, {QuantizerKind::Evp, std::nullopt, 1e-6});
  ASSERT_EQ(evp.ternary()->nonzero_budget(), 67U);
  for (std::size_t r = 0; r < data.size(); ++r) {
    EXPECT_EQ(unpack(evp.ternary()->row(r)).elems, evp_quantize(data.row(r), {100, 67}).elems);
    EXPECT_EQ(evp.ternary()->nonzeros(r), 67U);
  }
  EXPECT_THROW(encode_dataset(data, {QuantizerKind::Evp, 101, 1e-6}), ValidationError);
}

TEST(ProxyCodes, DistanceRules) {
  auto data = generate_uniform_sphere(14, 10, 30);
  auto evp = encode_dataset(data, {QuantizerKind::Evp, std::nullopt, 1e-6});
  auto b158 = encode_dataset(data, {QuantizerKind::B158, std::nullopt, 1e-6});
  auto bits = encode_dataset(data, {QuantizerKind::OneBit, std::nullopt, 1e-6});
  EXPECT_EQ(evp.distance(3, evp, 3), -20);
  EXPECT_EQ(b158.distance(3, b158, 3), 0);
  EXPECT_EQ(bits.distance(3, bits, 3), 0);
  for (std::size_t i = 0; i < 10; ++i) {
    for (std::size_t j = 0; j < 10; ++j) {
      const auto a = unpack(b158.ternary()->row(i)).elems;
      const auto b = unpack(b158.ternary()->row(j)).elems;
      std::int64_t sq = 0;
      for (std::size_t c = 0; c < a.size(); ++c) sq += (a[c] - b[c]) * (a[c] - b[c]);
      EXPECT_EQ(b158.distance(i, b158, j), sq);
    }
  }
  EXPECT_THROW(evp.require_compatible(b158), ValidationError);
}
