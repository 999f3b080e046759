#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "evpq/byteio.hpp"
#include "evpq/error.hpp"
#include "evpq/metrics.hpp"
#include "evpq/random.hpp"
#include "evpq/vecstore.hpp"

namespace fs = std::filesystem;
using namespace evpq;

namespace {

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "evpq_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(L2Normalize, Examples) {
  auto a = l2_normalize(std::vector<float>{3, 4});
  EXPECT_FLOAT_EQ(a[0], 0.6F);
  EXPECT_FLOAT_EQ(a[1], 0.8F);
  auto b = l2_normalize(std::vector<float>{1, 0, 0});
  EXPECT_EQ(b, (std::vector<float>{1, 0, 0}));
  auto c = l2_normalize(std::vector<float>{1, 1});
  EXPECT_NEAR(c[0], 1.0 / std::sqrt(2.0), 1e-7);
  EXPECT_NEAR(c[1], 1.0 / std::sqrt(2.0), 1e-7);
}

TEST(L2Normalize, ZeroVectorIsAnError) {
  try {
    l2_normalize(std::vector<float>{0, 0, 0});
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "cannot normalise zero vector");
  }
}

TEST(Dataset, RejectsRaggedAndNonFinite) {
  EXPECT_THROW(Dataset("x", 3, std::vector<float>(7)), ValidationError);
  EXPECT_THROW(Dataset("x", 0, {}), ValidationError);
  EXPECT_THROW(Dataset("x", 2, {1.0F, NAN}), ValidationError);
  EXPECT_THROW(Dataset("x", 2, {1.0F, INFINITY}), ValidationError);
}

TEST(Rng, BoxMullerIsDeterministicAndStandard) {
  Rng a(11), b(11);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = a.normal();
    EXPECT_EQ(x, b.normal());
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(Rng, BelowStaysInRange) {
  Rng rng(5);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 70000; ++i) hits[rng.below(7)]++;
  for (int h : hits) EXPECT_NEAR(h, 10000, 500);
}

TEST(GenerateUniformSphere, UnitNormAndDeterministic) {
  auto a = generate_uniform_sphere(7, 5, 100);
  auto b = generate_uniform_sphere(7, 5, 100);
  ASSERT_EQ(a.size(), 5U);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(l2_norm(a.row(i)), 1.0, 1e-6);
  EXPECT_TRUE(a.is_normalized());
  ASSERT_EQ(a.values().size(), b.values().size());
  EXPECT_EQ(0, std::memcmp(a.values().data(), b.values().data(), a.values().size() * sizeof(float)));
  EXPECT_NE(a.content_hash(), generate_uniform_sphere(8, 5, 100).content_hash());
}

TEST(GenerateUniformSphere, CoordinateMeansVanish) {
  // Direct statistic over the generated set.
  auto data = generate_uniform_sphere(1, 100000, 100);
  std::vector<double> mean(100, 0.0);
  for (std::size_t r = 0; r < data.size(); ++r) {
    auto row = data.row(r);
    for (std::size_t c = 0; c < 100; ++c) mean[c] += row[c];
  }
  for (double m : mean) EXPECT_LT(std::abs(m / 100000.0), 0.02);
}

TEST(GenerateUniformSphere, RejectsEmptyShape) {
  EXPECT_THROW(generate_uniform_sphere(1, 0, 4), ValidationError);
  EXPECT_THROW(generate_uniform_sphere(1, 4, 0), ValidationError);
}

TEST(RandomRotation, Orthonormal) {
  for (std::size_t d : {1U, 2U, 8U, 50U}) {
    auto q = random_rotation(3, d);
    double worst = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) s += q.at(i, c) * q.at(j, c);
        worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
      }
    }
    EXPECT_LE(worst, 1e-6) << "d=" << d;
  }
}

TEST(RandomRotation, DeterministicPerSeed) {
  auto a = random_rotation(3, 8);
  auto b = random_rotation(3, 8);
  auto c = random_rotation(4, 8);
  EXPECT_TRUE(std::equal(a.entries().begin(), a.entries().end(), b.entries().begin()));
  EXPECT_FALSE(std::equal(a.entries().begin(), a.entries().end(), c.entries().begin()));
}

TEST(RandomRotation, IsometryOnRandomPairs) {
  auto q = random_rotation(3, 32);
  auto data = generate_uniform_sphere(9, 200, 32);
  auto rotated = q.apply(data);
  for (std::size_t i = 0; i < 100; ++i) {
    const std::size_t a = 2 * i;
    const std::size_t b = 2 * i + 1;
    EXPECT_NEAR(l2_norm(rotated.row(a)), 1.0, 1e-6);
    EXPECT_NEAR(euclidean(rotated.row(a), rotated.row(b)), euclidean(data.row(a), data.row(b)), 1e-6);
    EXPECT_NEAR(dot(rotated.row(a), rotated.row(b)), dot(data.row(a), data.row(b)), 1e-6);
  }
}

TEST(DatasetIo, RawF32SizeArithmetic) {
  const auto path = temp_path("two_rows.f32");
  {
    std::ofstream out(path, std::ios::binary);
    for (int i = 0; i < 8; ++i) byteio::write_le(out, static_cast<float>(i));
  }
  auto data = load_dataset(path, DataFormat::RawF32, 4);
  ASSERT_EQ(data.size(), 2U);
  EXPECT_EQ(data.row(1)[3], 7.0F);
  EXPECT_THROW(load_dataset(path, DataFormat::RawF32, 3), ParseError);
}

TEST(DatasetIo, RoundTripIsValueExact) {
  auto data = generate_uniform_sphere(21, 13, 7);
  for (auto format : {DataFormat::RawF32, DataFormat::Fvecs, DataFormat::Csv}) {
    const auto path = temp_path(std::string("round_trip.") + std::string(to_string(format)));
    write_dataset(path, data, format);
    auto back = load_dataset(path, format, 7);
    ASSERT_EQ(back.size(), data.size());
    EXPECT_TRUE(std::equal(data.values().begin(), data.values().end(), back.values().begin()))
        << to_string(format);
  }
}

TEST(DatasetIo, FvecsDimensionMismatch) {
  const auto path = temp_path("d100.fvecs");
  write_dataset(path, generate_uniform_sphere(1, 3, 100), DataFormat::Fvecs);
  try {
    load_dataset(path, DataFormat::Fvecs, 384);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("offset 0"), std::string::npos) << e.what();
  }
}

TEST(DatasetIo, CsvErrorsNameTheLine) {
  const auto path = temp_path("bad.csv");
  {
    std::ofstream out(path);
    out << "1,2,3\n4,five,6\n";
  }
  try {
    load_dataset(path, DataFormat::Csv, 3);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  {
    std::ofstream out(path);
    out << "1, 2 ,3\n\n4,5\n";
  }
  EXPECT_THROW(load_dataset(path, DataFormat::Csv, 3), ParseError);
}

TEST(DatasetIo, MissingFileIsIoError) {
  EXPECT_THROW(load_dataset(temp_path("does_not_exist.f32"), DataFormat::RawF32, 4), IoError);
}

TEST(DatasetIo, ParseFormat) {
  EXPECT_EQ(parse_data_format("fvecs"), DataFormat::Fvecs);
  EXPECT_EQ(parse_data_format("raw-f32"), DataFormat::RawF32);
  EXPECT_EQ(parse_data_format("csv"), DataFormat::Csv);
  EXPECT_THROW(parse_data_format("parquet"), ValidationError);
}
