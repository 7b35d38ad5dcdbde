#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "oracles.hpp"
#include "tubal/tubal.hpp"

using tubal::Bytes;
using tubal::Dims;
using tubal::Tensor3;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("tubal_io_test_" + name);
}

Bytes pnm(const std::string& header, const std::vector<std::uint8_t>& raster) {
  Bytes b(header.begin(), header.end());
  b.insert(b.end(), raster.begin(), raster.end());
  return b;
}

}  // namespace

TEST(Rng, SequenceIsMt19937_64) {
  tubal::Rng rng(5489);
  std::uint64_t last = 0;
  for (int n = 0; n < 10000; ++n) last = rng.bits();
  EXPECT_EQ(last, 9981545732273789042ULL);
}

TEST(Rng, ConversionsArePinned) {
  tubal::Rng a(7);
  std::mt19937_64 raw(7);
  const std::uint64_t first = raw();
  EXPECT_EQ(a.uniform(), static_cast<double>(first >> 11) * 0x1.0p-53);
  tubal::Rng b(11);
  tubal::Rng c(11);
  const double u1 = 1.0 - c.uniform();
  const double u2 = c.uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  EXPECT_EQ(b.normal(), r * std::cos(2.0 * std::numbers::pi * u2));
  EXPECT_EQ(b.normal(), r * std::sin(2.0 * std::numbers::pi * u2));
}

TEST(Rng, NormalMoments) {
  tubal::Rng rng(3);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal();
    sum += v;
    sq += v * v;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(Synth, LowTubalRank) {
  EXPECT_EQ(tubal::synth_low_tubal_rank({5, 4, 3}, 0, 1), Tensor3(5, 4, 3));
  EXPECT_EQ(tubal::tubal_rank(tubal::synth_low_tubal_rank({20, 20, 5}, 3, 2)), 3u);
  EXPECT_EQ(tubal::tubal_rank(tubal::synth_low_tubal_rank({8, 6, 4}, 6, 3)), 6u);
  EXPECT_EQ(tubal::synth_low_tubal_rank({7, 7, 3}, 2, 4), tubal::synth_low_tubal_rank({7, 7, 3}, 2, 4));
  EXPECT_NE(tubal::synth_low_tubal_rank({7, 7, 3}, 2, 4), tubal::synth_low_tubal_rank({7, 7, 3}, 2, 5));
}

TEST(Mask, RandomRate) {
  EXPECT_TRUE(tubal::random_mask({10, 10, 3}, 1.0, 1).all());
  EXPECT_EQ(tubal::random_mask({10, 10, 3}, 0.0, 1).count(), 0u);
  const auto m = tubal::random_mask({100, 100, 10}, 0.5, 2);
  const double frac = static_cast<double>(m.count()) / static_cast<double>(m.size());
  EXPECT_GE(frac, 0.485);
  EXPECT_LE(frac, 0.515);
  EXPECT_THROW(tubal::random_mask({2, 2, 2}, 1.5, 1), tubal::InvalidArgument);
}

TEST(Degrade, SaltAndPepper) {
  std::mt19937_64 gen(71);
  Tensor3 a = oracle::random_tensor({50, 50, 4}, gen);
  for (double& v : a.values()) v = 0.1 + 0.8 / (1.0 + std::exp(-v));
  EXPECT_EQ(tubal::add_salt_pepper(a, 0.0, 1.0, 3), a);
  const Tensor3 all = tubal::add_salt_pepper(a, 1.0, 1.0, 3);
  for (double v : all.values()) EXPECT_TRUE(v == 0.0 || v == 1.0);
  const Tensor3 some = tubal::add_salt_pepper(a, 0.1, 1.0, 4);
  std::size_t changed = 0;
  for (std::size_t n = 0; n < a.size(); ++n) changed += some.values()[n] != a.values()[n] ? 1 : 0;
  const double n = static_cast<double>(a.size());
  EXPECT_NEAR(static_cast<double>(changed), 0.1 * n, 3.0 * std::sqrt(n * 0.1 * 0.9));
}

TEST(Degrade, UniformNoise) {
  std::mt19937_64 gen(72);
  const Tensor3 a = oracle::random_tensor({50, 50, 4}, gen);
  const double m = a.max_abs();
  EXPECT_EQ(tubal::add_uniform_noise(a, 0.0, 1), a);
  const Tensor3 noisy = tubal::add_uniform_noise(a, 0.3, 2);
  double mass = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    const double added = noisy.values()[n] - a.values()[n];
    EXPECT_GE(added, 0.0);
    EXPECT_LT(added, 0.1 * m);
    mass += added;
  }
  const double count = static_cast<double>(a.size());
  const double mean = mass / count;
  // per-entry added value: Bernoulli(0.3) x U[0, 0.1 m)
  const double var = 0.3 * (0.1 * m) * (0.1 * m) / 3.0 - std::pow(0.3 * 0.05 * m, 2);
  EXPECT_NEAR(mean, 0.3 * 0.05 * m, 3.0 * std::sqrt(var / count));
}

TEST(Degrade, SparseSpikesAndRescale) {
  const Tensor3 a = Tensor3::constant({10, 10, 2}, 1.0);
  const auto c = tubal::add_sparse_spikes(a, 0.2, 5.0, 9);
  EXPECT_EQ(c.corrupted, a + c.spikes);
  for (double v : c.spikes.values()) EXPECT_TRUE(v == 0.0 || std::abs(v) == 5.0);
  const Tensor3 r = tubal::rescale_unit_interval(c.corrupted);
  double lo = 1.0;
  double hi = 0.0;
  for (double v : r.values()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_EQ(lo, 0.0);
  EXPECT_EQ(hi, 1.0);
}

TEST(TensorFile, RoundTripIsBitExact) {
  std::mt19937_64 gen(73);
  const Tensor3 a = oracle::random_tensor({4, 3, 5}, gen);
  const auto path = temp_path("roundtrip.tns");
  tubal::write_tensor(path, a);
  EXPECT_EQ(std::filesystem::file_size(path), 17u + 8u * 60u);
  const Tensor3 b = tubal::read_tensor(path);
  ASSERT_EQ(b.dims(), a.dims());
  for (std::size_t n = 0; n < a.size(); ++n) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(a.values()[n]), std::bit_cast<std::uint64_t>(b.values()[n]));
  }
  std::filesystem::remove(path);
}

TEST(TensorFile, HeaderLayout) {
  const Bytes bytes = tubal::encode_tensor(Tensor3(Dims{1, 1, 1}, {1.0}));
  ASSERT_EQ(bytes.size(), 25u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "TNS1");
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[16], 0);
  EXPECT_EQ(bytes[23], 0xf0);
  EXPECT_EQ(bytes[24], 0x3f);
  const Bytes mask = tubal::encode_mask(tubal::ObservationMask::ones({2, 1, 1}));
  ASSERT_EQ(mask.size(), 19u);
  EXPECT_EQ(mask[16], 1);
  EXPECT_EQ(mask[17], 1);
}

TEST(TensorFile, MaskRoundTrip) {
  const auto m = tubal::random_mask({5, 4, 3}, 0.5, 8);
  const auto content = tubal::decode_tensor_file(tubal::encode_mask(m));
  ASSERT_TRUE(std::holds_alternative<tubal::ObservationMask>(content));
  EXPECT_EQ(std::get<tubal::ObservationMask>(content), m);
}

TEST(TensorFile, RejectsCorruptInput) {
  Bytes good = tubal::encode_tensor(Tensor3::constant({2, 2, 2}, 0.5));
  Bytes bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_THROW(tubal::decode_tensor_file(bad_magic), tubal::FormatError);
  Bytes truncated(good.begin(), good.end() - 1);
  EXPECT_THROW(tubal::decode_tensor_file(truncated), tubal::FormatError);
  Bytes trailing = good;
  trailing.push_back(0);
  EXPECT_THROW(tubal::decode_tensor_file(trailing), tubal::FormatError);
  Bytes bad_tag = good;
  bad_tag[16] = 7;
  EXPECT_THROW(tubal::decode_tensor_file(bad_tag), tubal::FormatError);
  Bytes zero_dim = good;
  zero_dim[4] = 0;
  EXPECT_THROW(tubal::decode_tensor_file(zero_dim), tubal::FormatError);
  Bytes huge(good.begin(), good.begin() + 17);
  for (int b = 4; b < 16; ++b) huge[static_cast<std::size_t>(b)] = 0xff;
  EXPECT_THROW(tubal::decode_tensor_file(huge), tubal::FormatError);
  Bytes nan = tubal::encode_tensor(Tensor3(Dims{1, 1, 1}, {0.0}));
  nan[23] = 0xf8;
  nan[24] = 0x7f;
  EXPECT_THROW(tubal::decode_tensor_file(nan), tubal::FormatError);
  EXPECT_THROW(tubal::decode_tensor_file(Bytes{'T', 'N'}), tubal::FormatError);
}

TEST(Pnm, GreyScaling) {
  const Tensor3 t = tubal::decode_pnm(pnm("P5\n2 2\n255\n", {0, 255, 128, 64}));
  ASSERT_EQ(t.dims(), (Dims{2, 2, 1}));
  EXPECT_EQ(t(0, 0, 0), 0.0);
  EXPECT_EQ(t(0, 1, 0), 1.0);
  EXPECT_EQ(t(1, 0, 0), 128.0 / 255.0);
  EXPECT_EQ(t(1, 1, 0), 64.0 / 255.0);
}

TEST(Pnm, ColourChannelsBecomeSlices) {
  const Tensor3 t = tubal::decode_pnm(pnm("P6\n# comment\n2 1\n255\n", {10, 20, 30, 40, 50, 60}));
  ASSERT_EQ(t.dims(), (Dims{1, 2, 3}));
  EXPECT_EQ(t(0, 0, 0), 10.0 / 255.0);
  EXPECT_EQ(t(0, 0, 2), 30.0 / 255.0);
  EXPECT_EQ(t(0, 1, 1), 50.0 / 255.0);
}

TEST(Pnm, SixteenBitAndErrors) {
  const Tensor3 t = tubal::decode_pnm(pnm("P5 1 1 65535\n", {0x80, 0x00}));
  EXPECT_EQ(t(0, 0, 0), 32768.0 / 65535.0);
  EXPECT_THROW(tubal::decode_pnm(pnm("P5 1 1 70000\n", {0, 0})), tubal::FormatError);
  EXPECT_THROW(tubal::decode_pnm(pnm("P2 1 1 255\n", {0})), tubal::FormatError);
  EXPECT_THROW(tubal::decode_pnm(pnm("P5 2 2 255\n", {0, 0, 0})), tubal::FormatError);
  EXPECT_THROW(tubal::decode_pnm(pnm("P5 1 1 100\n", {200})), tubal::FormatError);
}

TEST(Pnm, RoundTripWithinQuantization) {
  std::mt19937_64 gen(74);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tensor3 a(6, 5, 3);
  for (double& v : a.values()) v = u(gen);
  const auto path = temp_path("roundtrip.ppm");
  tubal::tensor_to_image(path, a);
  const Tensor3 b = tubal::load_tensor_any(path);
  ASSERT_EQ(b.dims(), a.dims());
  EXPECT_LE(tubal::max_abs_diff(a, b), 1.0 / 255.0);
  std::filesystem::remove(path);
}
