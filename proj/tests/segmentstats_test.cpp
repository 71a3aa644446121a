#include "confocal/segmentstats.hpp"

#include <gtest/gtest.h>

#include <random>

#include "confocal/error.hpp"
#include "oracles.hpp"

namespace confocal {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::InvalidArgument;
}

TEST(Otsu, TwoLevelInput) {
  const std::vector<double> v{0, 0, 0, 0, 255, 255};
  const double t = otsu_threshold(v, 256);
  EXPECT_GT(t, 0.0);
  EXPECT_LT(t, 255.0);
  EXPECT_EQ(t, oracle::exhaustive_otsu(v, 256).threshold);
  // Every interior edge separates the two levels; the smallest one wins.
  EXPECT_EQ(t, 255.0 / 256.0);
}

TEST(Otsu, ConstantInputIsDegenerate) {
  const std::vector<double> v(10, 3.0);
  EXPECT_EQ(code_of([&] { otsu_threshold(v); }), ErrorCode::DegenerateHistogram);
  EXPECT_EQ(code_of([] { otsu_threshold({}); }), ErrorCode::DegenerateHistogram);
  EXPECT_EQ(code_of([] { otsu_threshold(std::vector<double>{1, 2}, 1); }), ErrorCode::InvalidArgument);
}

TEST(Otsu, SeparatesTwoGaussians) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> lo(10.0, 1.0), hi(100.0, 1.0);
  std::vector<double> v;
  std::vector<bool> label;
  for (int i = 0; i < 1000; ++i) {
    v.push_back(lo(rng));
    label.push_back(false);
  }
  for (int i = 0; i < 1000; ++i) {
    v.push_back(hi(rng));
    label.push_back(true);
  }
  // Every cut inside the gap scores the same; ties resolve to the lowest one,
  // which sits just above the low cluster.
  const double t = otsu_threshold(v);
  EXPECT_GT(t, 10.0);
  EXPECT_LT(t, 90.0);
  int wrong = 0;
  for (std::size_t i = 0; i < v.size(); ++i) wrong += (v[i] > t) != label[i];
  EXPECT_EQ(wrong, 0);
}

TEST(Otsu, OptimalOverAllEdges) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> n_values(2, 60);
  std::uniform_int_distribution<int> level(0, 20);
  std::uniform_int_distribution<std::size_t> bins(2, 40);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v;
    const int n = n_values(rng);
    for (int i = 0; i < n; ++i) v.push_back(level(rng));
    v.push_back(0.0);
    v.push_back(20.0);
    const std::size_t nb = bins(rng);
    const double t = otsu_threshold(v, nb);
    const auto ref = oracle::exhaustive_otsu(v, nb);
    EXPECT_EQ(t, ref.threshold);
    EXPECT_GE(oracle::split_variance(v, t), ref.variance);
  }
}

TEST(Otsu, HistogramMembershipMatchesComparison) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 7.0);
  std::vector<double> v(5000);
  for (double& x : v) x = u(rng);
  const OtsuHistogram h(v, 97);
  for (std::size_t j = 1; j < h.bins(); ++j) {
    std::size_t below = 0;
    for (double x : v) below += x <= h.edge(j);
    std::size_t cum = 0;
    for (std::size_t k = 0; k < j; ++k) cum += h.counts()[k];
    ASSERT_EQ(cum, below) << "edge " << j;
  }
}

VoxelStack cube_in_volume() {
  std::vector<double> data(15 * 15 * 15, 1.0);
  for (std::size_t z = 5; z < 10; ++z)
    for (std::size_t y = 5; y < 10; ++y)
      for (std::size_t x = 5; x < 10; ++x) data[x + 15 * (y + 15 * z)] = 100.0;
  return VoxelStack({15, 15, 15}, {1, 1, 1}, std::move(data));
}

TEST(Segment, BrightCube) {
  const VoxelStack s = cube_in_volume();
  const Segmentation seg = segment(s, {1, 1, 1});
  EXPECT_EQ(seg.mask.dims, s.dims());
  for (std::size_t z = 1; z < 14; ++z)
    for (std::size_t y = 1; y < 14; ++y)
      for (std::size_t x = 1; x < 14; ++x) {
        bool interior = true;
        for (int dz = -1; dz <= 1; ++dz)
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
              interior = interior && s(x + dx, y + dy, z + dz) == 100.0;
        if (interior) EXPECT_TRUE(seg.mask.signal[s.index(x, y, z)]) << x << "," << y << "," << z;
      }
  // Far from the cube everything is background.
  EXPECT_FALSE(seg.mask.signal[s.index(0, 0, 0)]);
  EXPECT_FALSE(seg.mask.signal[s.index(14, 14, 14)]);
}

TEST(Segment, NoBlurThresholdsRawValues) {
  std::mt19937_64 rng(17);
  std::bernoulli_distribution coin(0.3);
  std::vector<double> data(8 * 8 * 8);
  for (double& v : data) v = coin(rng) ? 9.0 : 2.0;
  const VoxelStack s({8, 8, 8}, {1, 1, 1}, data);
  const Segmentation seg = segment(s, {0, 0, 0});
  EXPECT_EQ(seg.threshold, otsu_threshold(data));
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(seg.mask.signal[i] != 0, data[i] > seg.threshold);
  }
}

TEST(Segment, ConstantStackIsDegenerate) {
  const auto s = VoxelStack::filled({10, 10, 10}, {1, 1, 1}, 4.0);
  EXPECT_EQ(code_of([&] { segment(s); }), ErrorCode::DegenerateHistogram);
}

TEST(Segment, ShiftEquivariant) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> level(0, 50);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> data(10 * 9 * 11);
    for (double& v : data) v = level(rng);
    data[0] = 200.0;
    const VoxelStack s({10, 9, 11}, {1, 1, 1}, data);
    std::vector<double> shifted(data);
    for (double& v : shifted) v += 1024.0;
    const VoxelStack s2(s.dims(), s.voxel_size(), shifted);
    for (const Vec3 blur : {Vec3{0, 0, 0}, Vec3{1, 1, 1}}) {
      const Segmentation a = segment(s, blur);
      const Segmentation b = segment(s2, blur);
      EXPECT_NEAR(b.threshold, a.threshold + 1024.0, 1e-9);
      EXPECT_EQ(a.mask, b.mask);
    }
  }
}

TEST(ThresholdMask, AntiMonotoneInThreshold) {
  std::mt19937_64 rng(41);
  const auto s = oracle::random_stack(rng, {7, 6, 5}, 0.0, 10.0);
  std::uniform_real_distribution<double> t(0.0, 10.0), dt(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double t0 = t(rng);
    const SegMask a = threshold_mask(s, t0);
    const SegMask b = threshold_mask(s, t0 + dt(rng));
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_LE(b.signal[i], a.signal[i]);
  }
}

TEST(ExtractStats, HandSeparable) {
  const VoxelStack s({6, 1, 1}, {1, 1, 1}, {0, 0, 0, 0, 10, 10});
  const SegMask mask{{6, 1, 1}, {0, 0, 0, 0, 1, 1}};
  const SampleStats stats = extract_stats(s, mask);
  EXPECT_EQ(stats.noise, (NoiseMoments{0, 0, 0}));
  EXPECT_EQ(stats.signal_mean, 10.0);
  EXPECT_EQ(stats.n_noise, 4u);
  EXPECT_EQ(stats.n_signal, 2u);
  EXPECT_EQ(stats.n_noise + stats.n_signal, s.size());
}

TEST(ExtractStats, Errors) {
  const VoxelStack s({4, 1, 1}, {1, 1, 1}, {0, 1, 5, 6});
  EXPECT_EQ(code_of([&] { extract_stats(s, SegMask{{4, 1, 1}, {0, 0, 0, 0}}); }),
            ErrorCode::EmptyPopulation);
  EXPECT_EQ(code_of([&] { extract_stats(s, SegMask{{4, 1, 1}, {1, 1, 1, 1}}); }),
            ErrorCode::EmptyPopulation);
  // Signal dimmer than noise.
  EXPECT_EQ(code_of([&] { extract_stats(s, SegMask{{4, 1, 1}, {1, 1, 0, 0}}); }),
            ErrorCode::SegmentationFailed);
  EXPECT_EQ(code_of([&] { extract_stats(s, SegMask{{2, 2, 1}, {0, 0, 1, 1}}); }),
            ErrorCode::InvalidArgument);
}

TEST(ExtractStats, RecoversSyntheticPopulations) {
  // Gamma(4, 1) background with a constant 50 block, exact labels.
  const Extent3 dims{100, 100, 100};
  std::mt19937_64 rng(2);
  std::gamma_distribution<double> gamma(4.0, 1.0);
  std::vector<double> data(dims.volume());
  SegMask mask{dims, std::vector<std::uint8_t>(dims.volume(), 0)};
  for (std::size_t z = 0; z < dims.z; ++z)
    for (std::size_t y = 0; y < dims.y; ++y)
      for (std::size_t x = 0; x < dims.x; ++x) {
        const std::size_t i = x + dims.x * (y + dims.y * z);
        const bool blob = x >= 40 && x < 60 && y >= 40 && y < 60 && z >= 40 && z < 60;
        data[i] = blob ? 50.0 : gamma(rng);
        mask.signal[i] = blob;
      }
  const SampleStats stats = extract_stats(VoxelStack(dims, {1, 1, 1}, data), mask);
  EXPECT_EQ(stats.signal_mean, 50.0);
  EXPECT_EQ(stats.n_signal, 8000u);
  EXPECT_LT(oracle::rel_err(stats.noise.mean, 4.0), 0.01);
  EXPECT_LT(oracle::rel_err(stats.noise.variance, 4.0), 0.01);
  EXPECT_LT(oracle::rel_err(stats.noise.third_central, 8.0), 0.05);
}

TEST(Analyze, RecordsThresholdAndBlur) {
  const VoxelStack s = cube_in_volume();
  const SampleStats stats = analyze(s, {1, 1, 1});
  EXPECT_EQ(stats.blur_sigma, (Vec3{1, 1, 1}));
  EXPECT_EQ(stats.threshold, segment(s, {1, 1, 1}).threshold);
  EXPECT_EQ(stats.n_noise + stats.n_signal, s.size());
  EXPECT_GT(stats.signal_mean, stats.noise.mean);
}

}  // namespace
}  // namespace confocal
