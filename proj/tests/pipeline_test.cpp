#include "confocal/pipeline.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "confocal/error.hpp"
#include "confocal/synth.hpp"
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

VoxelStack small_ring() {
  RingSpec spec;
  spec.dims = {64, 64, 24};
  spec.major_radius = 20;
  spec.tube_radius = 4;
  return make_ring(spec);
}

SimConfig deterministic_config() {
  SimConfig c;
  c.psf = {0, 0, 0};
  c.bin = {1, 1, 1};
  c.noise = {10.0, 0.0, 0.0};
  c.signal_mean = 110.0;
  return c;
}

TEST(ComputeScale, Examples) {
  const VoxelStack s({4, 1, 1}, {1, 1, 1}, {0, 1, 3, 0});
  const SegMask mask{{4, 1, 1}, {0, 1, 1, 0}};
  EXPECT_DOUBLE_EQ(compute_scale(s, mask, 110.0, 10.0), 50.0);
  const double alpha = compute_scale(s, mask, 37.0, 0.0);
  EXPECT_DOUBLE_EQ(alpha, 37.0 / 2.0);
  EXPECT_DOUBLE_EQ(alpha * 2.0, 37.0);
}

TEST(ComputeScale, Errors) {
  const VoxelStack s({4, 1, 1}, {1, 1, 1}, {0, 1, 3, 0});
  EXPECT_EQ(code_of([&] { compute_scale(s, SegMask{{4, 1, 1}, {0, 1, 1, 0}}, 10.0, 10.0); }),
            ErrorCode::InvalidTarget);
  EXPECT_EQ(code_of([&] { compute_scale(s, SegMask{{4, 1, 1}, {1, 0, 0, 1}}, 10.0, 0.0); }),
            ErrorCode::ScaleUndefined);
  EXPECT_EQ(code_of([&] { compute_scale(s, SegMask{{4, 1, 1}, {0, 0, 0, 0}}, 10.0, 0.0); }),
            ErrorCode::EmptyPopulation);
}

TEST(Quantize, RoundingAndClamping) {
  EXPECT_EQ(quantize_value(-3.2, 8), 0.0);
  EXPECT_EQ(quantize_value(65536.7, 16), 65535.0);
  EXPECT_EQ(quantize_value(2.5, 8), 3.0);
  EXPECT_EQ(quantize_value(2.4999, 8), 2.0);
  EXPECT_EQ(quantize_value(300.0, 8), 255.0);
  EXPECT_EQ(quantize_value(-0.5, 16), 0.0);
  EXPECT_EQ(code_of([] { quantize_value(1.0, 12); }), ErrorCode::InvalidArgument);

  const VoxelStack s({3, 1, 1}, {1, 1, 1}, {-1.0, 127.5, 1e9});
  const VoxelStack q = quantize(s, 8);
  EXPECT_EQ(std::vector<double>(q.data().begin(), q.data().end()), (std::vector<double>{0, 128, 255}));
}

TEST(Simulate, ZeroVarianceRingIsExact) {
  const VoxelStack truth = small_ring();
  const SimOutput out = simulate(truth, deterministic_config());
  EXPECT_DOUBLE_EQ(out.scale, 100.0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ASSERT_EQ(out.image.data()[i], truth.data()[i] > 0 ? 110.0 : 10.0) << i;
  }
  EXPECT_EQ(out.mask.count_signal(),
            static_cast<std::size_t>(std::count(truth.data().begin(), truth.data().end(), 1.0)));
}

TEST(Simulate, Deterministic) {
  const VoxelStack truth = small_ring();
  SimConfig c;
  c.psf = {1.5, 1.5, 3.0};
  c.bin = {2, 2, 2};
  c.noise = {4, 4, 8};
  c.signal_mean = 40;
  c.seed = RngSeed{99};
  const SimOutput a = simulate(truth, c);
  const SimOutput b = simulate(truth, c);
  EXPECT_EQ(a.image, b.image);
  EXPECT_EQ(a.noiseless, b.noiseless);
  EXPECT_EQ(a.scale, b.scale);
  EXPECT_EQ(a.mask, b.mask);
  c.seed = RngSeed{100};
  EXPECT_NE(simulate(truth, c).image, a.image);
}

TEST(Simulate, OutputShapeAndRange) {
  const VoxelStack truth = small_ring();
  SimConfig c;
  c.psf = {1.0, 1.0, 2.0};
  c.bin = {4, 2, 3};
  c.noise = {30, 400, 9000};
  c.signal_mean = 240;
  c.bit_depth = 8;
  const SimOutput out = simulate(truth, c);
  EXPECT_EQ(out.image.dims(), (Extent3{16, 32, 8}));
  EXPECT_EQ(out.image.voxel_size(), (Vec3{4, 2, 3}));
  for (double v : out.image.data()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 255.0);
    EXPECT_EQ(v, std::round(v));
  }
}

TEST(Simulate, ExpectedValueAndBackgroundContracts) {
  const VoxelStack truth = small_ring();
  SimConfig c;
  c.psf = {1.0, 1.0, 1.5};
  c.bin = {2, 2, 2};
  c.noise = {12.0, 0.0, 0.0};
  c.signal_mean = 500.0;
  const SimOutput out = simulate(truth, c);

  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < out.image.size(); ++i) {
    if (out.mask.signal[i]) {
      sum += out.image.data()[i];
      ++n;
    }
  }
  EXPECT_NEAR(sum / static_cast<double>(n), 500.0, 0.5);

  // Corners are farther than kernel radius * bin from the ring.
  const auto& d = out.image.dims();
  for (std::size_t z : {std::size_t{0}, d.z - 1})
    for (std::size_t y : {std::size_t{0}, d.y - 1})
      for (std::size_t x : {std::size_t{0}, d.x - 1}) EXPECT_EQ(out.image(x, y, z), 12.0);
}

TEST(Simulate, InvariantToTruthScaling) {
  const VoxelStack truth = small_ring();
  auto scaled = [&](double f) {
    std::vector<double> d(truth.data().begin(), truth.data().end());
    for (double& v : d) v *= f;
    return VoxelStack(truth.dims(), truth.voxel_size(), d);
  };
  SimConfig blurred;
  blurred.psf = {1.0, 1.0, 2.0};
  blurred.bin = {2, 2, 1};
  blurred.noise = {20, 9, 6};
  blurred.signal_mean = 300;
  EXPECT_EQ(simulate(scaled(4.0), blurred).image, simulate(truth, blurred).image);

  const SimConfig exact = deterministic_config();
  EXPECT_EQ(simulate(scaled(3.0), exact).image, simulate(truth, exact).image);
}

TEST(Simulate, UsesCustomSegmenter) {
  const VoxelStack truth = small_ring();
  SimConfig c = deterministic_config();
  bool called = false;
  const SimOutput out = simulate(truth, c, [&](const VoxelStack& noiseless) {
    called = true;
    SegMask mask{noiseless.dims(), std::vector<std::uint8_t>(noiseless.size(), 0)};
    mask.signal[noiseless.index(32 + 20, 32, 12)] = 1;
    return Segmentation{mask, 0.5};
  });
  EXPECT_TRUE(called);
  EXPECT_EQ(out.threshold, 0.5);
  EXPECT_EQ(out.mask.count_signal(), 1u);
}

TEST(Simulate, Errors) {
  const VoxelStack truth = small_ring();
  const SimConfig good = deterministic_config();

  const auto zeros = VoxelStack::filled({16, 16, 16}, {1, 1, 1}, 0.0);
  EXPECT_EQ(code_of([&] { simulate(zeros, good); }), ErrorCode::NoSignal);

  std::vector<double> neg(truth.data().begin(), truth.data().end());
  neg[0] = -1.0;
  EXPECT_EQ(code_of([&] { simulate(VoxelStack(truth.dims(), truth.voxel_size(), neg), good); }),
            ErrorCode::InvalidStack);

  SimConfig c = good;
  c.bin = {3, 1, 1};
  EXPECT_EQ(code_of([&] { simulate(truth, c); }), ErrorCode::BinMismatch);
  c = good;
  c.psf = {0, 0, 10};
  EXPECT_EQ(code_of([&] { simulate(truth, c); }), ErrorCode::KernelTooLarge);
  c = good;
  c.noise = {10, 1, -1};
  EXPECT_EQ(code_of([&] { simulate(truth, c); }), ErrorCode::NegativeSkewUnsupported);
  c = good;
  c.noise = {10, 0, 1};
  EXPECT_EQ(code_of([&] { simulate(truth, c); }), ErrorCode::DegenerateNoise);
  c = good;
  c.signal_mean = 10;
  EXPECT_EQ(code_of([&] { simulate(truth, c); }), ErrorCode::InvalidTarget);
  c = good;
  c.bit_depth = 12;
  EXPECT_EQ(code_of([&] { simulate(truth, c); }), ErrorCode::InvalidArgument);
}

TEST(Simulate, SegmentNoiselessIgnoresZeroVoxels) {
  const VoxelStack truth = small_ring();
  const Segmentation raw = segment(truth, kDefaultBlurSigma);
  const Segmentation seg = segment_noiseless(truth, kDefaultBlurSigma);
  EXPECT_EQ(seg.threshold, raw.threshold);
  EXPECT_GT(raw.mask.count_signal(), seg.mask.count_signal());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (seg.mask.signal[i]) EXPECT_GT(truth.data()[i], 0.0);
  }
}

}  // namespace
}  // namespace confocal
