#include "confocal/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "confocal/error.hpp"

namespace confocal {

double compute_scale(const VoxelStack& noiseless, const SegMask& mask, double target_signal_mean,
                     double noise_mean) {
  if (!(mask.dims == noiseless.dims()) || mask.signal.size() != noiseless.size()) {
    throw Error(ErrorCode::InvalidArgument, "mask dimensions do not match the stack");
  }
  const auto data = noiseless.data();
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (mask.signal[i] != 0) {
      sum += data[i];
      ++n;
    }
  }
  if (n == 0) throw Error(ErrorCode::EmptyPopulation, "scaling mask has no signal voxels");
  const double signal = sum / static_cast<double>(n);
  if (!(signal > 0.0)) {
    throw Error(ErrorCode::ScaleUndefined, "noiseless signal mean is " + std::to_string(signal));
  }
  const double alpha = (target_signal_mean - noise_mean) / signal;
  if (!(alpha > 0.0)) {
    throw Error(ErrorCode::InvalidTarget, "target signal mean " +
                                              std::to_string(target_signal_mean) +
                                              " is not above the noise mean " +
                                              std::to_string(noise_mean));
  }
  return alpha;
}

namespace {

void require_bit_depth(int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw Error(ErrorCode::InvalidArgument,
                "bit depth must be 8 or 16, got " + std::to_string(bit_depth));
  }
}

}  // namespace

double quantize_value(double v, int bit_depth) {
  require_bit_depth(bit_depth);
  const double top = bit_depth == 8 ? 255.0 : 65535.0;
  return std::clamp(std::round(v), 0.0, top);
}

VoxelStack quantize(const VoxelStack& stack, int bit_depth) {
  require_bit_depth(bit_depth);
  std::vector<double> out(stack.data().begin(), stack.data().end());
  for (double& v : out) v = quantize_value(v, bit_depth);
  return VoxelStack(stack.dims(), stack.voxel_size(), std::move(out));
}

Segmentation segment_noiseless(const VoxelStack& noiseless, const Vec3& blur_sigma_voxels,
                               std::size_t n_bins) {
  Segmentation seg = segment(noiseless, blur_sigma_voxels, n_bins);
  const auto data = noiseless.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!(data[i] > 0.0)) seg.mask.signal[i] = 0;
  }
  if (seg.mask.count_signal() == 0) {
    throw Error(ErrorCode::SegmentationFailed, "no positive voxel above the threshold");
  }
  return seg;
}

NoiseModel simulation_noise(const NoiseMoments& m) {
  if (m.variance == 0.0 && m.third_central == 0.0 && std::isfinite(m.mean)) {
    return GaussianNoise{m.mean, 0.0};
  }
  return fit_noise(m);
}

void validate(const SimConfig& c) {
  require_bit_depth(c.bit_depth);
  for (double s : {c.psf.x, c.psf.y, c.psf.z}) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw Error(ErrorCode::InvalidSigma, "PSF sigmas must be finite and non-negative");
    }
  }
  if (c.bin.x == 0 || c.bin.y == 0 || c.bin.z == 0) {
    throw Error(ErrorCode::BinMismatch, "bin factors must be at least 1");
  }
  if (!std::isfinite(c.signal_mean) || !(c.signal_mean > c.noise.mean)) {
    throw Error(ErrorCode::InvalidTarget, "target signal mean " + std::to_string(c.signal_mean) +
                                              " must exceed the noise mean " +
                                              std::to_string(c.noise.mean));
  }
}

SimOutput simulate(const VoxelStack& truth, const SimConfig& config) {
  return simulate(truth, config, [&config](const VoxelStack& noiseless) {
    return segment_noiseless(noiseless, config.blur_sigma_voxels, config.otsu_bins);
  });
}

SimOutput simulate(const VoxelStack& truth, const SimConfig& config, const Segmenter& segmenter) {
  validate(config);
  require_non_negative(truth);
  if (std::none_of(truth.data().begin(), truth.data().end(), [](double v) { return v > 0.0; })) {
    throw Error(ErrorCode::NoSignal, "ground truth has no positive voxel");
  }
  // Fit before the expensive steps so bad noise specs fail fast.
  const NoiseModel model = simulation_noise(config.noise);

  const VoxelStack binned = bin(convolve_separable(truth, config.psf, config.truncation), config.bin);
  Segmentation seg = segmenter(binned);
  const double alpha = compute_scale(binned, seg.mask, config.signal_mean, config.noise.mean);

  std::vector<double> scaled(binned.data().begin(), binned.data().end());
  for (double& v : scaled) v *= alpha;
  VoxelStack noiseless(binned.dims(), binned.voxel_size(), std::move(scaled));

  NoiseSampler draw(model, config.seed);
  std::vector<double> noisy(noiseless.data().begin(), noiseless.data().end());
  for (double& v : noisy) v = quantize_value(v + draw(), config.bit_depth);
  VoxelStack image(noiseless.dims(), noiseless.voxel_size(), std::move(noisy));

  return SimOutput{std::move(image), std::move(noiseless), alpha, std::move(seg.mask),
                   seg.threshold};
}

}  // namespace confocal
