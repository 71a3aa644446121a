#pragma once

#include <functional>

#include "confocal/noisemodel.hpp"
#include "confocal/psfconv.hpp"
#include "confocal/segmentstats.hpp"
#include "confocal/stack.hpp"

namespace confocal {

inline constexpr std::uint64_t kDefaultSeed = 20170301;

/// Everything needed to turn a ground truth into a simulated confocal stack.
struct SimConfig {
  PsfSigmas psf;
  BinFactors bin;
  NoiseMoments noise;
  /// Target mean of raw signal voxels, noise included.
  double signal_mean = 0.0;
  RngSeed seed{kDefaultSeed};
  int bit_depth = 16;
  Vec3 blur_sigma_voxels = kDefaultBlurSigma;
  double truncation = kDefaultTruncation;
  std::size_t otsu_bins = kDefaultOtsuBins;
};

struct SimOutput {
  /// Quantized image at confocal resolution.
  VoxelStack image;
  /// Scaled stack before noise and quantization.
  VoxelStack noiseless;
  double scale = 0.0;
  SegMask mask;
  double threshold = 0.0;
};

/// Replaces the built-in blur + Otsu segmentation of the noiseless stack.
using Segmenter = std::function<Segmentation(const VoxelStack& noiseless)>;

/// Scale factor (target - noise_mean) / mean(noiseless over mask).
/// Throws EmptyPopulation for an empty mask, ScaleUndefined when the masked
/// mean is not positive and InvalidTarget when the result is not positive.
double compute_scale(const VoxelStack& noiseless, const SegMask& mask, double target_signal_mean,
                     double noise_mean);

/// Round half away from zero, then clamp to [0, 2^bit_depth - 1].
/// bit_depth must be 8 or 16 (InvalidArgument otherwise).
double quantize_value(double v, int bit_depth);
VoxelStack quantize(const VoxelStack& stack, int bit_depth);

/// Scaling mask for a noise-free stack: segment(), restricted to voxels with
/// positive intensity. Blur can push the threshold contour past the edge of
/// the support; zero voxels carry no fluorescence and never count as signal.
Segmentation segment_noiseless(const VoxelStack& noiseless, const Vec3& blur_sigma_voxels,
                               std::size_t n_bins = kDefaultOtsuBins);

/// fit_noise, except that exactly zero variance and third moment yield a
/// constant offset (Gaussian with zero variance) instead of DegenerateNoise.
NoiseModel simulation_noise(const NoiseMoments& moments);

/// Throws InvalidArgument / InvalidTarget for inconsistent configurations.
void validate(const SimConfig& config);

/// Convolve, bin, segment the noiseless stack, rescale to the target signal
/// mean, add one noise draw per voxel in raster order from a single stream
/// seeded by config.seed, then quantize.
SimOutput simulate(const VoxelStack& truth, const SimConfig& config);
SimOutput simulate(const VoxelStack& truth, const SimConfig& config, const Segmenter& segmenter);

}  // namespace confocal
