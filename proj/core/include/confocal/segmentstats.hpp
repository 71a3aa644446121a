#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "confocal/noisemodel.hpp"
#include "confocal/stack.hpp"

namespace confocal {

inline constexpr std::size_t kDefaultOtsuBins = 256;
inline constexpr Vec3 kDefaultBlurSigma{2.0, 2.0, 2.0};

/// Per-voxel signal/noise labels, raster order, 1 = signal.
struct SegMask {
  Extent3 dims;
  std::vector<std::uint8_t> signal;

  std::size_t count_signal() const noexcept;
  std::size_t count_noise() const noexcept { return signal.size() - count_signal(); }

  friend bool operator==(const SegMask&, const SegMask&) = default;
};

/// A mask plus the threshold that produced it. Callers with their own
/// segmentation method construct this directly.
struct Segmentation {
  SegMask mask;
  double threshold = 0.0;
};

struct SampleStats {
  NoiseMoments noise;
  double signal_mean = 0.0;
  double threshold = 0.0;
  std::size_t n_noise = 0;
  std::size_t n_signal = 0;
  Vec3 blur_sigma = kDefaultBlurSigma;

  friend bool operator==(const SampleStats&, const SampleStats&) = default;
};

/// Equal-width histogram over [min, max] as used by otsu_threshold. Bin j
/// holds the values in (edge(j), edge(j+1)], bin 0 also holds min, where
/// edge(j) = min + j * (max - min) / n_bins.
class OtsuHistogram {
 public:
  OtsuHistogram(std::span<const double> values, std::size_t n_bins);

  std::size_t bins() const noexcept { return counts_.size(); }
  double edge(std::size_t j) const noexcept;
  std::span<const std::size_t> counts() const noexcept { return counts_; }
  std::span<const double> sums() const noexcept { return sums_; }
  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }

 private:
  double min_ = 0.0;
  double max_ = 0.0;
  double width_ = 0.0;
  std::vector<std::size_t> counts_;
  std::vector<double> sums_;
};

/// Between-class variance w0 * w1 * (mu0 - mu1)^2 of a two-way split, from
/// class counts and value sums. Returns 0 if either class is empty.
double between_class_variance(std::size_t n0, double sum0, std::size_t n1, double sum1);

/// Otsu threshold over the bin edges edge(1)..edge(n_bins-1); the split is
/// {v <= t} / {v > t} and ties go to the smallest edge. Throws
/// DegenerateHistogram if the values are all identical, and InvalidArgument
/// for n_bins < 2 or non-finite values.
double otsu_threshold(std::span<const double> values, std::size_t n_bins = kDefaultOtsuBins);

/// Labels voxels above `threshold` as signal.
SegMask threshold_mask(const VoxelStack& stack, double threshold);

/// Gaussian blur (sigmas in voxels, renormalized at the faces) followed by
/// Otsu on the blurred values; the mask is blurred > threshold.
/// Throws SegmentationFailed if the mask ends up all signal or all noise.
Segmentation segment(const VoxelStack& stack, const Vec3& blur_sigma_voxels = kDefaultBlurSigma,
                     std::size_t n_bins = kDefaultOtsuBins);

/// Noise moments and signal mean of the raw stack values under `mask`.
/// Throws EmptyPopulation if either population is empty and
/// SegmentationFailed if the signal is not brighter than the noise.
SampleStats extract_stats(const VoxelStack& stack, const SegMask& mask);

/// segment + extract_stats, with threshold and blur recorded in the result.
SampleStats analyze(const VoxelStack& stack, const Vec3& blur_sigma_voxels = kDefaultBlurSigma,
                    std::size_t n_bins = kDefaultOtsuBins);

}  // namespace confocal
