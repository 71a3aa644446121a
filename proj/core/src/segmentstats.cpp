#include "confocal/segmentstats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "confocal/error.hpp"
#include "confocal/psfconv.hpp"

namespace confocal {

std::size_t SegMask::count_signal() const noexcept {
  return static_cast<std::size_t>(std::count(signal.begin(), signal.end(), std::uint8_t{1}));
}

OtsuHistogram::OtsuHistogram(std::span<const double> values, std::size_t n_bins) {
  if (n_bins < 2) {
    throw Error(ErrorCode::InvalidArgument, "Otsu needs at least 2 histogram bins");
  }
  if (values.empty()) {
    throw Error(ErrorCode::DegenerateHistogram, "no values to threshold");
  }
  if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(ErrorCode::InvalidArgument, "Otsu input contains non-finite values");
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  min_ = *lo;
  max_ = *hi;
  if (!(max_ > min_)) {
    throw Error(ErrorCode::DegenerateHistogram,
                "all values are identical; a constant image cannot be segmented");
  }
  width_ = (max_ - min_) / static_cast<double>(n_bins);
  counts_.assign(n_bins, 0);
  sums_.assign(n_bins, 0.0);

  const std::size_t last = n_bins - 1;
  for (double v : values) {
    // Estimate, then snap against the exact edges so that bin membership
    // agrees with the comparison v <= edge(j) used for the mask.
    const double pos = std::ceil((v - min_) / width_);
    auto j = pos <= 1.0 ? std::size_t{0} : static_cast<std::size_t>(pos) - 1;
    j = std::min(j, last);
    while (j > 0 && v <= edge(j)) --j;
    while (j < last && v > edge(j + 1)) ++j;
    counts_[j] += 1;
    sums_[j] += v;
  }
}

double OtsuHistogram::edge(std::size_t j) const noexcept {
  return min_ + static_cast<double>(j) * width_;
}

double between_class_variance(std::size_t n0, double sum0, std::size_t n1, double sum1) {
  if (n0 == 0 || n1 == 0) return 0.0;
  const auto c0 = static_cast<double>(n0);
  const auto c1 = static_cast<double>(n1);
  const double total = c0 + c1;
  const double w0 = c0 / total;
  const double w1 = c1 / total;
  const double diff = sum0 / c0 - sum1 / c1;
  return w0 * w1 * diff * diff;
}

double otsu_threshold(std::span<const double> values, std::size_t n_bins) {
  const OtsuHistogram hist(values, n_bins);
  const auto counts = hist.counts();
  const auto sums = hist.sums();

  std::size_t total_n = 0;
  double total_sum = 0.0;
  for (std::size_t j = 0; j < hist.bins(); ++j) {
    total_n += counts[j];
    total_sum += sums[j];
  }

  std::size_t best = 1;
  double best_var = -1.0;
  std::size_t n0 = 0;
  double s0 = 0.0;
  for (std::size_t j = 1; j < hist.bins(); ++j) {
    n0 += counts[j - 1];
    s0 += sums[j - 1];
    const double var = between_class_variance(n0, s0, total_n - n0, total_sum - s0);
    if (var > best_var) {
      best_var = var;
      best = j;
    }
  }
  return hist.edge(best);
}

SegMask threshold_mask(const VoxelStack& stack, double threshold) {
  SegMask mask{stack.dims(), std::vector<std::uint8_t>(stack.size(), 0)};
  const auto data = stack.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    mask.signal[i] = data[i] > threshold ? 1 : 0;
  }
  return mask;
}

Segmentation segment(const VoxelStack& stack, const Vec3& blur_sigma_voxels, std::size_t n_bins) {
  // A blurred constant is constant only up to rounding, so decide on the raw
  // values rather than let Otsu split ulp-level ripples.
  const auto [lo, hi] = min_max(stack);
  if (lo == hi) {
    throw Error(ErrorCode::DegenerateHistogram, "all voxels equal " + std::to_string(lo));
  }
  const VoxelStack blurred =
      convolve_separable_voxels(stack, blur_sigma_voxels, kDefaultTruncation, Boundary::Renormalize);
  const double t = otsu_threshold(blurred.data(), n_bins);
  Segmentation seg{threshold_mask(blurred, t), t};
  const std::size_t n_signal = seg.mask.count_signal();
  if (n_signal == 0 || n_signal == seg.mask.signal.size()) {
    throw Error(ErrorCode::SegmentationFailed,
                "threshold " + std::to_string(t) + " leaves only one population");
  }
  return seg;
}

SampleStats extract_stats(const VoxelStack& stack, const SegMask& mask) {
  if (!(mask.dims == stack.dims()) || mask.signal.size() != stack.size()) {
    throw Error(ErrorCode::InvalidArgument, "mask dimensions do not match the stack");
  }
  std::vector<double> noise;
  std::vector<double> signal;
  const auto data = stack.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    (mask.signal[i] != 0 ? signal : noise).push_back(data[i]);
  }
  if (noise.empty()) throw Error(ErrorCode::EmptyPopulation, "mask has no noise voxels");
  if (signal.empty()) throw Error(ErrorCode::EmptyPopulation, "mask has no signal voxels");

  SampleStats stats;
  stats.noise = central_moments(noise);
  stats.signal_mean = central_moments(signal).mean;
  stats.n_noise = noise.size();
  stats.n_signal = signal.size();
  if (!(stats.signal_mean > stats.noise.mean)) {
    throw Error(ErrorCode::SegmentationFailed,
                "signal mean " + std::to_string(stats.signal_mean) +
                    " does not exceed noise mean " + std::to_string(stats.noise.mean));
  }
  return stats;
}

SampleStats analyze(const VoxelStack& stack, const Vec3& blur_sigma_voxels, std::size_t n_bins) {
  const Segmentation seg = segment(stack, blur_sigma_voxels, n_bins);
  SampleStats stats = extract_stats(stack, seg.mask);
  stats.threshold = seg.threshold;
  stats.blur_sigma = blur_sigma_voxels;
  return stats;
}

}  // namespace confocal
