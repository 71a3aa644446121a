#include "confocal/stack.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "confocal/error.hpp"

namespace confocal {

VoxelStack::VoxelStack(Extent3 dims, Vec3 voxel_size, std::vector<double> data)
    : dims_(dims), voxel_size_(voxel_size), data_(std::move(data)) {
  if (dims_.x == 0 || dims_.y == 0 || dims_.z == 0) {
    throw Error(ErrorCode::InvalidStack, "stack dimensions must be positive");
  }
  if (data_.size() != dims_.volume()) {
    throw Error(ErrorCode::InvalidStack,
                "data length " + std::to_string(data_.size()) + " does not match " +
                    std::to_string(dims_.x) + "x" + std::to_string(dims_.y) + "x" +
                    std::to_string(dims_.z));
  }
  for (double v : {voxel_size_.x, voxel_size_.y, voxel_size_.z}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidStack, "voxel size must be finite and positive");
    }
  }
  if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(ErrorCode::InvalidStack, "stack contains non-finite intensities");
  }
}

VoxelStack VoxelStack::filled(Extent3 dims, Vec3 voxel_size, double value) {
  return VoxelStack(dims, voxel_size, std::vector<double>(dims.volume(), value));
}

Moments3 central_moments(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::EmptyPopulation, "cannot compute moments of an empty population");
  }
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double m1 = sum / n;

  // Two-pass form keeps the variance non-negative and accurate for large offsets.
  double s2 = 0.0;
  double s3 = 0.0;
  for (double v : values) {
    const double d = v - m1;
    const double d2 = d * d;
    s2 += d2;
    s3 += d2 * d;
  }
  return {m1, s2 / n, s3 / n};
}

std::pair<double, double> min_max(const VoxelStack& stack) {
  const auto [lo, hi] = std::minmax_element(stack.data().begin(), stack.data().end());
  return {*lo, *hi};
}

double mean(const VoxelStack& stack) {
  double sum = 0.0;
  for (double v : stack.data()) sum += v;
  return sum / static_cast<double>(stack.size());
}

void require_non_negative(const VoxelStack& stack) {
  if (std::any_of(stack.data().begin(), stack.data().end(), [](double v) { return v < 0.0; })) {
    throw Error(ErrorCode::InvalidStack, "ground truth must be non-negative");
  }
}

}  // namespace confocal
