#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace confocal {

/// Voxel counts along x, y, z.
struct Extent3 {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t z = 0;

  std::size_t volume() const noexcept { return x * y * z; }
  friend bool operator==(const Extent3&, const Extent3&) = default;
};

/// Per-axis real-valued triple (physical lengths, sigmas, ...).
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

/// Dense 3D scalar image with per-axis voxel size.
///
/// Data is stored in raster order, x fastest, then y, then z. Instances are
/// immutable once built; operations return new stacks.
class VoxelStack {
 public:
  /// Throws InvalidStack if any dimension is zero, data length does not
  /// match, a voxel size is not strictly positive, or a value is not finite.
  VoxelStack(Extent3 dims, Vec3 voxel_size, std::vector<double> data);

  /// Constant-valued stack.
  static VoxelStack filled(Extent3 dims, Vec3 voxel_size, double value);

  const Extent3& dims() const noexcept { return dims_; }
  const Vec3& voxel_size() const noexcept { return voxel_size_; }
  std::span<const double> data() const noexcept { return data_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::size_t index(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return x + dims_.x * (y + dims_.y * z);
  }
  double operator()(std::size_t x, std::size_t y, std::size_t z) const noexcept {
    return data_[index(x, y, z)];
  }

  /// Releases the buffer, leaving this stack empty. Used by operations that
  /// consume a temporary.
  std::vector<double> take_data() && { return std::move(data_); }

  friend bool operator==(const VoxelStack&, const VoxelStack&) = default;

 private:
  Extent3 dims_;
  Vec3 voxel_size_;
  std::vector<double> data_;
};

/// Population mean, variance and third central moment.
struct Moments3 {
  double mean = 0.0;
  double variance = 0.0;
  double third_central = 0.0;

  friend bool operator==(const Moments3&, const Moments3&) = default;
};

/// Population (divide-by-n) moments. Throws EmptyPopulation on empty input.
Moments3 central_moments(std::span<const double> values);

std::pair<double, double> min_max(const VoxelStack& stack);

double mean(const VoxelStack& stack);

/// Throws InvalidStack if any value is negative.
void require_non_negative(const VoxelStack& stack);

}  // namespace confocal
