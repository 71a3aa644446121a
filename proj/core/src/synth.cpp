#include "confocal/synth.hpp"

#include <cmath>
#include <string>

#include "confocal/error.hpp"

namespace confocal {

namespace {

// In-plane axes (a, b) and the normal axis n for each plane, as indices.
struct PlaneAxes {
  int a;
  int b;
  int n;
};

PlaneAxes axes_of(RingPlane plane) {
  switch (plane) {
    case RingPlane::XY: return {0, 1, 2};
    case RingPlane::XZ: return {0, 2, 1};
    case RingPlane::YZ: return {1, 2, 0};
  }
  return {0, 1, 2};
}

double component(const Vec3& v, int axis) { return axis == 0 ? v.x : axis == 1 ? v.y : v.z; }

std::size_t extent(const Extent3& e, int axis) { return axis == 0 ? e.x : axis == 1 ? e.y : e.z; }

}  // namespace

VoxelStack make_ring(const RingSpec& spec) {
  const double big = spec.major_radius;
  const double tube = spec.tube_radius;
  if (!(tube > 0.0) || !(big > tube) || !std::isfinite(big)) {
    throw Error(ErrorCode::InvalidArgument, "ring needs major radius > tube radius > 0");
  }
  if (!(spec.intensity > 0.0) || !std::isfinite(spec.intensity)) {
    throw Error(ErrorCode::InvalidArgument, "ring intensity must be positive");
  }
  const Extent3& d = spec.dims;
  if (d.volume() == 0) throw Error(ErrorCode::InvalidStack, "stack dimensions must be positive");

  const Vec3 center = spec.center.value_or(Vec3{(static_cast<double>(d.x) - 1.0) / 2.0,
                                                (static_cast<double>(d.y) - 1.0) / 2.0,
                                                (static_cast<double>(d.z) - 1.0) / 2.0});
  const PlaneAxes ax = axes_of(spec.plane);
  const double reach[3] = {ax.n == 0 ? tube : big + tube, ax.n == 1 ? tube : big + tube,
                           ax.n == 2 ? tube : big + tube};
  for (int axis = 0; axis < 3; ++axis) {
    const double c = component(center, axis);
    const double top = static_cast<double>(extent(d, axis)) - 2.0;
    if (c - reach[axis] < 1.0 || c + reach[axis] > top) {
      throw Error(ErrorCode::OutOfBounds,
                  "ring does not fit inside the stack with a one-voxel margin along axis " +
                      std::to_string(axis));
    }
  }

  std::vector<double> data(d.volume(), 0.0);
  const double tube2 = tube * tube;
  std::size_t i = 0;
  for (std::size_t z = 0; z < d.z; ++z) {
    for (std::size_t y = 0; y < d.y; ++y) {
      for (std::size_t x = 0; x < d.x; ++x, ++i) {
        const Vec3 p{static_cast<double>(x) - center.x, static_cast<double>(y) - center.y,
                     static_cast<double>(z) - center.z};
        const double pa = component(p, ax.a);
        const double pb = component(p, ax.b);
        const double pn = component(p, ax.n);
        const double rho = std::sqrt(pa * pa + pb * pb) - big;
        if (rho * rho + pn * pn <= tube2) data[i] = spec.intensity;
      }
    }
  }
  return VoxelStack(d, spec.voxel_size, std::move(data));
}

VoxelStack make_points(Extent3 dims, Vec3 voxel_size, const std::vector<VoxelIndex>& positions,
                       double intensity) {
  std::vector<double> data(dims.volume(), 0.0);
  for (const auto& [x, y, z] : positions) {
    if (x >= dims.x || y >= dims.y || z >= dims.z) {
      throw Error(ErrorCode::OutOfBounds, "point (" + std::to_string(x) + "," + std::to_string(y) +
                                              "," + std::to_string(z) + ") lies outside the stack");
    }
    data[x + dims.x * (y + dims.y * z)] = intensity;
  }
  return VoxelStack(dims, voxel_size, std::move(data));
}

}  // namespace confocal
