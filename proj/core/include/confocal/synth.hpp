#pragma once

#include <array>
#include <optional>
#include <vector>

#include "confocal/stack.hpp"

namespace confocal {

/// Plane containing a ring; the ring axis is normal to it.
enum class RingPlane { XY, XZ, YZ };

struct RingSpec {
  Extent3 dims{128, 128, 128};
  Vec3 voxel_size{1.0, 1.0, 1.0};
  /// Ring center in voxel coordinates; the grid center ((n-1)/2 per axis)
  /// when unset.
  std::optional<Vec3> center;
  double major_radius = 40.0;
  double tube_radius = 4.0;
  RingPlane plane = RingPlane::XY;
  double intensity = 1.0;
};

/// Binary torus: `intensity` where the voxel center lies within tube_radius
/// of the ring circle, 0 elsewhere. Throws InvalidArgument unless
/// major_radius > tube_radius > 0 and intensity > 0, and OutOfBounds unless
/// the torus stays at least one voxel away from every face.
VoxelStack make_ring(const RingSpec& spec);

using VoxelIndex = std::array<std::size_t, 3>;

/// `intensity` at each listed voxel, 0 elsewhere. Throws OutOfBounds for
/// positions outside dims.
VoxelStack make_points(Extent3 dims, Vec3 voxel_size, const std::vector<VoxelIndex>& positions,
                       double intensity = 1.0);

}  // namespace confocal
