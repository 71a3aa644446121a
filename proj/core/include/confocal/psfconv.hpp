#pragma once

#include <cstddef>
#include <vector>

#include "confocal/stack.hpp"

namespace confocal {

/// Standard deviations of the Gaussian PSF, in the same physical unit as the
/// stack voxel size.
struct PsfSigmas {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Voxels per bin along each axis.
struct BinFactors {
  std::size_t x = 1;
  std::size_t y = 1;
  std::size_t z = 1;
};

/// Symmetric, normalized, non-negative 1D kernel of length 2*radius+1.
struct Kernel1D {
  std::size_t radius = 0;
  std::vector<double> weights{1.0};
};

enum class Axis { X, Y, Z };

/// How a 1D pass treats samples outside the volume.
enum class Boundary {
  /// Outside counts as zero intensity (PSF convolution).
  Zero,
  /// Weights falling outside are dropped and the rest renormalized, so a
  /// constant stays constant up to the faces (segmentation blur).
  Renormalize,
};

inline constexpr double kDefaultTruncation = 4.0;

/// Sampled Gaussian truncated at ceil(truncation * sigma_px) and renormalized
/// to unit sum. sigma_px == 0 gives the delta kernel. Throws InvalidSigma for
/// negative or non-finite sigma and InvalidArgument for truncation <= 0.
Kernel1D gaussian_kernel_1d(double sigma_px, double truncation = kDefaultTruncation);

/// One 1D convolution pass along `axis`. With zero padding, throws
/// KernelTooLarge when the kernel radius reaches the stack extent along that
/// axis; the renormalized mode accepts any radius.
VoxelStack convolve_axis(const VoxelStack& stack, Axis axis, const Kernel1D& kernel,
                         Boundary boundary = Boundary::Zero);

/// Separable Gaussian blur with sigmas given directly in voxels, applied
/// x, then y, then z.
VoxelStack convolve_separable_voxels(const VoxelStack& stack, const Vec3& sigma_voxels,
                                     double truncation = kDefaultTruncation,
                                     Boundary boundary = Boundary::Zero);

/// Separable Gaussian PSF convolution. Physical sigmas are divided by the
/// stack voxel size to obtain per-axis pixel sigmas. Output keeps the input
/// dims and voxel size; outside the volume counts as zero.
VoxelStack convolve_separable(const VoxelStack& stack, const PsfSigmas& sigmas,
                              double truncation = kDefaultTruncation);

/// Block-mean downsampling. Output voxel size is input voxel size times the
/// factors. Throws BinMismatch if a factor is zero or does not divide the
/// corresponding dimension.
VoxelStack bin(const VoxelStack& stack, const BinFactors& factors);

}  // namespace confocal
