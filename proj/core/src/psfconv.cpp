#include "confocal/psfconv.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "confocal/error.hpp"

namespace confocal {

Kernel1D gaussian_kernel_1d(double sigma_px, double truncation) {
  if (!(sigma_px >= 0.0) || !std::isfinite(sigma_px)) {
    throw Error(ErrorCode::InvalidSigma, "sigma must be finite and non-negative, got " +
                                             std::to_string(sigma_px));
  }
  if (!(truncation > 0.0) || !std::isfinite(truncation)) {
    throw Error(ErrorCode::InvalidArgument, "kernel truncation must be positive");
  }
  if (sigma_px == 0.0) return Kernel1D{};

  Kernel1D kernel;
  kernel.radius = static_cast<std::size_t>(std::ceil(truncation * sigma_px));
  kernel.weights.assign(2 * kernel.radius + 1, 0.0);
  const double denom = 2.0 * sigma_px * sigma_px;
  const auto r = static_cast<double>(kernel.radius);
  double sum = 0.0;
  for (std::size_t i = 0; i < kernel.weights.size(); ++i) {
    const double d = static_cast<double>(i) - r;
    kernel.weights[i] = std::exp(-d * d / denom);
    sum += kernel.weights[i];
  }
  for (double& w : kernel.weights) w /= sum;
  return kernel;
}

namespace {

std::size_t extent_along(const Extent3& dims, Axis axis) {
  switch (axis) {
    case Axis::X: return dims.x;
    case Axis::Y: return dims.y;
    case Axis::Z: return dims.z;
  }
  return 0;
}

char axis_name(Axis axis) {
  return axis == Axis::X ? 'x' : axis == Axis::Y ? 'y' : 'z';
}

}  // namespace

VoxelStack convolve_axis(const VoxelStack& stack, Axis axis, const Kernel1D& kernel,
                         Boundary boundary) {
  const Extent3& dims = stack.dims();
  const std::size_t len = extent_along(dims, axis);
  // Renormalized blurs stay well defined however far the kernel overhangs.
  if (boundary == Boundary::Zero && kernel.radius >= len) {
    throw Error(ErrorCode::KernelTooLarge,
                std::string("kernel radius ") + std::to_string(kernel.radius) +
                    " does not fit stack extent " + std::to_string(len) + " along " +
                    axis_name(axis) + "; ground truth too small for the requested PSF");
  }
  if (kernel.radius == 0) {
    return stack;
  }

  const std::size_t stride = axis == Axis::X ? 1 : axis == Axis::Y ? dims.x : dims.x * dims.y;
  const std::size_t lines = stack.size() / len;
  const auto in = stack.data();
  std::vector<double> out(in.size(), 0.0);
  const auto r = static_cast<std::ptrdiff_t>(kernel.radius);
  const auto n = static_cast<std::ptrdiff_t>(len);

  for (std::size_t line = 0; line < lines; ++line) {
    // Map the line number onto the offset of its first voxel.
    std::size_t base = 0;
    switch (axis) {
      case Axis::X: base = line * dims.x; break;
      case Axis::Y: base = (line % dims.x) + (line / dims.x) * dims.x * dims.y; break;
      case Axis::Z: base = line; break;
    }
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - r);
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + r);
      double acc = 0.0;
      double mass = 0.0;
      for (std::ptrdiff_t j = lo; j <= hi; ++j) {
        const double w = kernel.weights[static_cast<std::size_t>(j - i + r)];
        acc += w * in[base + static_cast<std::size_t>(j) * stride];
        mass += w;
      }
      const bool clipped = lo > i - r || hi < i + r;
      if (boundary == Boundary::Renormalize && clipped) acc /= mass;
      out[base + static_cast<std::size_t>(i) * stride] = acc;
    }
  }
  return VoxelStack(dims, stack.voxel_size(), std::move(out));
}

VoxelStack convolve_separable_voxels(const VoxelStack& stack, const Vec3& sigma_voxels,
                                     double truncation, Boundary boundary) {
  const Kernel1D kx = gaussian_kernel_1d(sigma_voxels.x, truncation);
  const Kernel1D ky = gaussian_kernel_1d(sigma_voxels.y, truncation);
  const Kernel1D kz = gaussian_kernel_1d(sigma_voxels.z, truncation);
  VoxelStack out = convolve_axis(stack, Axis::X, kx, boundary);
  out = convolve_axis(out, Axis::Y, ky, boundary);
  return convolve_axis(out, Axis::Z, kz, boundary);
}

VoxelStack convolve_separable(const VoxelStack& stack, const PsfSigmas& sigmas,
                              double truncation) {
  const Vec3& vs = stack.voxel_size();
  return convolve_separable_voxels(stack, {sigmas.x / vs.x, sigmas.y / vs.y, sigmas.z / vs.z},
                                   truncation);
}

VoxelStack bin(const VoxelStack& stack, const BinFactors& factors) {
  const Extent3& d = stack.dims();
  auto check = [](std::size_t dim, std::size_t f, char name) {
    if (f == 0 || dim % f != 0) {
      throw Error(ErrorCode::BinMismatch, std::string("bin factor ") + std::to_string(f) +
                                              " does not divide " + name + " extent " +
                                              std::to_string(dim));
    }
  };
  check(d.x, factors.x, 'x');
  check(d.y, factors.y, 'y');
  check(d.z, factors.z, 'z');

  const Extent3 od{d.x / factors.x, d.y / factors.y, d.z / factors.z};
  std::vector<double> out(od.volume(), 0.0);
  for (std::size_t z = 0; z < d.z; ++z) {
    for (std::size_t y = 0; y < d.y; ++y) {
      const std::size_t orow = od.x * (y / factors.y + od.y * (z / factors.z));
      for (std::size_t x = 0; x < d.x; ++x) {
        out[orow + x / factors.x] += stack(x, y, z);
      }
    }
  }
  const auto block = static_cast<double>(factors.x * factors.y * factors.z);
  for (double& v : out) v /= block;

  const Vec3& vs = stack.voxel_size();
  return VoxelStack(od,
                    {vs.x * static_cast<double>(factors.x), vs.y * static_cast<double>(factors.y),
                     vs.z * static_cast<double>(factors.z)},
                    std::move(out));
}

}  // namespace confocal
