#pragma once

#include <filesystem>
#include <string>

#include "confocal/pipeline.hpp"
#include "confocal/segmentstats.hpp"
#include "confocal/stack.hpp"

namespace confocal {

/// Side information from read_stack.
struct StackFileInfo {
  int bit_depth = 0;
  /// False when the file carried no usable resolution metadata and the
  /// voxel size defaulted to (1, 1, 1).
  bool has_voxel_size = false;
};

/// Reads a multi-page grayscale TIFF, one page per z slice, 8 or 16 bit
/// unsigned. Values are converted without rescaling. Throws
/// UnsupportedFormat (RGB, palette, float, signed, tiled, other depths),
/// CorruptStack (pages disagree in shape or depth, or the file has no
/// pages) and IoError (missing or unreadable file).
VoxelStack read_stack(const std::filesystem::path& path, StackFileInfo* info = nullptr);

/// Writes an uncompressed multi-page TIFF with a fixed tag layout, so equal
/// stacks produce byte-identical files. Values are quantized with
/// quantize_value. Voxel size goes to the resolution tags and, at full
/// precision, to the image description. Throws IoError if the path cannot
/// be written.
void write_stack(const VoxelStack& stack, const std::filesystem::path& path, int bit_depth);

inline constexpr int kStatsFormatVersion = 1;
inline constexpr int kConfigFormatVersion = 1;

/// JSON text for a SampleStats; doubles are printed in shortest
/// round-trip form.
std::string stats_to_json(const SampleStats& stats);

/// Parses stats_to_json output. Unknown or missing keys, wrong types and
/// unsupported format versions throw StatsFormat naming the key.
SampleStats stats_from_json(const std::string& text);

void write_stats(const SampleStats& stats, const std::filesystem::path& path);
SampleStats read_stats(const std::filesystem::path& path);

std::string config_to_json(const SimConfig& config);
SimConfig config_from_json(const std::string& text);

}  // namespace confocal
