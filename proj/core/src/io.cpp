#include "confocal/io.hpp"

#include <tiffio.h>

#include <array>
#include <charconv>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "confocal/error.hpp"

namespace confocal {

namespace {

using Json = nlohmann::ordered_json;

thread_local std::string last_tiff_error;

void tiff_error_handler(const char* module, const char* fmt, va_list args) {
  char buf[512];
  std::vsnprintf(buf, sizeof buf, fmt, args);
  last_tiff_error = module != nullptr ? std::string(module) + ": " + buf : std::string(buf);
}

void tiff_warning_handler(const char*, const char*, va_list) {}

void install_tiff_handlers() {
  static std::once_flag once;
  std::call_once(once, [] {
    TIFFSetErrorHandler(tiff_error_handler);
    TIFFSetWarningHandler(tiff_warning_handler);
  });
}

struct TiffCloser {
  void operator()(TIFF* tif) const noexcept { TIFFClose(tif); }
};
using TiffHandle = std::unique_ptr<TIFF, TiffCloser>;

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool parse_double(std::string_view text, double& out) {
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc{} && res.ptr == text.data() + text.size();
}

constexpr std::string_view kVoxelSizeKey = "voxel_size=";
constexpr std::string_view kSpacingKey = "spacing=";

std::string describe(const VoxelStack& stack) {
  // ImageJ-compatible header; voxel_size carries the exact values.
  const Vec3& vs = stack.voxel_size();
  std::ostringstream out;
  out << "ImageJ=1.11a\n"
      << "images=" << stack.dims().z << '\n'
      << "slices=" << stack.dims().z << '\n'
      << "unit=micron\n"
      << kSpacingKey << format_double(vs.z) << '\n'
      << "loop=false\n"
      << kVoxelSizeKey << format_double(vs.x) << ',' << format_double(vs.y) << ','
      << format_double(vs.z) << '\n';
  return out.str();
}

// Reads voxel size from our description line, or ImageJ spacing plus the
// resolution tags.
bool voxel_size_from_metadata(TIFF* tif, Vec3& out) {
  char* desc = nullptr;
  std::string_view text;
  if (TIFFGetField(tif, TIFFTAG_IMAGEDESCRIPTION, &desc) == 1 && desc != nullptr) text = desc;

  std::size_t line_start = 0;
  std::optional<double> spacing;
  while (line_start < text.size()) {
    std::size_t end = text.find('\n', line_start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(line_start, end - line_start);
    line_start = end + 1;
    if (line.starts_with(kVoxelSizeKey)) {
      const std::string_view rest = line.substr(kVoxelSizeKey.size());
      const auto c1 = rest.find(',');
      const auto c2 = rest.find(',', c1 == std::string_view::npos ? c1 : c1 + 1);
      Vec3 v;
      if (c1 != std::string_view::npos && c2 != std::string_view::npos &&
          parse_double(rest.substr(0, c1), v.x) &&
          parse_double(rest.substr(c1 + 1, c2 - c1 - 1), v.y) &&
          parse_double(rest.substr(c2 + 1), v.z) && v.x > 0 && v.y > 0 && v.z > 0) {
        out = v;
        return true;
      }
    } else if (line.starts_with(kSpacingKey)) {
      double s = 0.0;
      if (parse_double(line.substr(kSpacingKey.size()), s) && s > 0) spacing = s;
    }
  }

  float xres = 0.0F;
  float yres = 0.0F;
  if (TIFFGetField(tif, TIFFTAG_XRESOLUTION, &xres) == 1 &&
      TIFFGetField(tif, TIFFTAG_YRESOLUTION, &yres) == 1 && xres > 0.0F && yres > 0.0F) {
    out = {1.0 / static_cast<double>(xres), 1.0 / static_cast<double>(yres), spacing.value_or(1.0)};
    return true;
  }
  return false;
}

template <typename T>
T get_field_or(TIFF* tif, ttag_t tag, T fallback) {
  T value = fallback;
  if (TIFFGetFieldDefaulted(tif, tag, &value) != 1) return fallback;
  return value;
}

}  // namespace

VoxelStack read_stack(const std::filesystem::path& path, StackFileInfo* info) {
  install_tiff_handlers();
  last_tiff_error.clear();
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::IoError, "no such file: " + path.string());
  }
  TiffHandle tif(TIFFOpen(path.c_str(), "r"));
  if (!tif) {
    throw Error(ErrorCode::UnsupportedFormat,
                "cannot open " + path.string() + " as TIFF: " + last_tiff_error);
  }

  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint16_t depth = 0;
  Vec3 voxel_size{1.0, 1.0, 1.0};
  bool has_voxel_size = false;
  std::vector<double> data;
  std::size_t pages = 0;

  do {
    const auto w = get_field_or<std::uint32_t>(tif.get(), TIFFTAG_IMAGEWIDTH, 0);
    const auto h = get_field_or<std::uint32_t>(tif.get(), TIFFTAG_IMAGELENGTH, 0);
    const auto bps = get_field_or<std::uint16_t>(tif.get(), TIFFTAG_BITSPERSAMPLE, 1);
    const auto spp = get_field_or<std::uint16_t>(tif.get(), TIFFTAG_SAMPLESPERPIXEL, 1);
    const auto fmt = get_field_or<std::uint16_t>(tif.get(), TIFFTAG_SAMPLEFORMAT, SAMPLEFORMAT_UINT);
    const auto photometric =
        get_field_or<std::uint16_t>(tif.get(), TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_MINISBLACK);

    const std::string where = path.string() + " page " + std::to_string(pages);
    if (spp != 1 || (photometric != PHOTOMETRIC_MINISBLACK && photometric != PHOTOMETRIC_MINISWHITE)) {
      throw Error(ErrorCode::UnsupportedFormat, where + ": only single-channel grayscale is supported");
    }
    if (fmt != SAMPLEFORMAT_UINT) {
      throw Error(ErrorCode::UnsupportedFormat, where + ": only unsigned integer samples are supported");
    }
    if (bps != 8 && bps != 16) {
      throw Error(ErrorCode::UnsupportedFormat,
                  where + ": unsupported bit depth " + std::to_string(bps));
    }
    if (TIFFIsTiled(tif.get())) {
      throw Error(ErrorCode::UnsupportedFormat, where + ": tiled TIFF is not supported");
    }
    if (w == 0 || h == 0) throw Error(ErrorCode::CorruptStack, where + ": empty page");

    if (pages == 0) {
      width = w;
      height = h;
      depth = bps;
      has_voxel_size = voxel_size_from_metadata(tif.get(), voxel_size);
    } else if (w != width || h != height || bps != depth) {
      throw Error(ErrorCode::CorruptStack,
                  where + ": page shape or bit depth differs from the first page");
    }

    const tmsize_t line_bytes = TIFFScanlineSize(tif.get());
    std::vector<unsigned char> line(static_cast<std::size_t>(line_bytes));
    const std::size_t offset = data.size();
    data.resize(offset + static_cast<std::size_t>(w) * h);
    for (std::uint32_t row = 0; row < h; ++row) {
      if (TIFFReadScanline(tif.get(), line.data(), row, 0) < 0) {
        throw Error(ErrorCode::CorruptStack, where + ": cannot read row " + std::to_string(row) +
                                                 ": " + last_tiff_error);
      }
      double* dst = data.data() + offset + static_cast<std::size_t>(row) * w;
      if (bps == 8) {
        for (std::uint32_t x = 0; x < w; ++x) dst[x] = line[x];
      } else {
        const auto* src = reinterpret_cast<const std::uint16_t*>(line.data());
        for (std::uint32_t x = 0; x < w; ++x) dst[x] = src[x];
      }
    }
    ++pages;
  } while (TIFFReadDirectory(tif.get()) == 1);

  if (info != nullptr) {
    info->bit_depth = depth;
    info->has_voxel_size = has_voxel_size;
  }
  return VoxelStack({width, height, pages}, voxel_size, std::move(data));
}

void write_stack(const VoxelStack& stack, const std::filesystem::path& path, int bit_depth) {
  install_tiff_handlers();
  last_tiff_error.clear();
  if (bit_depth != 8 && bit_depth != 16) {
    throw Error(ErrorCode::InvalidArgument,
                "bit depth must be 8 or 16, got " + std::to_string(bit_depth));
  }
  TiffHandle tif(TIFFOpen(path.c_str(), "w"));
  if (!tif) {
    throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing: " + last_tiff_error);
  }

  const Extent3& d = stack.dims();
  const auto width = static_cast<std::uint32_t>(d.x);
  const auto height = static_cast<std::uint32_t>(d.y);
  const std::string description = describe(stack);
  const std::size_t sample_bytes = bit_depth == 8 ? 1 : 2;
  std::vector<unsigned char> page(d.x * d.y * sample_bytes);

  for (std::size_t z = 0; z < d.z; ++z) {
    TIFF* t = tif.get();
    TIFFSetField(t, TIFFTAG_SUBFILETYPE, FILETYPE_PAGE);
    TIFFSetField(t, TIFFTAG_IMAGEWIDTH, width);
    TIFFSetField(t, TIFFTAG_IMAGELENGTH, height);
    TIFFSetField(t, TIFFTAG_BITSPERSAMPLE, static_cast<std::uint16_t>(bit_depth));
    TIFFSetField(t, TIFFTAG_SAMPLESPERPIXEL, static_cast<std::uint16_t>(1));
    TIFFSetField(t, TIFFTAG_SAMPLEFORMAT, static_cast<std::uint16_t>(SAMPLEFORMAT_UINT));
    TIFFSetField(t, TIFFTAG_PHOTOMETRIC, static_cast<std::uint16_t>(PHOTOMETRIC_MINISBLACK));
    TIFFSetField(t, TIFFTAG_COMPRESSION, static_cast<std::uint16_t>(COMPRESSION_NONE));
    TIFFSetField(t, TIFFTAG_PLANARCONFIG, static_cast<std::uint16_t>(PLANARCONFIG_CONTIG));
    TIFFSetField(t, TIFFTAG_ROWSPERSTRIP, height);
    TIFFSetField(t, TIFFTAG_RESOLUTIONUNIT, static_cast<std::uint16_t>(RESUNIT_NONE));
    TIFFSetField(t, TIFFTAG_XRESOLUTION, static_cast<float>(1.0 / stack.voxel_size().x));
    TIFFSetField(t, TIFFTAG_YRESOLUTION, static_cast<float>(1.0 / stack.voxel_size().y));
    TIFFSetField(t, TIFFTAG_PAGENUMBER, static_cast<std::uint16_t>(z),
                 static_cast<std::uint16_t>(d.z));
    if (z == 0) TIFFSetField(t, TIFFTAG_IMAGEDESCRIPTION, description.c_str());

    for (std::size_t y = 0; y < d.y; ++y) {
      for (std::size_t x = 0; x < d.x; ++x) {
        const double q = quantize_value(stack(x, y, z), bit_depth);
        const std::size_t i = x + d.x * y;
        if (bit_depth == 8) {
          page[i] = static_cast<unsigned char>(q);
        } else {
          const auto v = static_cast<std::uint16_t>(q);
          std::memcpy(page.data() + 2 * i, &v, sizeof v);
        }
      }
    }
    if (TIFFWriteEncodedStrip(t, 0, page.data(), static_cast<tmsize_t>(page.size())) < 0 ||
        TIFFWriteDirectory(t) != 1) {
      throw Error(ErrorCode::IoError, "failed writing page " + std::to_string(z) + " of " +
                                          path.string() + ": " + last_tiff_error);
    }
  }
  TIFF* raw = tif.release();
  TIFFFlush(raw);
  TIFFClose(raw);
}

// ---------------------------------------------------------------------------
// JSON documents

namespace {

[[noreturn]] void format_error(const std::string& what) {
  throw Error(ErrorCode::StatsFormat, what);
}

void reject_unknown(const Json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto k : allowed) known = known || key == k;
    if (!known) format_error("unknown key '" + where + key + "'");
  }
}

const Json& require(const Json& obj, const std::string& key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) format_error("missing key '" + where + key + "'");
  return *it;
}

double number(const Json& obj, const std::string& key, const std::string& where = "") {
  const Json& v = require(obj, key, where);
  if (!v.is_number()) format_error("key '" + where + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t count(const Json& obj, const std::string& key) {
  const Json& v = require(obj, key, "");
  if (!v.is_number_unsigned()) format_error("key '" + key + "' must be a non-negative integer");
  return v.get<std::uint64_t>();
}

template <typename T>
std::array<T, 3> triple(const Json& obj, const std::string& key) {
  const Json& v = require(obj, key, "");
  if (!v.is_array() || v.size() != 3) format_error("key '" + key + "' must be a 3-element array");
  std::array<T, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) {
    if constexpr (std::is_floating_point_v<T>) {
      if (!v[i].is_number()) format_error("key '" + key + "' must hold numbers");
    } else {
      if (!v[i].is_number_unsigned()) format_error("key '" + key + "' must hold non-negative integers");
    }
    out[i] = v[i].get<T>();
  }
  return out;
}

Json parse_object(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    format_error(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) format_error("document must be a JSON object");
  return doc;
}

void check_version(const Json& doc, int expected) {
  const Json& v = require(doc, "format_version", "");
  if (!v.is_number_integer() || v.get<long long>() != expected) {
    format_error("unsupported format_version " + v.dump() + " (expected " +
                 std::to_string(expected) + ")");
  }
}

Json moments_json(const Moments3& m) {
  return Json{{"mean", m.mean}, {"variance", m.variance}, {"third_central", m.third_central}};
}

Moments3 moments_from(const Json& doc, const std::string& key) {
  const Json& m = require(doc, key, "");
  if (!m.is_object()) format_error("key '" + key + "' must be an object");
  const std::string where = key + ".";
  reject_unknown(m, {"mean", "variance", "third_central"}, where);
  return {number(m, "mean", where), number(m, "variance", where), number(m, "third_central", where)};
}

Json vec_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

}  // namespace

std::string stats_to_json(const SampleStats& s) {
  Json doc;
  doc["format_version"] = kStatsFormatVersion;
  doc["noise"] = moments_json(s.noise);
  doc["signal_mean"] = s.signal_mean;
  doc["threshold"] = s.threshold;
  doc["n_noise"] = static_cast<std::uint64_t>(s.n_noise);
  doc["n_signal"] = static_cast<std::uint64_t>(s.n_signal);
  doc["blur_sigma"] = vec_json(s.blur_sigma);
  return doc.dump(2) + "\n";
}

SampleStats stats_from_json(const std::string& text) {
  const Json doc = parse_object(text);
  reject_unknown(doc, {"format_version", "noise", "signal_mean", "threshold", "n_noise", "n_signal",
                       "blur_sigma"},
                 "");
  check_version(doc, kStatsFormatVersion);
  SampleStats s;
  s.noise = moments_from(doc, "noise");
  s.signal_mean = number(doc, "signal_mean");
  s.threshold = number(doc, "threshold");
  s.n_noise = count(doc, "n_noise");
  s.n_signal = count(doc, "n_signal");
  const auto blur = triple<double>(doc, "blur_sigma");
  s.blur_sigma = {blur[0], blur[1], blur[2]};
  return s;
}

void write_stats(const SampleStats& stats, const std::filesystem::path& path) {
  write_text(stats_to_json(stats), path);
}

SampleStats read_stats(const std::filesystem::path& path) { return stats_from_json(read_text(path)); }

std::string config_to_json(const SimConfig& c) {
  Json doc;
  doc["format_version"] = kConfigFormatVersion;
  doc["psf"] = Json::array({c.psf.x, c.psf.y, c.psf.z});
  doc["bin"] = Json::array({c.bin.x, c.bin.y, c.bin.z});
  doc["noise"] = moments_json(c.noise);
  doc["signal_mean"] = c.signal_mean;
  doc["seed"] = c.seed.value;
  doc["bit_depth"] = c.bit_depth;
  doc["blur_sigma"] = vec_json(c.blur_sigma_voxels);
  doc["truncation"] = c.truncation;
  doc["otsu_bins"] = static_cast<std::uint64_t>(c.otsu_bins);
  return doc.dump(2) + "\n";
}

SimConfig config_from_json(const std::string& text) {
  const Json doc = parse_object(text);
  reject_unknown(doc, {"format_version", "psf", "bin", "noise", "signal_mean", "seed", "bit_depth",
                       "blur_sigma", "truncation", "otsu_bins"},
                 "");
  check_version(doc, kConfigFormatVersion);
  SimConfig c;
  const auto psf = triple<double>(doc, "psf");
  c.psf = {psf[0], psf[1], psf[2]};
  const auto b = triple<std::uint64_t>(doc, "bin");
  c.bin = {b[0], b[1], b[2]};
  c.noise = moments_from(doc, "noise");
  c.signal_mean = number(doc, "signal_mean");
  c.seed.value = count(doc, "seed");
  c.bit_depth = static_cast<int>(count(doc, "bit_depth"));
  const auto blur = triple<double>(doc, "blur_sigma");
  c.blur_sigma_voxels = {blur[0], blur[1], blur[2]};
  c.truncation = number(doc, "truncation");
  c.otsu_bins = count(doc, "otsu_bins");
  return c;
}

}  // namespace confocal
