#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <string_view>

#include "confocal/error.hpp"
#include "confocal/io.hpp"
#include "confocal/pipeline.hpp"
#include "confocal/segmentstats.hpp"
#include "confocal/synth.hpp"

namespace confocal::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Locale-independent number lists like "2,2,6".
template <typename T>
std::vector<T> parse_list(std::string_view text, std::string_view flag) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view item = text.substr(start, end - start);
    T value{};
    const auto res = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
      throw UsageError(std::string(flag) + ": cannot parse '" + std::string(item) + "' as a number");
    }
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(value)) throw UsageError(std::string(flag) + ": values must be finite");
    }
    out.push_back(value);
    start = end + 1;
  }
  return out;
}

template <typename T>
std::array<T, 3> parse_triple(std::string_view text, std::string_view flag) {
  const auto v = parse_list<T>(text, flag);
  if (v.size() != 3) throw UsageError(std::string(flag) + ": expected three comma-separated values");
  return {v[0], v[1], v[2]};
}

Vec3 parse_vec3(std::string_view text, std::string_view flag) {
  const auto t = parse_triple<double>(text, flag);
  return {t[0], t[1], t[2]};
}

std::string describe(const Moments3& m) {
  return "mean=" + fmt(m.mean) + " variance=" + fmt(m.variance) +
         " third_central=" + fmt(m.third_central);
}

std::string describe(const Extent3& d) {
  return std::to_string(d.x) + "x" + std::to_string(d.y) + "x" + std::to_string(d.z);
}

VoxelStack load(const std::string& path, std::ostream& err) {
  StackFileInfo info;
  VoxelStack stack = read_stack(path, &info);
  if (!info.has_voxel_size) {
    err << "warning: " << path << " has no resolution metadata; assuming voxel size 1,1,1\n";
  }
  return stack;
}

void print_stats(const SampleStats& s, std::ostream& out) {
  out << "threshold: " << fmt(s.threshold) << "\n"
      << "noise voxels: " << s.n_noise << "\n"
      << "signal voxels: " << s.n_signal << "\n"
      << "noise moments: " << describe(s.noise) << "\n"
      << "signal mean: " << fmt(s.signal_mean) << "\n";
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  std::string sample;
  std::string blur = "2,2,2";
  std::size_t bins = kDefaultOtsuBins;
  std::string out;
};

void add_analysis_flags(CLI::App* cmd, std::string& blur, std::size_t& bins) {
  cmd->add_option("--blur-sigma", blur, "Gaussian blur before Otsu, in voxels (sx,sy,sz)")
      ->capture_default_str();
  cmd->add_option("--bins", bins, "Otsu histogram bins")->capture_default_str()->check(
      CLI::Range(std::size_t{2}, std::size_t{1} << 20));
}

void cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  const Vec3 blur = parse_vec3(a.blur, "--blur-sigma");
  const VoxelStack sample = load(a.sample, err);
  const SampleStats stats = analyze(sample, blur, a.bins);
  write_stats(stats, a.out);
  print_stats(stats, out);
}

struct SimulateArgs {
  std::string truth;
  std::string psf;
  std::string bin;
  std::string stats;
  std::string noise;
  std::optional<double> signal_mean;
  std::string sample;
  std::uint64_t seed = kDefaultSeed;
  int bit_depth = 16;
  std::string blur = "2,2,2";
  std::size_t bins = kDefaultOtsuBins;
  double truncation = kDefaultTruncation;
  std::string save_noiseless;
  std::string out;
};

void cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  const int sources = static_cast<int>(!a.stats.empty()) + static_cast<int>(!a.noise.empty()) +
                      static_cast<int>(!a.sample.empty());
  if (sources != 1) {
    throw UsageError("simulate needs exactly one noise source: --stats, --noise or --sample");
  }
  if (!a.noise.empty() && !a.signal_mean) throw UsageError("--noise requires --signal-mean");
  if (a.noise.empty() && a.signal_mean) throw UsageError("--signal-mean is only valid with --noise");

  SimConfig config;
  const auto psf = parse_triple<double>(a.psf, "--psf");
  config.psf = {psf[0], psf[1], psf[2]};
  const auto b = parse_triple<std::size_t>(a.bin, "--bin");
  config.bin = {b[0], b[1], b[2]};
  config.seed.value = a.seed;
  config.bit_depth = a.bit_depth;
  config.blur_sigma_voxels = parse_vec3(a.blur, "--blur-sigma");
  config.otsu_bins = a.bins;
  config.truncation = a.truncation;

  if (!a.noise.empty()) {
    const Vec3 m = parse_vec3(a.noise, "--noise");
    config.noise = {m.x, m.y, m.z};
    config.signal_mean = *a.signal_mean;
  } else {
    SampleStats stats;
    if (!a.stats.empty()) {
      stats = read_stats(a.stats);
    } else {
      stats = analyze(load(a.sample, err), config.blur_sigma_voxels, config.otsu_bins);
      out << "sample analysis:\n";
      print_stats(stats, out);
    }
    config.noise = stats.noise;
    config.signal_mean = stats.signal_mean;
  }

  const VoxelStack truth = load(a.truth, err);
  const SimOutput result = simulate(truth, config);
  write_stack(result.image, a.out, config.bit_depth);
  if (!a.save_noiseless.empty()) write_stack(result.noiseless, a.save_noiseless, config.bit_depth);

  out << "scale: " << fmt(result.scale) << "\n"
      << "threshold: " << fmt(result.threshold) << "\n"
      << "output dims: " << describe(result.image.dims()) << "\n";
}

struct CompareArgs {
  std::string a;
  std::string b;
  std::string blur = "2,2,2";
  std::size_t bins = kDefaultOtsuBins;
  std::size_t hist_bins = 256;
  std::string out;
};

struct Populations {
  std::vector<double> noise;
  std::vector<double> signal;
};

Populations split(const VoxelStack& stack, const Vec3& blur, std::size_t bins) {
  const Segmentation seg = segment(stack, blur, bins);
  Populations p;
  const auto data = stack.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    (seg.mask.signal[i] != 0 ? p.signal : p.noise).push_back(data[i]);
  }
  return p;
}

std::vector<double> frequencies(const std::vector<double>& values, double lo, double width,
                                std::size_t n) {
  std::vector<double> freq(n, 0.0);
  if (values.empty()) return freq;
  for (double v : values) {
    auto j = static_cast<std::size_t>(std::max(0.0, std::floor((v - lo) / width)));
    freq[std::min(j, n - 1)] += 1.0;
  }
  for (double& f : freq) f /= static_cast<double>(values.size());
  return freq;
}

void cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
  const Vec3 blur = parse_vec3(a.blur, "--blur-sigma");
  const VoxelStack sa = load(a.a, err);
  const VoxelStack sb = load(a.b, err);
  const Populations pa = split(sa, blur, a.bins);
  const Populations pb = split(sb, blur, a.bins);

  const auto [alo, ahi] = min_max(sa);
  const auto [blo, bhi] = min_max(sb);
  const double lo = std::min(alo, blo);
  const double hi = std::max(ahi, bhi);
  const std::size_t n = a.hist_bins;
  const double width = hi > lo ? (hi - lo) / static_cast<double>(n) : 1.0;

  const auto an = frequencies(pa.noise, lo, width, n);
  const auto as = frequencies(pa.signal, lo, width, n);
  const auto bn = frequencies(pb.noise, lo, width, n);
  const auto bs = frequencies(pb.signal, lo, width, n);

  std::ofstream csv(a.out, std::ios::binary | std::ios::trunc);
  if (!csv) throw Error(ErrorCode::IoError, "cannot write " + a.out);
  csv << "bin_center,a_noise_freq,a_signal_freq,b_noise_freq,b_signal_freq\n";
  for (std::size_t j = 0; j < n; ++j) {
    const double center = lo + (static_cast<double>(j) + 0.5) * width;
    csv << fmt(center) << ',' << fmt(an[j]) << ',' << fmt(as[j]) << ',' << fmt(bn[j]) << ','
        << fmt(bs[j]) << '\n';
  }
  csv.close();
  if (!csv) throw Error(ErrorCode::IoError, "cannot write " + a.out);

  out << "a noise: n=" << pa.noise.size() << " " << describe(central_moments(pa.noise)) << "\n"
      << "a signal: n=" << pa.signal.size() << " " << describe(central_moments(pa.signal)) << "\n"
      << "b noise: n=" << pb.noise.size() << " " << describe(central_moments(pb.noise)) << "\n"
      << "b signal: n=" << pb.signal.size() << " " << describe(central_moments(pb.signal)) << "\n";
}

struct MakeTruthArgs {
  std::string shape;
  std::string dims = "128,128,128";
  std::string voxel_size = "1,1,1";
  double radius = 40.0;
  double tube = 4.0;
  std::string center;
  std::string plane = "xy";
  std::vector<std::string> points;
  std::string out;
};

void cmd_make_truth(const MakeTruthArgs& a, std::ostream& out) {
  const auto d = parse_triple<std::size_t>(a.dims, "--dims");
  const Extent3 dims{d[0], d[1], d[2]};
  if (dims.volume() == 0) throw UsageError("--dims: all dimensions must be positive");
  const Vec3 voxel = parse_vec3(a.voxel_size, "--voxel-size");

  std::optional<VoxelStack> truth;
  if (a.shape == "ring") {
    RingSpec spec;
    spec.dims = dims;
    spec.voxel_size = voxel;
    spec.major_radius = a.radius;
    spec.tube_radius = a.tube;
    if (!a.center.empty()) spec.center = parse_vec3(a.center, "--center");
    if (a.plane == "xy") {
      spec.plane = RingPlane::XY;
    } else if (a.plane == "xz") {
      spec.plane = RingPlane::XZ;
    } else if (a.plane == "yz") {
      spec.plane = RingPlane::YZ;
    } else {
      throw UsageError("--plane must be xy, xz or yz");
    }
    truth = make_ring(spec);
  } else {
    std::vector<VoxelIndex> positions;
    for (const auto& p : a.points) {
      const auto t = parse_triple<std::size_t>(p, "--point");
      positions.push_back({t[0], t[1], t[2]});
    }
    truth = make_points(dims, voxel, positions);
  }
  write_stack(*truth, a.out, 16);
  const auto nonzero = std::count_if(truth->data().begin(), truth->data().end(),
                                     [](double v) { return v != 0.0; });
  out << "wrote " << describe(dims) << " " << a.shape << " truth with " << nonzero
      << " nonzero voxels to " << a.out << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthetic confocal microscopy stacks from a known ground truth"};
  app.name("confocal-forge");
  app.require_subcommand(1);

  AnalyzeArgs analyze_args;
  auto* analyze_cmd = app.add_subcommand("analyze", "Extract noise and signal statistics from a sample stack");
  analyze_cmd->add_option("sample", analyze_args.sample, "Sample TIFF stack")->required();
  add_analysis_flags(analyze_cmd, analyze_args.blur, analyze_args.bins);
  analyze_cmd->add_option("--out", analyze_args.out, "Output stats file (.stats.json)")->required();

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a confocal stack from a ground truth");
  simulate_cmd->add_option("--truth", sim.truth, "Ground-truth TIFF stack")->required();
  simulate_cmd->add_option("--psf", sim.psf, "Gaussian PSF sigmas in physical units (sx,sy,sz)")->required();
  simulate_cmd->add_option("--bin", sim.bin, "Integer bin factors (bx,by,bz)")->required();
  simulate_cmd->add_option("--stats", sim.stats, "Stats file from `analyze`");
  simulate_cmd->add_option("--noise", sim.noise, "Noise mean,variance,third central moment");
  simulate_cmd->add_option("--signal-mean", sim.signal_mean, "Target signal mean (with --noise)");
  simulate_cmd->add_option("--sample", sim.sample, "Sample TIFF stack to analyze for noise and signal");
  simulate_cmd->add_option("--seed", sim.seed, "Noise RNG seed")->capture_default_str();
  simulate_cmd->add_option("--bit-depth", sim.bit_depth, "Output bit depth")
      ->capture_default_str()
      ->check(CLI::IsMember({8, 16}));
  add_analysis_flags(simulate_cmd, sim.blur, sim.bins);
  simulate_cmd->add_option("--truncation", sim.truncation, "PSF kernel truncation in sigmas")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--save-noiseless", sim.save_noiseless, "Also write the scaled stack before noise");
  simulate_cmd->add_option("--out", sim.out, "Output TIFF stack")->required();

  CompareArgs cmp;
  auto* compare_cmd = app.add_subcommand("compare", "Histogram noise and signal populations of two stacks");
  compare_cmd->add_option("a", cmp.a, "First TIFF stack")->required();
  compare_cmd->add_option("b", cmp.b, "Second TIFF stack")->required();
  add_analysis_flags(compare_cmd, cmp.blur, cmp.bins);
  compare_cmd->add_option("--hist-bins", cmp.hist_bins, "Bins of the shared CSV histogram")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 20));
  compare_cmd->add_option("--out", cmp.out, "Output CSV")->required();

  MakeTruthArgs mk;
  auto* truth_cmd = app.add_subcommand("make-truth", "Generate a synthetic ground-truth stack");
  truth_cmd->add_option("shape", mk.shape, "ring or points")->required()->check(CLI::IsMember({"ring", "points"}));
  truth_cmd->add_option("--dims", mk.dims, "Stack dimensions (nx,ny,nz)")->capture_default_str();
  truth_cmd->add_option("--voxel-size", mk.voxel_size, "Voxel size (vx,vy,vz)")->capture_default_str();
  truth_cmd->add_option("--radius", mk.radius, "Ring major radius in voxels")->capture_default_str();
  truth_cmd->add_option("--tube", mk.tube, "Ring tube radius in voxels")->capture_default_str();
  truth_cmd->add_option("--center", mk.center, "Ring center in voxels (default: grid center)");
  truth_cmd->add_option("--plane", mk.plane, "Ring plane: xy, xz or yz")->capture_default_str();
  truth_cmd->add_option("--point", mk.points, "Point position x,y,z (repeatable)");
  truth_cmd->add_option("--out", mk.out, "Output TIFF stack")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*analyze_cmd) cmd_analyze(analyze_args, out, err);
    if (*simulate_cmd) cmd_simulate(sim, out, err);
    if (*compare_cmd) cmd_compare(cmp, out, err);
    if (*truth_cmd) cmd_make_truth(mk, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("confocal-forge");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace confocal::cli
