#pragma once

#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "confocal/stack.hpp"

namespace confocal {

/// Background-noise statistics: mean, variance, third central moment.
using NoiseMoments = Moments3;

/// Gamma(shape, scale) shifted by `offset`.
struct GammaNoise {
  double shape = 1.0;
  double scale = 1.0;
  double offset = 0.0;
};

struct GaussianNoise {
  double mean = 0.0;
  double variance = 0.0;
};

using NoiseModel = std::variant<GammaNoise, GaussianNoise>;

struct RngSeed {
  std::uint64_t value = 0;
};

/// Moment-matched noise model. Zero third moment selects the Gaussian;
/// otherwise an offset gamma with scale m3/(2 var), shape var/scale^2 and
/// offset mean - shape*scale. Throws DegenerateNoise for var <= 0 and
/// NegativeSkewUnsupported for m3 < 0.
NoiseModel fit_noise(const NoiseMoments& moments);

/// Analytic moments of a model; inverse of fit_noise.
NoiseMoments model_moments(const NoiseModel& model);

/// Deterministic variate stream for a NoiseModel.
///
/// Generator "cf-mt64-v1": std::mt19937_64 seeded with the raw 64-bit seed.
/// Uniforms are ((u >> 11) + 0.5) * 2^-53, normals come from the Marsaglia
/// polar method (spare value cached), gamma variates from Marsaglia-Tsang
/// squeeze-rejection, with the U^(1/k) boost for shape < 1. The engine is
/// specified bit-exactly by the standard; the transforms are implemented
/// here rather than with <random> distributions, whose algorithms vary
/// between standard libraries.
class NoiseSampler {
 public:
  static constexpr const char* kAlgorithm = "cf-mt64-v1";

  NoiseSampler(const NoiseModel& model, RngSeed seed);

  double operator()();

 private:
  double uniform();
  double normal();
  double standard_gamma(double shape);

  NoiseModel model_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// n draws from a fresh NoiseSampler(model, seed).
std::vector<double> sample(const NoiseModel& model, RngSeed seed, std::size_t n);

}  // namespace confocal
