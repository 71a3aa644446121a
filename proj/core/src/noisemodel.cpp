#include "confocal/noisemodel.hpp"

#include <cmath>
#include <string>

#include "confocal/error.hpp"

namespace confocal {

NoiseModel fit_noise(const NoiseMoments& m) {
  if (!std::isfinite(m.mean) || !std::isfinite(m.variance) || !std::isfinite(m.third_central)) {
    throw Error(ErrorCode::DegenerateNoise, "noise moments must be finite");
  }
  if (!(m.variance > 0.0)) {
    throw Error(ErrorCode::DegenerateNoise,
                "noise variance must be positive, got " + std::to_string(m.variance));
  }
  if (m.third_central < 0.0) {
    throw Error(ErrorCode::NegativeSkewUnsupported,
                "gamma noise cannot match a negative third central moment");
  }
  if (m.third_central == 0.0) {
    return GaussianNoise{m.mean, m.variance};
  }
  const double scale = m.third_central / (2.0 * m.variance);
  const double shape = m.variance / (scale * scale);
  return GammaNoise{shape, scale, m.mean - shape * scale};
}

NoiseMoments model_moments(const NoiseModel& model) {
  if (const auto* g = std::get_if<GammaNoise>(&model)) {
    const double k = g->shape;
    const double t = g->scale;
    return {k * t + g->offset, k * t * t, 2.0 * k * t * t * t};
  }
  const auto& n = std::get<GaussianNoise>(model);
  return {n.mean, n.variance, 0.0};
}

NoiseSampler::NoiseSampler(const NoiseModel& model, RngSeed seed)
    : model_(model), engine_(seed.value) {}

double NoiseSampler::uniform() {
  // Open interval (0, 1): safe for log and pow.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double NoiseSampler::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  has_spare_ = true;
  return u * f;
}

double NoiseSampler::standard_gamma(double shape) {
  if (shape < 1.0) {
    const double g = standard_gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double NoiseSampler::operator()() {
  if (const auto* g = std::get_if<GammaNoise>(&model_)) {
    return g->offset + g->scale * standard_gamma(g->shape);
  }
  const auto& n = std::get<GaussianNoise>(model_);
  return n.mean + std::sqrt(n.variance) * normal();
}

std::vector<double> sample(const NoiseModel& model, RngSeed seed, std::size_t n) {
  NoiseSampler draw(model, seed);
  std::vector<double> out(n);
  for (double& v : out) v = draw();
  return out;
}

}  // namespace confocal
