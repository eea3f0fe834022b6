// binviz - binary-to-image conversion and noise augmentation pipeline
// Seeded random streams and additive noise samplers

#pragma once

#include <binviz/error.hpp>
#include <binviz/image.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace binviz {

/// Noise scale in intensity units for a ratio in [0, 1]: sigma, lambda and b
/// are all ratio * 255.
inline constexpr double kIntensityMax = 255.0;

inline double noise_scale(double ratio) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw ValidationError("noise ratio must be in [0, 1], got " + format_ratio(ratio));
  }
  return ratio * kIntensityMax;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Seed of the per-image stream: depends only on (seed, source_id), so an
/// image gets the same noise whatever order the images are processed in.
inline std::uint64_t stream_seed(std::uint64_t seed, std::string_view source_id) {
  return splitmix64(splitmix64(seed) ^ fnv1a64(source_id));
}

/**
 * Uniform variates on top of mt19937_64.
 *
 * The engine's output sequence is fixed by the standard; the conversions to
 * doubles are done here rather than through <random> distributions, whose
 * algorithms are implementation-defined. That keeps noise bit-identical
 * across standard libraries.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// (0, 1); 52 bits so that x + 0.5 is exact.
  double uniform_open() { return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52; }

  /// Integer in [0, n), n >= 1.
  std::uint64_t below(std::uint64_t n) {
    // Rejection on the top of the range keeps it unbiased.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

/// Standard normal draw via Box-Muller (one output per pair of uniforms).
inline double standard_normal(Rng& rng) {
  const double u1 = rng.uniform_open();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Poisson(lambda) draw. Multiplication method below lambda = 10, otherwise
/// Hormann's transformed rejection (PTRS).
inline std::uint64_t poisson_draw(double lambda, Rng& rng) {
  if (!(lambda >= 0.0)) throw ValidationError("poisson lambda must be >= 0");
  if (lambda == 0.0) return 0;

  if (lambda < 10.0) {
    const double limit = std::exp(-lambda);
    std::uint64_t k = 0;
    double prod = rng.uniform_open();
    while (prod > limit) {
      ++k;
      prod *= rng.uniform_open();
    }
    return k;
  }

  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform_open();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

/// Zero-mean normal noise with standard deviation ratio * 255.
inline double sample_gaussian(double ratio, Rng& rng) {
  const double sigma = noise_scale(ratio);
  if (sigma == 0.0) return 0.0;
  return sigma * standard_normal(rng);
}

/// Poisson noise with lambda = ratio * 255. Nonnegative; not re-centered.
inline std::uint64_t sample_poisson(double ratio, Rng& rng) {
  return poisson_draw(noise_scale(ratio), rng);
}

/// Laplace noise, location 0 and scale ratio * 255, by CDF inversion.
inline double sample_laplace(double ratio, Rng& rng) {
  const double b = noise_scale(ratio);
  if (b == 0.0) return 0.0;
  const double u = rng.uniform_open() - 0.5;  // (-0.5, 0.5)
  const double mag = -b * std::log(1.0 - 2.0 * std::abs(u));
  return u < 0.0 ? -mag : mag;
}

inline double sample_noise(NoiseKind kind, double ratio, Rng& rng) {
  switch (kind) {
    case NoiseKind::gaussian: return sample_gaussian(ratio, rng);
    case NoiseKind::poisson: return static_cast<double>(sample_poisson(ratio, rng));
    case NoiseKind::laplace: return sample_laplace(ratio, rng);
  }
  return 0.0;
}

}  // namespace binviz
