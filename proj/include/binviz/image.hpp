// binviz - binary-to-image conversion and noise augmentation pipeline
// Image container and augmentation lineage

#pragma once

#include <binviz/error.hpp>

#include <array>
#include <bitset>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace binviz {

inline constexpr std::size_t kChannels = 3;

enum class NoiseKind { gaussian, poisson, laplace };

inline std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::gaussian: return "gaussian";
    case NoiseKind::poisson: return "poisson";
    case NoiseKind::laplace: return "laplace";
  }
  return "unknown";
}

inline NoiseKind parse_noise_kind(std::string_view s) {
  if (s == "gaussian") return NoiseKind::gaussian;
  if (s == "poisson") return NoiseKind::poisson;
  if (s == "laplace") return NoiseKind::laplace;
  throw ValidationError("unknown noise kind '" + std::string(s) + "'");
}

using ChannelMask = std::bitset<kChannels>;

inline constexpr unsigned long kAllChannels = 0b111;

/// Shortest decimal form that round-trips (0.2 -> "0.2", 1.0 -> "1").
inline std::string format_ratio(double ratio) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), ratio);
  if (ec != std::errc{}) throw ValidationError("cannot format ratio");
  return std::string(buf.data(), end);
}

/// One noise transform: kind, noise ratio in [0, 1], seed and channel mask.
struct AugmentationSpec {
  NoiseKind kind = NoiseKind::gaussian;
  double ratio = 0.0;
  std::uint64_t seed = 0;
  ChannelMask channels{kAllChannels};

  void validate() const {
    if (!(ratio >= 0.0 && ratio <= 1.0)) {
      throw ValidationError("noise ratio must be in [0, 1], got " + format_ratio(ratio));
    }
    if (channels.none()) throw ValidationError("augmentation channel mask is empty");
  }

  /// Name fragment used in output file names: `<kind>_<ratio>_<seed>`.
  std::string tag() const {
    return std::string(to_string(kind)) + "_" + format_ratio(ratio) + "_" + std::to_string(seed);
  }

  friend bool operator==(const AugmentationSpec&, const AugmentationSpec&) = default;
};

/// nullopt marks an original (un-noised) image.
using Lineage = std::optional<AugmentationSpec>;

/// Output identifier for an image: `<source_id>__orig` or `<source_id>__<tag>`.
inline std::string image_stem(std::string_view source_id, const Lineage& lineage) {
  std::string stem(source_id);
  stem += "__";
  stem += lineage ? lineage->tag() : std::string("orig");
  return stem;
}

/// Row-major interleaved RGB image with provenance.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // width * height * kChannels
  std::string source_id;
  std::string label;
  Lineage lineage;

  Image() = default;
  Image(std::size_t w, std::size_t h) : width(w), height(h), pixels(w * h * kChannels, 0) {}

  std::uint8_t& at(std::size_t row, std::size_t col, std::size_t ch) {
    return pixels[(row * width + col) * kChannels + ch];
  }
  std::uint8_t at(std::size_t row, std::size_t col, std::size_t ch) const {
    return pixels[(row * width + col) * kChannels + ch];
  }

  std::string stem() const { return image_stem(source_id, lineage); }
};

}  // namespace binviz
