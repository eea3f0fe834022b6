// binviz - binary-to-image conversion and noise augmentation pipeline
// Byte stream -> 3-channel image (byte value, windowed entropy, zeros)

#pragma once

#include <binviz/corpus.hpp>
#include <binviz/entropy.hpp>
#include <binviz/error.hpp>
#include <binviz/image.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace binviz {

struct ImageSize {
  std::size_t width = 0;
  std::size_t height = 0;
  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

enum class Interpolation { bilinear };

inline std::string_view to_string(Interpolation) { return "bilinear"; }

inline Interpolation parse_interpolation(std::string_view s) {
  if (s == "bilinear") return Interpolation::bilinear;
  throw ValidationError("unknown interpolation '" + std::string(s) + "'");
}

struct ConversionConfig {
  std::size_t width = 256;
  std::size_t entropy_window = 256;
  std::optional<ImageSize> resize_to = ImageSize{256, 256};
  Interpolation interpolation = Interpolation::bilinear;

  void validate() const {
    if (width < 1) throw ValidationError("image width must be >= 1");
    check_window(entropy_window);
    if (resize_to && (resize_to->width < 8 || resize_to->height < 8)) {
      throw ValidationError("resize dimensions must be >= 8");
    }
  }

  friend bool operator==(const ConversionConfig&, const ConversionConfig&) = default;
};

/**
 * Bilinear resampling with half-pixel centers (source coordinate
 * (x + 0.5) * src/dst - 0.5, clamped to the edge). Results are rounded
 * half-up and clamped to [0, 255].
 */
inline Image resize_bilinear(const Image& src, ImageSize size) {
  if (src.width == 0 || src.height == 0) throw ValidationError("cannot resize an empty image");
  if (size.width == 0 || size.height == 0) throw ValidationError("resize target must be nonempty");

  Image dst(size.width, size.height);
  dst.source_id = src.source_id;
  dst.label = src.label;
  dst.lineage = src.lineage;

  struct Tap {
    std::size_t i0, i1;
    double w1;
  };
  auto taps = [](std::size_t src_n, std::size_t dst_n) {
    std::vector<Tap> t(dst_n);
    const double scale = static_cast<double>(src_n) / static_cast<double>(dst_n);
    for (std::size_t i = 0; i < dst_n; ++i) {
      double x = (static_cast<double>(i) + 0.5) * scale - 0.5;
      x = std::clamp(x, 0.0, static_cast<double>(src_n - 1));
      auto i0 = static_cast<std::size_t>(std::floor(x));
      auto i1 = std::min(i0 + 1, src_n - 1);
      t[i] = {i0, i1, x - static_cast<double>(i0)};
    }
    return t;
  };
  const auto xs = taps(src.width, size.width);
  const auto ys = taps(src.height, size.height);

  for (std::size_t r = 0; r < size.height; ++r) {
    const auto& ty = ys[r];
    for (std::size_t c = 0; c < size.width; ++c) {
      const auto& tx = xs[c];
      for (std::size_t ch = 0; ch < kChannels; ++ch) {
        const double top = src.at(ty.i0, tx.i0, ch) * (1.0 - tx.w1) + src.at(ty.i0, tx.i1, ch) * tx.w1;
        const double bot = src.at(ty.i1, tx.i0, ch) * (1.0 - tx.w1) + src.at(ty.i1, tx.i1, ch) * tx.w1;
        const double v = top * (1.0 - ty.w1) + bot * ty.w1;
        dst.at(r, c, ch) = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
      }
    }
  }
  return dst;
}

/// Native (un-resized) image: fixed width, ceil(len / width) rows, row-major
/// fill, zero padding after the last byte.
inline Image convert_native(std::span<const std::uint8_t> payload, std::size_t width,
                            std::size_t entropy_window) {
  if (payload.empty()) throw ValidationError("cannot convert an empty payload");
  if (width < 1) throw ValidationError("image width must be >= 1");

  const std::size_t height = (payload.size() + width - 1) / width;
  Image img(width, height);
  const auto entropy = entropy_channel_all(payload, entropy_window);
  for (std::size_t j = 0; j < payload.size(); ++j) {
    img.pixels[j * kChannels + 0] = payload[j];
    img.pixels[j * kChannels + 1] = entropy[j];
  }
  return img;
}

/// Converts one sample to its original-lineage image.
inline Image convert(const SampleRecord& record, const ConversionConfig& cfg,
                     std::uintmax_t max_payload = kDefaultMaxFileSize) {
  cfg.validate();
  if (record.payload.empty()) throw SampleError(record.id, "cannot convert an empty payload");
  if (record.payload.size() > max_payload) {
    throw SampleError(record.id, "payload exceeds size cap (" + std::to_string(record.payload.size()) +
                                     " > " + std::to_string(max_payload) + " bytes)");
  }

  Image img = convert_native(record.payload, cfg.width, cfg.entropy_window);
  img.source_id = record.id;
  img.label = record.label;
  if (cfg.resize_to) img = resize_bilinear(img, *cfg.resize_to);
  return img;
}

}  // namespace binviz
