// binviz - binary-to-image conversion and noise augmentation pipeline
// Additive-noise augmentation and dataset enhancement

#pragma once

#include <binviz/error.hpp>
#include <binviz/image.hpp>
#include <binviz/noise.hpp>
#include <binviz/parallel.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace binviz {

/// Ordered set of noise transforms applied to the original dataset.
struct AugmentationPlan {
  std::vector<AugmentationSpec> specs;
  bool include_original = true;

  void validate() const {
    if (specs.empty()) throw ValidationError("augmentation plan has no noise specs");
    std::set<std::tuple<NoiseKind, double, std::uint64_t>> seen;
    for (const auto& s : specs) {
      s.validate();
      if (!seen.emplace(s.kind, s.ratio, s.seed).second) {
        throw ValidationError("augmentation plan repeats spec " + s.tag());
      }
    }
  }

  std::size_t size() const noexcept { return specs.size(); }
};

/**
 * Adds one independent noise draw to every selected channel of every pixel,
 * then rounds half-up and clamps to [0, 255].
 *
 * Draws are taken pixel by pixel in row-major order and, within a pixel, in
 * ascending channel order, from a stream seeded by (spec.seed, source_id).
 */
inline Image apply_noise(const Image& image, const AugmentationSpec& spec) {
  spec.validate();
  if (image.pixels.size() != image.width * image.height * kChannels) {
    throw ValidationError("pixel buffer size does not match image dimensions");
  }

  Image out = image;
  out.lineage = spec;
  if (spec.ratio == 0.0) return out;

  Rng rng(stream_seed(spec.seed, image.source_id));
  const std::size_t n = image.width * image.height;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t ch = 0; ch < kChannels; ++ch) {
      if (!spec.channels.test(ch)) continue;
      auto& px = out.pixels[p * kChannels + ch];
      const double v = std::floor(static_cast<double>(px) + sample_noise(spec.kind, spec.ratio, rng) + 0.5);
      px = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
  }
  return out;
}

/**
 * Enhanced dataset: the originals plus one noised copy of every original per
 * plan spec, so |result| = (t + 1) * |dataset|. Each spec is applied to the
 * original images, never to earlier noised copies. Output is sorted by
 * image stem.
 */
inline std::vector<Image> enhance(std::span<const Image> dataset, const AugmentationPlan& plan,
                                  unsigned jobs = 1) {
  if (dataset.empty()) throw ValidationError("cannot enhance an empty dataset");
  plan.validate();

  const std::size_t n = dataset.size();
  const std::size_t t = plan.specs.size();
  std::vector<Image> out(n * (t + 1));
  for (std::size_t i = 0; i < n; ++i) out[i] = dataset[i];

  parallel_for(n * t, jobs, [&](std::size_t k) {
    const std::size_t spec_index = k / n;
    const std::size_t image_index = k % n;
    out[n + k] = apply_noise(dataset[image_index], plan.specs[spec_index]);
  });

  std::vector<std::string> stems;
  stems.reserve(out.size());
  for (const auto& img : out) stems.push_back(img.stem());
  std::vector<std::size_t> order(out.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return stems[a] < stems[b]; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (stems[order[i]] == stems[order[i - 1]]) {
      throw ValidationError("duplicate output image id '" + stems[order[i]] + "'");
    }
  }

  std::vector<Image> sorted;
  sorted.reserve(out.size());
  for (auto i : order) sorted.push_back(std::move(out[i]));
  return sorted;
}

/// Noise kinds of a named configuration: a single kind, or one of the
/// combined presets `poisson+gaussian`, `poisson+laplace`,
/// `laplace+gaussian` and `all`.
inline std::vector<NoiseKind> preset_kinds(std::string_view name) {
  if (name == "all") return {NoiseKind::poisson, NoiseKind::gaussian, NoiseKind::laplace};
  std::vector<NoiseKind> kinds;
  std::size_t start = 0;
  for (;;) {
    auto pos = name.find('+', start);
    kinds.push_back(parse_noise_kind(name.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  std::set<NoiseKind> distinct(kinds.begin(), kinds.end());
  if (distinct.size() != kinds.size()) {
    throw ValidationError("noise configuration '" + std::string(name) + "' repeats a kind");
  }
  return kinds;
}

inline double parse_ratio(std::string_view text) {
  double v = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw ValidationError("invalid noise ratio '" + std::string(text) + "'");
  }
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("noise ratio must be in [0, 1], got '" + std::string(text) + "'");
  return v;
}

/// Parses `kind:ratio` (for example `gaussian:0.2`). Combined presets expand
/// to one spec per kind.
inline std::vector<AugmentationSpec> parse_noise_arg(std::string_view arg, std::uint64_t seed,
                                                     ChannelMask channels = ChannelMask{kAllChannels}) {
  auto colon = arg.rfind(':');
  if (colon == std::string_view::npos) {
    throw ValidationError("noise argument must look like kind:ratio, got '" + std::string(arg) + "'");
  }
  const double ratio = parse_ratio(arg.substr(colon + 1));
  std::vector<AugmentationSpec> specs;
  for (auto kind : preset_kinds(arg.substr(0, colon))) specs.push_back({kind, ratio, seed, channels});
  return specs;
}

/// Parses a channel list such as `0,1,2` or `0,1`.
inline ChannelMask parse_channels(std::string_view text) {
  ChannelMask mask;
  std::size_t start = 0;
  for (;;) {
    auto pos = text.find(',', start);
    auto part = text.substr(start, pos == std::string_view::npos ? pos : pos - start);
    if (part.size() != 1 || part[0] < '0' || part[0] > '2') {
      throw ValidationError("invalid channel '" + std::string(part) + "' (expected 0, 1 or 2)");
    }
    mask.set(static_cast<std::size_t>(part[0] - '0'));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return mask;
}

}  // namespace binviz
