// binviz - binary-to-image conversion and noise augmentation pipeline
// Sliding-window Shannon entropy mapped to 8-bit intensities

#pragma once

#include <binviz/error.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace binviz {

/// Byte histogram used by the entropy routines.
using ByteHistogram = std::array<std::uint32_t, 256>;

/**
 * Shannon entropy in bits of a byte histogram holding `total` samples.
 *
 * This is the reference evaluation: bins are visited in byte order and
 * H = -sum p*log2(p). Every entropy intensity in binviz is either computed
 * through this function or provably rounds to the same value.
 */
inline double shannon_entropy(const ByteHistogram& hist, std::size_t total) {
  if (total == 0) return 0.0;
  const double n = static_cast<double>(total);
  double h = 0.0;
  for (std::uint32_t c : hist) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

inline double shannon_entropy(std::span<const std::uint8_t> data) {
  ByteHistogram hist{};
  for (auto b : data) ++hist[b];
  return shannon_entropy(hist, data.size());
}

/// Linear map [0, 8] bits -> [0, 255], rounded half-up and clamped.
inline std::uint8_t entropy_to_intensity(double bits) {
  const double v = std::floor(bits * 255.0 / 8.0 + 0.5);
  return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

/// Bounds of the trailing window ending at j: [max(0, j-W+1), j].
inline std::size_t window_start(std::size_t j, std::size_t window) {
  return j + 1 >= window ? j + 1 - window : 0;
}

inline void check_window(std::size_t window) {
  if (window < 2) throw ValidationError("entropy window must be >= 2, got " + std::to_string(window));
}

/// Decimal value of byte j.
inline std::uint8_t byte_channel(std::span<const std::uint8_t> payload, std::size_t j) {
  if (j >= payload.size()) {
    throw std::out_of_range("byte position " + std::to_string(j) + " outside payload of " +
                            std::to_string(payload.size()) + " bytes");
  }
  return payload[j];
}

/// Entropy intensity at position j, computed directly from the window.
inline std::uint8_t entropy_channel(std::span<const std::uint8_t> payload, std::size_t j,
                                    std::size_t window) {
  check_window(window);
  if (j >= payload.size()) {
    throw std::out_of_range("byte position " + std::to_string(j) + " outside payload of " +
                            std::to_string(payload.size()) + " bytes");
  }
  const std::size_t start = window_start(j, window);
  return entropy_to_intensity(shannon_entropy(payload.subspan(start, j - start + 1)));
}

/**
 * Entropy intensity for every position of the payload in one pass.
 *
 * Keeps a rolling histogram plus the sum S = sum c*log2(c) in 32.32 fixed
 * point, so updates are O(1) and S is exact regardless of update order. The
 * entropy is then log2(n) - S/n. The fixed-point estimate is within ~1e-8 of
 * the reference value, which only matters when the scaled value sits on a
 * rounding tie; there the histogram is re-evaluated with shannon_entropy.
 */
inline std::vector<std::uint8_t> entropy_channel_all(std::span<const std::uint8_t> payload,
                                                     std::size_t window) {
  check_window(window);
  std::vector<std::uint8_t> out(payload.size());
  if (payload.empty()) return out;

  const std::size_t max_n = std::min(window, payload.size());
  if (max_n > (std::size_t{1} << 24)) throw ValidationError("entropy window too large");

  constexpr double kScale = 4294967296.0;  // 2^32
  std::vector<std::int64_t> clog(max_n + 1);
  std::vector<double> log2n(max_n + 1, 0.0);
  for (std::size_t c = 1; c <= max_n; ++c) {
    const double cd = static_cast<double>(c);
    clog[c] = std::llround(cd * std::log2(cd) * kScale);
    log2n[c] = std::log2(cd);
  }

  ByteHistogram hist{};
  std::int64_t sum_clog = 0;
  auto bump = [&](std::uint8_t b, int delta) {
    auto& c = hist[b];
    sum_clog -= clog[c];
    c = static_cast<std::uint32_t>(static_cast<std::int64_t>(c) + delta);
    sum_clog += clog[c];
  };

  constexpr double kTieGuard = 1e-6;
  for (std::size_t j = 0; j < payload.size(); ++j) {
    if (j >= window) bump(payload[j - window], -1);
    bump(payload[j], +1);
    const std::size_t n = std::min(j + 1, window);

    const double h = log2n[n] - static_cast<double>(sum_clog) / kScale / static_cast<double>(n);
    const double scaled = h * 255.0 / 8.0;
    const double frac = scaled - std::floor(scaled);
    if (std::abs(frac - 0.5) < kTieGuard) {
      out[j] = entropy_to_intensity(shannon_entropy(hist, n));
    } else {
      out[j] = static_cast<std::uint8_t>(std::clamp(std::floor(scaled + 0.5), 0.0, 255.0));
    }
  }
  return out;
}

}  // namespace binviz
