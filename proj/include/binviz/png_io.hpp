// binviz - binary-to-image conversion and noise augmentation pipeline
// 8-bit RGB PNG encode/decode (libpng simplified API)

#pragma once

#include <binviz/error.hpp>
#include <binviz/image.hpp>

#include <png.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace binviz {

namespace detail {

struct PngImageGuard {
  png_image img;
  PngImageGuard() {
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
  }
  ~PngImageGuard() { png_image_free(&img); }
  PngImageGuard(const PngImageGuard&) = delete;
  PngImageGuard& operator=(const PngImageGuard&) = delete;
};

inline void check_encodable(const Image& image) {
  if (image.width == 0 || image.height == 0) throw ValidationError("cannot encode an empty image");
  if (image.width > 0x7fffffff || image.height > 0x7fffffff) throw ValidationError("image too large for PNG");
  if (image.pixels.size() != image.width * image.height * kChannels) {
    throw ValidationError("pixel buffer size does not match image dimensions");
  }
}

}  // namespace detail

/// Encodes an image as an 8-bit RGB PNG in memory.
inline std::vector<std::uint8_t> encode_png_bytes(const Image& image) {
  detail::check_encodable(image);
  detail::PngImageGuard guard;
  guard.img.width = static_cast<png_uint_32>(image.width);
  guard.img.height = static_cast<png_uint_32>(image.height);
  guard.img.format = PNG_FORMAT_RGB;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&guard.img, nullptr, &size, 0, image.pixels.data(), 0, nullptr)) {
    throw Error(std::string("PNG encode failed: ") + guard.img.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&guard.img, out.data(), &size, 0, image.pixels.data(), 0, nullptr)) {
    throw Error(std::string("PNG encode failed: ") + guard.img.message);
  }
  out.resize(size);
  return out;
}

/// Writes an image to `path` as an 8-bit RGB PNG.
inline void encode_png(const Image& image, const std::filesystem::path& path) {
  const auto bytes = encode_png_bytes(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open PNG for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(path, "PNG write failed");
}

/// Decodes PNG bytes to RGB (other color types are converted).
inline Image decode_png_bytes(std::span<const std::uint8_t> bytes) {
  detail::PngImageGuard guard;
  if (!png_image_begin_read_from_memory(&guard.img, bytes.data(), bytes.size())) {
    throw Error(std::string("PNG decode failed: ") + guard.img.message);
  }
  guard.img.format = PNG_FORMAT_RGB;
  Image image(guard.img.width, guard.img.height);
  if (!png_image_finish_read(&guard.img, nullptr, image.pixels.data(), 0, nullptr)) {
    throw Error(std::string("PNG decode failed: ") + guard.img.message);
  }
  return image;
}

inline Image decode_png(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open PNG");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_png_bytes(bytes);
  } catch (const Error& e) {
    throw IoError(path, e.what());
  }
}

}  // namespace binviz
