/*
 * Copyright 2026 the mspd authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef MSPD_PNG_IO_HPP
#define MSPD_PNG_IO_HPP

#include <png.h>

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "mspd/common.hpp"

namespace mspd {

struct GrayImage16 {
  std::int64_t height = 0;
  std::int64_t width = 0;
  int source_bit_depth = 16;           // bit depth declared by the file (8 or 16)
  std::vector<std::uint16_t> pixels;   // row-major
};

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace detail

// Reads an 8- or 16-bit grayscale PNG plane (the dataset importer's unit).
inline GrayImage16 read_png_gray16(const std::string& path) {
  detail::FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) fail("png: cannot open ", path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail("png: out of memory reading ", path);
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail("png: failed to decode ", path);
  }

  png_init_io(png, fp.get());
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA ||
      color == PNG_COLOR_TYPE_PALETTE)
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (depth == 16) png_set_swap(png);  // file is big-endian, we want host order
  png_read_update_info(png, info);
  depth = png_get_bit_depth(png, info);

  GrayImage16 img;
  img.height = png_get_image_height(png, info);
  img.width = png_get_image_width(png, info);
  img.source_bit_depth = depth;
  img.pixels.resize(static_cast<std::size_t>(img.height * img.width));

  std::vector<std::uint8_t> row(png_get_rowbytes(png, info));
  for (std::int64_t y = 0; y < img.height; ++y) {
    png_read_row(png, row.data(), nullptr);
    if (depth == 16) {
      const auto* p = reinterpret_cast<const std::uint16_t*>(row.data());
      for (std::int64_t x = 0; x < img.width; ++x) img.pixels[y * img.width + x] = p[x];
    } else {
      for (std::int64_t x = 0; x < img.width; ++x) img.pixels[y * img.width + x] = row[x];
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

namespace detail {

inline void write_png(const std::string& path, std::int64_t height, std::int64_t width,
                      int bit_depth, int color_type, const std::uint8_t* bytes,
                      std::size_t row_bytes) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail("png: cannot open ", path, " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    fail("png: out of memory writing ", path);
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail("png: failed to encode ", path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);
  for (std::int64_t y = 0; y < height; ++y)
    png_write_row(png, const_cast<png_bytep>(bytes + y * row_bytes));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace detail

inline void write_png_gray16(const std::string& path, std::int64_t height, std::int64_t width,
                             const std::vector<std::uint16_t>& pixels) {
  require(pixels.size() == static_cast<std::size_t>(height * width), "png: pixel count ",
          pixels.size(), " != ", height, "x", width);
  detail::write_png(path, height, width, 16, PNG_COLOR_TYPE_GRAY,
                    reinterpret_cast<const std::uint8_t*>(pixels.data()),
                    static_cast<std::size_t>(width) * 2);
}

inline void write_png_gray8(const std::string& path, std::int64_t height, std::int64_t width,
                            const std::vector<std::uint8_t>& pixels) {
  require(pixels.size() == static_cast<std::size_t>(height * width), "png: pixel count ",
          pixels.size(), " != ", height, "x", width);
  detail::write_png(path, height, width, 8, PNG_COLOR_TYPE_GRAY, pixels.data(),
                    static_cast<std::size_t>(width));
}

// interleaved RGB, 3 bytes per pixel
inline void write_png_rgb8(const std::string& path, std::int64_t height, std::int64_t width,
                           const std::vector<std::uint8_t>& pixels) {
  require(pixels.size() == static_cast<std::size_t>(height * width * 3), "png: byte count ",
          pixels.size(), " != ", height, "x", width, "x3");
  detail::write_png(path, height, width, 8, PNG_COLOR_TYPE_RGB, pixels.data(),
                    static_cast<std::size_t>(width) * 3);
}

}  // namespace mspd

#endif  // MSPD_PNG_IO_HPP
