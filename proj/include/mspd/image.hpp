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
#ifndef MSPD_IMAGE_HPP
#define MSPD_IMAGE_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "mspd/pattern.hpp"

namespace mspd {

// Ground-truth or reconstructed multispectral polarization image:
// height x width x wavelengths x 4 polarization angles, stored as
// [angle][wavelength][row][column] planes (the cube file's buffer order).
class ImageCube {
 public:
  ImageCube() = default;

  ImageCube(std::int64_t height, std::int64_t width, std::vector<double> wavelengths_nm,
            double scale = 1.0)
      : height_(height), width_(width), scale_(scale), wavelengths_(std::move(wavelengths_nm)) {
    require(height_ > 0 && width_ > 0, "cube: extents must be positive, got ", height_, "x",
            width_);
    require(!wavelengths_.empty(), "cube: wavelength list is empty");
    for (std::size_t i = 1; i < wavelengths_.size(); ++i)
      require(wavelengths_[i] > wavelengths_[i - 1],
              "cube: wavelength list must be strictly increasing (", wavelengths_[i - 1],
              " then ", wavelengths_[i], ")");
    values_.assign(static_cast<std::size_t>(height_ * width_ * num_wavelengths() * kNumAngles),
                   0.0);
  }

  std::int64_t height() const { return height_; }
  std::int64_t width() const { return width_; }
  std::int64_t num_wavelengths() const { return static_cast<std::int64_t>(wavelengths_.size()); }
  const std::vector<double>& wavelengths() const { return wavelengths_; }
  double scale() const { return scale_; }

  double& at(std::int64_t y, std::int64_t x, std::int64_t lam, std::int64_t ang) {
    return values_[((ang * num_wavelengths() + lam) * height_ + y) * width_ + x];
  }
  double at(std::int64_t y, std::int64_t x, std::int64_t lam, std::int64_t ang) const {
    return values_[((ang * num_wavelengths() + lam) * height_ + y) * width_ + x];
  }

  double* plane(std::int64_t ang, std::int64_t lam) {
    return values_.data() + (ang * num_wavelengths() + lam) * height_ * width_;
  }
  const double* plane(std::int64_t ang, std::int64_t lam) const {
    return values_.data() + (ang * num_wavelengths() + lam) * height_ * width_;
  }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  // ground-truth invariants; reconstructions may legitimately violate them
  void check_intensities() const {
    for (double v : values_)
      if (!std::isfinite(v) || v < 0.0)
        fail("cube: intensity ", v, " is not a finite non-negative value");
  }

  ImageCube center_crop_to_multiple(std::int64_t mult_h, std::int64_t mult_w) const {
    const std::int64_t ch = (height_ / mult_h) * mult_h;
    const std::int64_t cw = (width_ / mult_w) * mult_w;
    require(ch > 0 && cw > 0, "cube: ", height_, "x", width_,
            " too small to crop to a multiple of ", mult_h, "x", mult_w);
    if (ch == height_ && cw == width_) return *this;
    const std::int64_t y0 = (height_ - ch) / 2, x0 = (width_ - cw) / 2;
    ImageCube out(ch, cw, wavelengths_, scale_);
    for (std::int64_t a = 0; a < kNumAngles; ++a)
      for (std::int64_t l = 0; l < num_wavelengths(); ++l)
        for (std::int64_t y = 0; y < ch; ++y)
          for (std::int64_t x = 0; x < cw; ++x)
            out.at(y, x, l, a) = at(y0 + y, x0 + x, l, a);
    return out;
  }

  ImageCube crop(std::int64_t y0, std::int64_t x0, std::int64_t h, std::int64_t w) const {
    require(y0 >= 0 && x0 >= 0 && y0 + h <= height_ && x0 + w <= width_, "cube: crop (", y0, ",",
            x0, ")+", h, "x", w, " exceeds ", height_, "x", width_);
    ImageCube out(h, w, wavelengths_, scale_);
    for (std::int64_t a = 0; a < kNumAngles; ++a)
      for (std::int64_t l = 0; l < num_wavelengths(); ++l)
        for (std::int64_t y = 0; y < h; ++y)
          for (std::int64_t x = 0; x < w; ++x) out.at(y, x, l, a) = at(y0 + y, x0 + x, l, a);
    return out;
  }

 private:
  std::int64_t height_ = 0;
  std::int64_t width_ = 0;
  double scale_ = 1.0;  // quantization ceiling of the source data (4095 for 12-bit)
  std::vector<double> wavelengths_;
  std::vector<double> values_;
};

// Single-plane sensor observation through a pattern.
class MosaicImage {
 public:
  MosaicImage() = default;

  MosaicImage(std::int64_t height, std::int64_t width, PatternSpec pattern)
      : height_(height), width_(width), pattern_(std::move(pattern)) {
    pattern_.check_structure();
    require(height_ > 0 && width_ > 0, "mosaic: extents must be positive");
    require(height_ % pattern_.period_h == 0 && width_ % pattern_.period_w == 0, "mosaic: ",
            height_, "x", width_, " is not a multiple of the tile ", pattern_.period_h, "x",
            pattern_.period_w);
    values_.assign(static_cast<std::size_t>(height_ * width_), 0.0);
  }

  std::int64_t height() const { return height_; }
  std::int64_t width() const { return width_; }
  const PatternSpec& pattern() const { return pattern_; }

  double& at(std::int64_t y, std::int64_t x) { return values_[y * width_ + x]; }
  double at(std::int64_t y, std::int64_t x) const { return values_[y * width_ + x]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::int64_t height_ = 0;
  std::int64_t width_ = 0;
  std::vector<double> values_;
  PatternSpec pattern_;
};

// Per-polarization volume holding the observed samples at their positions
// and zeros elsewhere, plus the observation mask.
struct SparseImage {
  int angle = 0;
  std::int64_t height = 0;
  std::int64_t width = 0;
  std::int64_t num_wavelengths = 0;
  std::vector<double> values;        // [wavelength][row][column]
  std::vector<std::uint8_t> mask;    // 1 where observed

  double at(std::int64_t lam, std::int64_t y, std::int64_t x) const {
    return values[(lam * height + y) * width + x];
  }
  bool observed(std::int64_t lam, std::int64_t y, std::int64_t x) const {
    return mask[(lam * height + y) * width + x] != 0;
  }
};

// Band-pass sampling: each pixel keeps exactly the one (wavelength, angle)
// component its filter cell passes.
inline MosaicImage mosaic(const ImageCube& cube, const PatternSpec& pattern) {
  require(pattern.num_wavelengths == cube.num_wavelengths(), "mosaic: pattern has ",
          pattern.num_wavelengths, " wavelengths, cube has ", cube.num_wavelengths());
  MosaicImage out(cube.height(), cube.width(), pattern);
  for (std::int64_t y = 0; y < cube.height(); ++y)
    for (std::int64_t x = 0; x < cube.width(); ++x) {
      const auto& cell = pattern.sample(y, x);
      out.at(y, x) = cube.at(y, x, cell.wavelength, cell.angle);
    }
  return out;
}

inline SparseImage extract_sparse(const MosaicImage& y, int angle) {
  require(angle >= 0 && angle < kNumAngles, "extract_sparse: angle index ", angle,
          " out of [0,", kNumAngles, ")");
  const auto& p = y.pattern();
  SparseImage s;
  s.angle = angle;
  s.height = y.height();
  s.width = y.width();
  s.num_wavelengths = p.num_wavelengths;
  s.values.assign(static_cast<std::size_t>(s.num_wavelengths * s.height * s.width), 0.0);
  s.mask.assign(s.values.size(), 0);
  for (std::int64_t yy = 0; yy < s.height; ++yy)
    for (std::int64_t xx = 0; xx < s.width; ++xx) {
      const auto& cell = p.sample(yy, xx);
      if (cell.angle != angle) continue;
      const std::size_t idx = (cell.wavelength * s.height + yy) * s.width + xx;
      s.values[idx] = y.at(yy, xx);
      s.mask[idx] = 1;
    }
  return s;
}

// ---------------------------------------------------------------------------
// file formats (.mpc cube, .mpm mosaic) - text header + raw LE buffer
// ---------------------------------------------------------------------------

namespace detail {

inline void expect_data_marker(std::istream& is, const std::string& origin) {
  std::string word;
  is >> word;
  if (word != "DATA") fail("file: missing DATA marker in ", origin, " (got '", word, "')");
  is.get();  // newline before the binary payload
}

inline void write_doubles(std::ostream& os, const std::vector<double>& v, bool as_float32) {
  if (as_float32) {
    std::vector<float> f(v.begin(), v.end());
    os.write(reinterpret_cast<const char*>(f.data()),
             static_cast<std::streamsize>(f.size() * sizeof(float)));
  } else {
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
}

inline void read_doubles(std::istream& is, std::vector<double>& v, bool as_float32,
                         const std::string& origin) {
  if (as_float32) {
    std::vector<float> f(v.size());
    is.read(reinterpret_cast<char*>(f.data()),
            static_cast<std::streamsize>(f.size() * sizeof(float)));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f[i];
  } else {
    is.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
  }
  if (!is) fail("file: truncated payload in ", origin);
}

}  // namespace detail

inline void write_cube(const std::string& path, const ImageCube& cube,
                       bool as_float32 = false) {
  require_little_endian();
  std::ofstream os(path, std::ios::binary);
  if (!os) fail("cube: cannot open ", path, " for writing");
  os << "MSPD-CUBE 1\n";
  os << "size " << cube.height() << " " << cube.width() << "\n";
  os << "wavelengths_nm";
  for (double nm : cube.wavelengths()) os << " " << nm;
  os << "\n";
  os << "angles_deg";
  for (double a : kAngleDegrees) os << " " << a;
  os << "\n";
  os << "dtype " << (as_float32 ? "float32" : "float64") << "\n";
  os << "scale " << cube.scale() << "\n";
  os << "DATA\n";
  detail::write_doubles(os, cube.values(), as_float32);
  if (!os) fail("cube: short write to ", path);
}

inline ImageCube read_cube(const std::string& path) {
  require_little_endian();
  std::ifstream is(path, std::ios::binary);
  if (!is) fail("cube: cannot open ", path);
  std::string line, word;
  std::getline(is, line);
  if (line != "MSPD-CUBE 1") fail("cube: bad magic in ", path, ": '", line, "'");

  std::int64_t m = 0, n = 0;
  std::vector<double> wavelengths;
  std::string dtype = "float64";
  double scale = 1.0;
  while (is >> word) {
    if (word == "size") {
      is >> m >> n;
    } else if (word == "wavelengths_nm") {
      // wavelength tokens run to end of line
      std::getline(is, line);
      std::istringstream ls(line);
      double nm;
      while (ls >> nm) wavelengths.push_back(nm);
    } else if (word == "angles_deg") {
      for (int a = 0; a < kNumAngles; ++a) {
        double deg;
        is >> deg;
        require(deg == kAngleDegrees[a], "cube: unsupported angle list in ", path);
      }
    } else if (word == "dtype") {
      is >> dtype;
      require(dtype == "float64" || dtype == "float32", "cube: unsupported dtype ", dtype,
              " in ", path);
    } else if (word == "scale") {
      is >> scale;
    } else if (word == "DATA") {
      break;
    } else {
      fail("cube: unknown field '", word, "' in ", path);
    }
  }
  if (word != "DATA") fail("cube: missing DATA marker in ", path);
  is.get();

  ImageCube cube(m, n, wavelengths, scale);
  detail::read_doubles(is, cube.values(), dtype == "float32", path);
  return cube;
}

inline void write_mosaic(const std::string& path, const MosaicImage& y,
                         bool as_float32 = false) {
  require_little_endian();
  std::ofstream os(path, std::ios::binary);
  if (!os) fail("mosaic: cannot open ", path, " for writing");
  os << "MSPD-MOSAIC 1\n";
  os << "size " << y.height() << " " << y.width() << "\n";
  os << "dtype " << (as_float32 ? "float32" : "float64") << "\n";
  os << y.pattern().serialize();
  os << "DATA\n";
  detail::write_doubles(os, y.values(), as_float32);
  if (!os) fail("mosaic: short write to ", path);
}

inline MosaicImage read_mosaic(const std::string& path) {
  require_little_endian();
  std::ifstream is(path, std::ios::binary);
  if (!is) fail("mosaic: cannot open ", path);
  std::string line, word;
  std::getline(is, line);
  if (line != "MSPD-MOSAIC 1") fail("mosaic: bad magic in ", path, ": '", line, "'");
  std::int64_t m = 0, n = 0;
  std::string dtype = "float64";
  is >> word >> m >> n;
  if (word != "size") fail("mosaic: malformed header in ", path);
  is >> word >> dtype;
  if (word != "dtype" || (dtype != "float64" && dtype != "float32"))
    fail("mosaic: malformed dtype in ", path);
  is.get();  // newline before the embedded pattern

  PatternSpec p = PatternSpec::parse(is, path);
  detail::expect_data_marker(is, path);
  MosaicImage y(m, n, std::move(p));
  detail::read_doubles(is, y.values(), dtype == "float32", path);
  return y;
}

}  // namespace mspd

#endif  // MSPD_IMAGE_HPP
