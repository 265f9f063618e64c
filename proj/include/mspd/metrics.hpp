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
#ifndef MSPD_METRICS_HPP
#define MSPD_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "mspd/image.hpp"

namespace mspd {

// ---------------------------------------------------------------------------
// Stokes parameters and DoLP
// ---------------------------------------------------------------------------

// s0 = (I0 + I45 + I90 + I135) / 2, s1 = I0 - I90, s2 = I45 - I135
struct StokesCube {
  std::int64_t height = 0, width = 0, num_wavelengths = 0;
  std::vector<double> s0, s1, s2;  // [wavelength][row][col]

  double at_s0(std::int64_t lam, std::int64_t y, std::int64_t x) const {
    return s0[(lam * height + y) * width + x];
  }
};

inline StokesCube stokes(const ImageCube& cube) {
  StokesCube s;
  s.height = cube.height();
  s.width = cube.width();
  s.num_wavelengths = cube.num_wavelengths();
  const std::size_t plane = static_cast<std::size_t>(s.height * s.width);
  s.s0.resize(plane * s.num_wavelengths);
  s.s1.resize(plane * s.num_wavelengths);
  s.s2.resize(plane * s.num_wavelengths);
  for (std::int64_t lam = 0; lam < s.num_wavelengths; ++lam) {
    const double* i0 = cube.plane(0, lam);
    const double* i45 = cube.plane(1, lam);
    const double* i90 = cube.plane(2, lam);
    const double* i135 = cube.plane(3, lam);
    double* p0 = s.s0.data() + lam * plane;
    double* p1 = s.s1.data() + lam * plane;
    double* p2 = s.s2.data() + lam * plane;
    for (std::size_t i = 0; i < plane; ++i) {
      p0[i] = (i0[i] + i45[i] + i90[i] + i135[i]) / 2.0;
      p1[i] = i0[i] - i90[i];
      p2[i] = i45[i] - i135[i];
    }
  }
  return s;
}

// DoLP = sqrt(s1^2 + s2^2) / s0, defined as 0 where s0 < epsilon. Values are
// deliberately not clipped to [0,1]: reconstructions may exceed the physical
// range and clipping would hide that error.
inline std::vector<double> dolp(const StokesCube& s, double epsilon = 1e-8) {
  std::vector<double> out(s.s0.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = s.s0[i] < epsilon ? 0.0
                               : std::sqrt(s.s1[i] * s.s1[i] + s.s2[i] * s.s2[i]) / s.s0[i];
  return out;
}

// ---------------------------------------------------------------------------
// PSNR
// ---------------------------------------------------------------------------

// 10*log10(peak^2 / MSE) with the MSE pooled over everything; identical
// inputs return +infinity.
inline double psnr(const std::vector<double>& a, const std::vector<double>& b, double peak) {
  require(a.size() == b.size(), "psnr: size mismatch ", a.size(), " vs ", b.size());
  require(!a.empty(), "psnr: empty input");
  require(peak > 0.0, "psnr: peak must be positive, got ", peak);
  double mse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

enum class PsnrMode {
  Pooled,          // one MSE over all wavelengths and polarizations (default)
  PerChannelMean,  // PSNR per (wavelength, angle), then the arithmetic mean
};

inline double cube_psnr(const ImageCube& pred, const ImageCube& truth, double peak = 1.0,
                        PsnrMode mode = PsnrMode::Pooled) {
  require(pred.height() == truth.height() && pred.width() == truth.width() &&
              pred.num_wavelengths() == truth.num_wavelengths(),
          "psnr: cube shapes differ");
  if (mode == PsnrMode::Pooled) return psnr(pred.values(), truth.values(), peak);
  const std::size_t plane = static_cast<std::size_t>(pred.height() * pred.width());
  double acc = 0.0;
  for (std::int64_t ang = 0; ang < kNumAngles; ++ang)
    for (std::int64_t lam = 0; lam < pred.num_wavelengths(); ++lam) {
      std::vector<double> a(pred.plane(ang, lam), pred.plane(ang, lam) + plane);
      std::vector<double> b(truth.plane(ang, lam), truth.plane(ang, lam) + plane);
      acc += psnr(a, b, peak);
    }
  return acc / static_cast<double>(kNumAngles * pred.num_wavelengths());
}

// DoLP lies in [0,1] for physically consistent intensities, so its PSNR uses
// peak 1.
inline double dolp_psnr(const ImageCube& pred, const ImageCube& truth) {
  return psnr(dolp(stokes(pred)), dolp(stokes(truth)), 1.0);
}

// ---------------------------------------------------------------------------
// spectral reflectance RMSE
// ---------------------------------------------------------------------------

// reflectance = s0 / white(lambda); one RMSE over all pixels per wavelength
inline std::vector<double> reflectance_rmse(const StokesCube& pred_s0,
                                            const StokesCube& truth_s0,
                                            const std::vector<double>& white) {
  require(pred_s0.num_wavelengths == truth_s0.num_wavelengths &&
              pred_s0.height == truth_s0.height && pred_s0.width == truth_s0.width,
          "reflectance: Stokes shapes differ");
  require(static_cast<std::int64_t>(white.size()) == pred_s0.num_wavelengths,
          "reflectance: white reference has ", white.size(), " entries, expected ",
          pred_s0.num_wavelengths);
  for (double w : white)
    require(w > 0.0, "reflectance: white reference must be strictly positive, got ", w);

  const std::size_t plane = static_cast<std::size_t>(pred_s0.height * pred_s0.width);
  std::vector<double> out(pred_s0.num_wavelengths);
  for (std::int64_t lam = 0; lam < pred_s0.num_wavelengths; ++lam) {
    double acc = 0.0;
    for (std::size_t i = 0; i < plane; ++i) {
      const double d = (pred_s0.s0[lam * plane + i] - truth_s0.s0[lam * plane + i]) / white[lam];
      acc += d * d;
    }
    out[lam] = std::sqrt(acc / static_cast<double>(plane));
  }
  return out;
}

// per-wavelength max of S0 over a patch (the whole image when h or w is 0)
inline std::vector<double> white_reference(const StokesCube& s, std::int64_t y0 = 0,
                                           std::int64_t x0 = 0, std::int64_t h = 0,
                                           std::int64_t w = 0) {
  if (h <= 0 || w <= 0) {
    y0 = x0 = 0;
    h = s.height;
    w = s.width;
  }
  require(y0 >= 0 && x0 >= 0 && y0 + h <= s.height && x0 + w <= s.width,
          "white reference: patch exceeds image extents");
  std::vector<double> out(s.num_wavelengths, 0.0);
  for (std::int64_t lam = 0; lam < s.num_wavelengths; ++lam)
    for (std::int64_t y = y0; y < y0 + h; ++y)
      for (std::int64_t x = x0; x < x0 + w; ++x)
        out[lam] = std::max(out[lam], s.at_s0(lam, y, x));
  return out;
}

// ---------------------------------------------------------------------------
// RGB rendering for report figures
// ---------------------------------------------------------------------------

// Fixed Gaussian color-matching weights (centers 610/550/465 nm, widths
// 45/40/35 nm), normalized to sum to 1 per channel over the cube's
// wavelength list; the weighted sums are clipped to [0,1].
inline std::vector<double> render_rgb(const ImageCube& cube, int angle) {
  require(angle >= 0 && angle < kNumAngles, "render: angle index ", angle, " out of range");
  const auto& nm = cube.wavelengths();
  require(nm.front() <= 500.0 && nm.back() >= 600.0,
          "render: wavelength list ", nm.front(), "-", nm.back(),
          " nm does not cover the visible weighting range");

  constexpr double centers[3] = {610.0, 550.0, 465.0};
  constexpr double widths[3] = {45.0, 40.0, 35.0};
  const std::int64_t c = cube.num_wavelengths();
  std::vector<double> weights(3 * c);
  for (int ch = 0; ch < 3; ++ch) {
    double total = 0.0;
    for (std::int64_t l = 0; l < c; ++l) {
      const double z = (nm[l] - centers[ch]) / widths[ch];
      weights[ch * c + l] = std::exp(-0.5 * z * z);
      total += weights[ch * c + l];
    }
    for (std::int64_t l = 0; l < c; ++l) weights[ch * c + l] /= total;
  }

  const std::size_t plane = static_cast<std::size_t>(cube.height() * cube.width());
  std::vector<double> rgb(plane * 3, 0.0);
  for (int ch = 0; ch < 3; ++ch)
    for (std::int64_t l = 0; l < c; ++l) {
      const double w = weights[ch * c + l];
      const double* pl = cube.plane(angle, l);
      for (std::size_t i = 0; i < plane; ++i) rgb[i * 3 + ch] += w * pl[i];
    }
  for (double& v : rgb) v = std::clamp(v, 0.0, 1.0);
  return rgb;
}

// ---------------------------------------------------------------------------
// report structures
// ---------------------------------------------------------------------------

struct SceneMetrics {
  std::string scene;
  double mspi_psnr = 0.0;
  double dolp_psnr = 0.0;
};

struct MethodReport {
  std::string method;
  std::vector<SceneMetrics> scenes;

  double average_mspi() const {
    double acc = 0.0;
    for (const auto& s : scenes) acc += s.mspi_psnr;
    return scenes.empty() ? 0.0 : acc / static_cast<double>(scenes.size());
  }
  double average_dolp() const {
    double acc = 0.0;
    for (const auto& s : scenes) acc += s.dolp_psnr;
    return scenes.empty() ? 0.0 : acc / static_cast<double>(scenes.size());
  }
};

// Method x scene x {MSPI, DoLP} table with trailing averages, the layout of
// the comparison tables this project reports.
struct MetricsReport {
  std::vector<MethodReport> methods;

  void write_csv(std::ostream& os) const {
    require(!methods.empty(), "report: no methods");
    const auto& scenes = methods.front().scenes;
    os << "method";
    for (const auto& s : scenes) os << "," << s.scene << "_mspi," << s.scene << "_dolp";
    os << ",average_mspi,average_dolp\n";
    char buf[64];
    auto put = [&](double v) {
      std::snprintf(buf, sizeof buf, "%.4f", v);
      os << "," << buf;
    };
    for (const auto& m : methods) {
      require(m.scenes.size() == scenes.size(), "report: method ", m.method, " covers ",
              m.scenes.size(), " scenes, expected ", scenes.size());
      os << m.method;
      for (std::size_t i = 0; i < scenes.size(); ++i) {
        require(m.scenes[i].scene == scenes[i].scene, "report: scene order mismatch for ",
                m.method);
        put(m.scenes[i].mspi_psnr);
        put(m.scenes[i].dolp_psnr);
      }
      put(m.average_mspi());
      put(m.average_dolp());
      os << "\n";
    }
  }

  void save_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) fail("report: cannot open ", path, " for writing");
    write_csv(os);
  }
};

// Parses a CSV written by MetricsReport::write_csv (averages are
// recomputed, not read). Used to merge runs and externally supplied rows
// into one comparison table.
inline MetricsReport load_report_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail("report: cannot open ", path);
  std::string line;
  if (!std::getline(is, line)) fail("report: empty file ", path);

  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
      const auto comma = s.find(',', start);
      out.push_back(s.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  };

  const auto header = split(line);
  require(header.size() >= 5 && header[0] == "method" &&
              header[header.size() - 2] == "average_mspi" && header.back() == "average_dolp",
          "report: unrecognized header in ", path);
  std::vector<std::string> scenes;
  for (std::size_t i = 1; i + 2 < header.size(); i += 2) {
    const auto& h = header[i];
    require(h.size() > 5 && h.substr(h.size() - 5) == "_mspi", "report: bad column '", h,
            "' in ", path);
    scenes.push_back(h.substr(0, h.size() - 5));
  }

  MetricsReport report;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    require(cells.size() == header.size(), "report: row with ", cells.size(), " cells in ",
            path, ", expected ", header.size());
    MethodReport m;
    m.method = cells[0];
    for (std::size_t s = 0; s < scenes.size(); ++s)
      m.scenes.push_back({scenes[s], std::stod(cells[1 + 2 * s]), std::stod(cells[2 + 2 * s])});
    report.methods.push_back(std::move(m));
  }
  return report;
}

// wavelength x method reflectance-RMSE table
struct ReflectanceReport {
  std::vector<double> wavelengths_nm;
  std::vector<std::pair<std::string, std::vector<double>>> methods;  // name -> per-wavelength

  void write_csv(std::ostream& os) const {
    os << "wavelength_nm";
    for (const auto& [name, _] : methods) os << "," << name;
    os << "\n";
    for (std::size_t l = 0; l < wavelengths_nm.size(); ++l) {
      os << wavelengths_nm[l];
      for (const auto& [name, rmse] : methods) {
        require(rmse.size() == wavelengths_nm.size(), "report: method ", name, " has ",
                rmse.size(), " rmse entries, expected ", wavelengths_nm.size());
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", rmse[l]);
        os << "," << buf;
      }
      os << "\n";
    }
  }

  void save_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) fail("report: cannot open ", path, " for writing");
    write_csv(os);
  }
};

}  // namespace mspd

#endif  // MSPD_METRICS_HPP
