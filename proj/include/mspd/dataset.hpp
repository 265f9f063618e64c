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
#ifndef MSPD_DATASET_HPP
#define MSPD_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <regex>
#include <string>
#include <vector>

#include <json.hpp>

#include "mspd/image.hpp"
#include "mspd/png_io.hpp"

namespace mspd {

// ---------------------------------------------------------------------------
// scene import
// ---------------------------------------------------------------------------

// Scene directories hold one 16-bit grayscale PNG per (wavelength, angle)
// plane, named like `500nm_45deg.png`. 12-bit captures stored in 16-bit
// files normalize by 1/4095.
inline ImageCube import_scene_pngs(const std::string& dir, int bit_depth = 12) {
  namespace fs = std::filesystem;
  require(bit_depth > 0 && bit_depth <= 16, "ingest: bit depth ", bit_depth, " out of range");
  static const std::regex plane_name(R"((\d+(?:\.\d+)?)nm_(\d+)deg\.png)");

  std::map<double, std::map<int, std::string>> planes;  // nm -> angle deg -> path
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (!std::regex_match(name, m, plane_name)) continue;
    planes[std::stod(m[1])][std::stoi(m[2])] = entry.path().string();
  }
  if (planes.empty())
    fail("ingest: no plane files matching '<nm>nm_<deg>deg.png' in ", dir);

  std::vector<double> wavelengths;
  for (const auto& [nm, _] : planes) wavelengths.push_back(nm);

  const int angle_degs[kNumAngles] = {0, 45, 90, 135};
  std::int64_t m = -1, n = -1;
  const double denom = static_cast<double>((1 << bit_depth) - 1);
  ImageCube cube;
  for (std::size_t lam = 0; lam < wavelengths.size(); ++lam) {
    const auto& by_angle = planes[wavelengths[lam]];
    for (int a = 0; a < kNumAngles; ++a) {
      auto it = by_angle.find(angle_degs[a]);
      if (it == by_angle.end())
        fail("ingest: scene ", dir, " is missing plane ", wavelengths[lam], "nm_",
             angle_degs[a], "deg.png");
      auto img = read_png_gray16(it->second);
      if (m < 0) {
        m = img.height;
        n = img.width;
        cube = ImageCube(m, n, wavelengths, denom);
      } else if (img.height != m || img.width != n) {
        fail("ingest: plane ", it->second, " is ", img.height, "x", img.width,
             ", expected ", m, "x", n);
      }
      double* pl = cube.plane(a, static_cast<std::int64_t>(lam));
      for (std::int64_t i = 0; i < m * n; ++i)
        pl[i] = static_cast<double>(img.pixels[i]) / denom;
    }
  }
  cube.check_intensities();
  return cube;
}

// keep the wavelengths start, start+step, ..., up to end (all must exist)
inline ImageCube subset_wavelengths(const ImageCube& cube, double start_nm, double end_nm,
                                    double step_nm) {
  require(step_nm > 0 && end_nm >= start_nm, "ingest: bad wavelength subset ", start_nm, "..",
          end_nm, " step ", step_nm);
  std::vector<std::int64_t> keep;
  std::vector<double> nm;
  for (double target = start_nm; target <= end_nm + 1e-9; target += step_nm) {
    bool found = false;
    for (std::int64_t l = 0; l < cube.num_wavelengths(); ++l)
      if (std::abs(cube.wavelengths()[l] - target) < 1e-6) {
        keep.push_back(l);
        nm.push_back(cube.wavelengths()[l]);
        found = true;
        break;
      }
    if (!found) fail("ingest: requested wavelength ", target, " nm not present in the source");
  }
  ImageCube out(cube.height(), cube.width(), nm, cube.scale());
  for (int a = 0; a < kNumAngles; ++a)
    for (std::size_t l = 0; l < keep.size(); ++l)
      std::copy_n(cube.plane(a, keep[l]), cube.height() * cube.width(),
                  out.plane(a, static_cast<std::int64_t>(l)));
  return out;
}

// ---------------------------------------------------------------------------
// catalog
// ---------------------------------------------------------------------------

struct CatalogEntry {
  std::string name;
  std::string path;  // .mpc cube file
  std::int64_t height = 0, width = 0;
  std::vector<double> wavelengths_nm;
};

struct Catalog {
  std::vector<CatalogEntry> entries;

  const CatalogEntry& find(const std::string& name) const {
    for (const auto& e : entries)
      if (e.name == name) return e;
    fail("catalog: no scene named '", name, "'");
  }

  void save(const std::string& path) const {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : entries)
      j.push_back({{"name", e.name},
                   {"path", e.path},
                   {"height", e.height},
                   {"width", e.width},
                   {"wavelengths_nm", e.wavelengths_nm}});
    std::ofstream os(path);
    if (!os) fail("catalog: cannot open ", path, " for writing");
    os << nlohmann::json{{"scenes", j}}.dump(2) << "\n";
  }

  static Catalog load(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail("catalog: cannot open ", path);
    nlohmann::json j;
    is >> j;
    Catalog c;
    for (const auto& e : j.at("scenes")) {
      CatalogEntry entry;
      entry.name = e.at("name");
      entry.path = e.at("path");
      entry.height = e.at("height");
      entry.width = e.at("width");
      entry.wavelengths_nm = e.at("wavelengths_nm").get<std::vector<double>>();
      c.entries.push_back(std::move(entry));
    }
    return c;
  }
};

struct IngestOptions {
  int bit_depth = 12;
  double subset_start_nm = 0.0;  // 0 = keep the source's wavelength list
  double subset_end_nm = 0.0;
  double subset_step_nm = 0.0;
  bool write_float32 = false;

  bool subsetting() const { return subset_step_nm > 0.0; }
};

struct IngestError {
  std::string scene;
  std::string message;
};

struct IngestResult {
  Catalog catalog;
  std::vector<IngestError> errors;
};

// Walks `root` for scenes: every subdirectory of PNG planes and every .mpc
// cube file becomes one catalog entry under out_dir. Per-scene failures are
// collected, not fatal.
inline IngestResult ingest(const std::string& root, const std::string& out_dir,
                           const IngestOptions& opt = {}) {
  namespace fs = std::filesystem;
  require(fs::exists(root), "ingest: dataset root ", root, " does not exist");
  fs::create_directories(out_dir);

  std::vector<std::pair<std::string, fs::path>> scenes;  // name -> source
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory())
      scenes.emplace_back(entry.path().filename().string(), entry.path());
    else if (entry.path().extension() == ".mpc")
      scenes.emplace_back(entry.path().stem().string(), entry.path());
  }
  std::sort(scenes.begin(), scenes.end());
  if (scenes.empty()) fail("ingest: no scene directories or .mpc files under ", root);

  IngestResult result;
  for (const auto& [name, src] : scenes) {
    try {
      ImageCube cube = fs::is_directory(src) ? import_scene_pngs(src.string(), opt.bit_depth)
                                             : read_cube(src.string());
      if (opt.subsetting())
        cube = subset_wavelengths(cube, opt.subset_start_nm, opt.subset_end_nm,
                                  opt.subset_step_nm);
      const std::string out_path = (fs::path(out_dir) / (name + ".mpc")).string();
      write_cube(out_path, cube, opt.write_float32);
      result.catalog.entries.push_back(
          {name, out_path, cube.height(), cube.width(), cube.wavelengths()});
    } catch (const std::exception& e) {
      result.errors.push_back({name, e.what()});
    }
  }
  result.catalog.save((fs::path(out_dir) / "catalog.json").string());
  return result;
}

// ---------------------------------------------------------------------------
// patch extraction
// ---------------------------------------------------------------------------

struct PatchRef {
  std::string scene;
  std::int64_t y = 0, x = 0;  // relative to the period-cropped scene
};

struct PatchSpec {
  std::int64_t patch_size = 32;
  std::int64_t stride = 32;
  int period_h = 4, period_w = 4;
  std::vector<std::string> train_scenes;
  std::vector<std::string> val_scenes;
  std::uint64_t seed = 0;
};

struct PatchSets {
  std::vector<PatchRef> train;
  std::vector<PatchRef> val;
};

inline std::vector<std::pair<std::int64_t, std::int64_t>> patch_positions(
    std::int64_t scene_h, std::int64_t scene_w, std::int64_t patch, std::int64_t stride) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (std::int64_t y = 0; y + patch <= scene_h; y += stride)
    for (std::int64_t x = 0; x + patch <= scene_w; x += stride) out.emplace_back(y, x);
  return out;
}

// Deterministic period-aligned tiling of each scene, split by scene
// membership, then a seeded shuffle of each set.
inline PatchSets make_patches(const Catalog& catalog, const PatchSpec& spec) {
  require(spec.patch_size > 0 && spec.stride > 0, "patches: size/stride must be positive");
  require(spec.patch_size % spec.period_h == 0 && spec.patch_size % spec.period_w == 0,
          "patches: size ", spec.patch_size, " is not a multiple of the pattern period ",
          spec.period_h, "x", spec.period_w);
  require(spec.stride % spec.period_h == 0 && spec.stride % spec.period_w == 0,
          "patches: stride ", spec.stride, " is not a multiple of the pattern period");
  for (const auto& t : spec.train_scenes)
    for (const auto& v : spec.val_scenes)
      require(t != v, "patches: scene '", t, "' appears in both train and validation sets");

  auto collect = [&](const std::vector<std::string>& names) {
    std::vector<PatchRef> out;
    for (const auto& name : names) {
      const auto& e = catalog.find(name);
      const std::int64_t ch = (e.height / spec.period_h) * spec.period_h;
      const std::int64_t cw = (e.width / spec.period_w) * spec.period_w;
      require(spec.patch_size <= ch && spec.patch_size <= cw, "patches: patch size ",
              spec.patch_size, " exceeds scene '", name, "' cropped extent ", ch, "x", cw);
      for (auto [y, x] : patch_positions(ch, cw, spec.patch_size, spec.stride))
        out.push_back({name, y, x});
    }
    return out;
  };

  PatchSets sets{collect(spec.train_scenes), collect(spec.val_scenes)};
  Rng rng(spec.seed);
  Rng train_rng = rng.fork(1), val_rng = rng.fork(2);
  train_rng.shuffle(sets.train);
  val_rng.shuffle(sets.val);
  return sets;
}

// ---------------------------------------------------------------------------
// synthetic scenes (smoke tests, demos, desk-scale experiments)
// ---------------------------------------------------------------------------

// Smooth physically consistent scene from random low-frequency Stokes
// fields: I_theta = (s0 + s1 cos 2theta + s2 sin 2theta)/2 with the
// polarized part bounded by s0.
inline ImageCube synthetic_scene(std::int64_t m, std::int64_t n, int c, std::uint64_t seed) {
  std::vector<double> nm(c);
  for (int i = 0; i < c; ++i)
    nm[i] = c > 1 ? 420.0 + 300.0 * i / (c - 1) : 550.0;
  ImageCube cube(m, n, nm);
  Rng rng(seed);
  const double tau = 6.283185307179586;

  struct Wave {
    double fy, fx, phase, amp;
  };
  auto waves = [&](int count, double amp) {
    std::vector<Wave> w(count);
    for (auto& wv : w)
      wv = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(0.0, tau),
            amp * rng.uniform(0.5, 1.0) / count};
    return w;
  };
  auto field = [&](const std::vector<Wave>& w, double u, double v) {
    double acc = 0.0;
    for (const auto& wv : w) acc += wv.amp * std::sin(tau * (wv.fy * v + wv.fx * u) + wv.phase);
    return acc;
  };

  for (int lam = 0; lam < c; ++lam) {
    auto base = waves(3, 0.22);
    auto rho_w = waves(2, 0.35);
    auto chi_w = waves(2, 2.0);
    for (std::int64_t y = 0; y < m; ++y)
      for (std::int64_t x = 0; x < n; ++x) {
        const double u = static_cast<double>(x) / n, v = static_cast<double>(y) / m;
        const double s0 = 0.55 + field(base, u, v);
        const double rho = 0.30 + field(rho_w, u, v);  // stays within (0, 0.65)
        const double chi = field(chi_w, u, v);
        const double s1 = rho * s0 * std::cos(chi);
        const double s2 = rho * s0 * std::sin(chi);
        cube.at(y, x, lam, 0) = (s0 + s1) / 2.0;
        cube.at(y, x, lam, 1) = (s0 + s2) / 2.0;
        cube.at(y, x, lam, 2) = (s0 - s1) / 2.0;
        cube.at(y, x, lam, 3) = (s0 - s2) / 2.0;
      }
  }
  cube.check_intensities();
  return cube;
}

inline Catalog synthesize_dataset(const std::string& out_dir, int num_scenes, std::int64_t m,
                                  std::int64_t n, int c, std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  Catalog catalog;
  for (int i = 0; i < num_scenes; ++i) {
    const std::string name = "scene" + std::to_string(i);
    auto cube = synthetic_scene(m, n, c, seed + static_cast<std::uint64_t>(i) * 1000003ULL);
    const std::string path = (fs::path(out_dir) / (name + ".mpc")).string();
    write_cube(path, cube);
    catalog.entries.push_back({name, path, m, n, cube.wavelengths()});
  }
  catalog.save((fs::path(out_dir) / "catalog.json").string());
  return catalog;
}

}  // namespace mspd

#endif  // MSPD_DATASET_HPP
