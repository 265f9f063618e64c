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
#ifndef MSPD_EXPERIMENT_HPP
#define MSPD_EXPERIMENT_HPP

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mspd/baselines.hpp"
#include "mspd/dataset.hpp"
#include "mspd/metrics.hpp"
#include "mspd/train.hpp"

namespace mspd {

// ---------------------------------------------------------------------------
// experiment specification
// ---------------------------------------------------------------------------

struct ExperimentSpec {
  std::string name = "experiment";
  std::string pattern_file;   // empty: generate from the network config + seed
  std::string dataset_dir;    // directory holding catalog.json
  std::vector<std::string> train_scenes;
  std::vector<std::string> val_scenes;
  std::vector<std::string> test_scenes;
  std::int64_t patch_size = 32;
  std::int64_t stride = 32;
  std::string method = "bilinear";  // bilinear | wiener | mspdnet
  NetworkConfig network;
  int epochs = 50;
  double learning_rate = 1e-4;
  std::string precision = "float64";  // float64 | float32 (training runs)
  std::string checkpoint;             // reuse a trained model instead of training
  int wiener_margin_h = -1;
  int wiener_margin_w = -1;
  double wiener_rho = 1e-4;
  std::uint64_t seed = 0;
  std::string output_dir = "runs";
  std::string run_id;  // empty: UTC timestamp
  PsnrMode psnr_mode = PsnrMode::Pooled;
  std::int64_t eval_tile = 0;  // network evaluation tile (0: patch_size)

  void validate() const {
    require(method == "bilinear" || method == "wiener" || method == "mspdnet",
            "spec: unknown method '", method, "'");
    require(precision == "float64" || precision == "float32", "spec: unknown precision '",
            precision, "'");
    require(!test_scenes.empty(), "spec: no test scenes");
    auto disjoint = [](const std::vector<std::string>& a, const std::vector<std::string>& b,
                       const char* an, const char* bn) {
      for (const auto& x : a)
        for (const auto& y : b)
          require(x != y, "spec: scene '", x, "' appears in both ", an, " and ", bn, " sets");
    };
    disjoint(train_scenes, val_scenes, "train", "validation");
    disjoint(train_scenes, test_scenes, "train", "test");
    disjoint(val_scenes, test_scenes, "validation", "test");
  }

  nlohmann::json to_json() const {
    return {{"name", name},
            {"pattern_file", pattern_file},
            {"dataset_dir", dataset_dir},
            {"train_scenes", train_scenes},
            {"val_scenes", val_scenes},
            {"test_scenes", test_scenes},
            {"patch_size", patch_size},
            {"stride", stride},
            {"method", method},
            {"network", network.to_json()},
            {"epochs", epochs},
            {"learning_rate", learning_rate},
            {"precision", precision},
            {"checkpoint", checkpoint},
            {"wiener_margin_h", wiener_margin_h},
            {"wiener_margin_w", wiener_margin_w},
            {"wiener_rho", wiener_rho},
            {"seed", seed},
            {"output_dir", output_dir},
            {"run_id", run_id},
            {"psnr_mode", psnr_mode == PsnrMode::Pooled ? "pooled" : "per-channel"},
            {"eval_tile", eval_tile}};
  }

  static ExperimentSpec from_json(const nlohmann::json& j) {
    ExperimentSpec s;
    s.name = j.value("name", s.name);
    s.pattern_file = j.value("pattern_file", s.pattern_file);
    s.dataset_dir = j.value("dataset_dir", s.dataset_dir);
    s.train_scenes = j.value("train_scenes", s.train_scenes);
    s.val_scenes = j.value("val_scenes", s.val_scenes);
    s.test_scenes = j.value("test_scenes", s.test_scenes);
    s.patch_size = j.value("patch_size", s.patch_size);
    s.stride = j.value("stride", s.stride);
    s.method = j.value("method", s.method);
    if (j.contains("network")) s.network = NetworkConfig::from_json(j.at("network"));
    s.epochs = j.value("epochs", s.epochs);
    s.learning_rate = j.value("learning_rate", s.learning_rate);
    s.precision = j.value("precision", s.precision);
    s.checkpoint = j.value("checkpoint", s.checkpoint);
    s.wiener_margin_h = j.value("wiener_margin_h", s.wiener_margin_h);
    s.wiener_margin_w = j.value("wiener_margin_w", s.wiener_margin_w);
    s.wiener_rho = j.value("wiener_rho", s.wiener_rho);
    s.seed = j.value("seed", s.seed);
    s.output_dir = j.value("output_dir", s.output_dir);
    s.run_id = j.value("run_id", s.run_id);
    if (j.contains("psnr_mode")) {
      const std::string m = j.at("psnr_mode");
      require(m == "pooled" || m == "per-channel", "spec: unknown psnr_mode '", m, "'");
      s.psnr_mode = m == "pooled" ? PsnrMode::Pooled : PsnrMode::PerChannelMean;
    }
    s.eval_tile = j.value("eval_tile", s.eval_tile);
    return s;
  }

  void save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) fail("spec: cannot open ", path, " for writing");
    os << to_json().dump(2) << "\n";
  }

  static ExperimentSpec load(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail("spec: cannot open ", path);
    nlohmann::json j;
    is >> j;
    return from_json(j);
  }
};

// ---------------------------------------------------------------------------
// helpers
// ---------------------------------------------------------------------------

namespace detail {

template <class F>
auto stage(const std::string& stage_name, const std::string& scene, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    fail("stage '", stage_name, "'", scene.empty() ? "" : " (scene " + scene + ")", ": ",
         e.what());
  }
}

inline std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
  return buf;
}

}  // namespace detail

inline MosaicImage crop_mosaic(const MosaicImage& y, std::int64_t y0, std::int64_t x0,
                               std::int64_t h, std::int64_t w) {
  const auto& p = y.pattern();
  require(y0 % p.period_h == 0 && x0 % p.period_w == 0,
          "crop: offset must be tile-aligned to keep the pattern phase");
  require(y0 + h <= y.height() && x0 + w <= y.width(), "crop: region exceeds the mosaic");
  MosaicImage out(h, w, p);
  for (std::int64_t yy = 0; yy < h; ++yy)
    for (std::int64_t xx = 0; xx < w; ++xx) out.at(yy, xx) = y.at(y0 + yy, x0 + xx);
  return out;
}

// Tiled network evaluation: the non-pooling architecture is shape-preserving
// but its memory footprint scales with tile area, so large scenes are
// demosaicked in aligned tiles (the last row/column of tiles is shifted
// inward to fit, staying tile-aligned).
template <class T>
ImageCube demosaic_tiled(const MspdNet<T>& net, const MosaicImage& y,
                         const std::vector<double>& wavelengths_nm, std::int64_t tile) {
  const auto& p = y.pattern();
  require(tile > 0 && tile % p.period_h == 0 && tile % p.period_w == 0,
          "demosaic: tile must be a positive multiple of the pattern period");
  if (tile >= y.height() && tile >= y.width()) return net.demosaic(y, wavelengths_nm);

  ImageCube out(y.height(), y.width(), wavelengths_nm);
  auto starts = [&](std::int64_t extent, std::int64_t period) {
    std::vector<std::int64_t> s;
    for (std::int64_t v = 0; v + tile < extent; v += tile) s.push_back(v);
    std::int64_t last = ((extent - tile) / period) * period;
    s.push_back(std::max<std::int64_t>(0, last));
    return s;
  };
  for (std::int64_t ty : starts(y.height(), p.period_h))
    for (std::int64_t tx : starts(y.width(), p.period_w)) {
      const std::int64_t th = std::min(tile, y.height() - ty);
      const std::int64_t tw = std::min(tile, y.width() - tx);
      auto piece = net.demosaic(crop_mosaic(y, ty, tx, th, tw), wavelengths_nm);
      for (int a = 0; a < kNumAngles; ++a)
        for (std::int64_t l = 0; l < piece.num_wavelengths(); ++l)
          for (std::int64_t yy = 0; yy < th; ++yy)
            for (std::int64_t xx = 0; xx < tw; ++xx)
              out.at(ty + yy, tx + xx, l, a) = piece.at(yy, xx, l, a);
    }
  return out;
}

inline void save_rgb_png(const ImageCube& cube, int angle, const std::string& path) {
  auto rgb = render_rgb(cube, angle);
  std::vector<std::uint8_t> bytes(rgb.size());
  for (std::size_t i = 0; i < rgb.size(); ++i)
    bytes[i] = static_cast<std::uint8_t>(std::lround(255.0 * rgb[i]));
  write_png_rgb8(path, cube.height(), cube.width(), bytes);
}

inline void save_dolp_png(const ImageCube& cube, std::int64_t lam, const std::string& path) {
  auto d = dolp(stokes(cube));
  const std::size_t plane = static_cast<std::size_t>(cube.height() * cube.width());
  std::vector<std::uint8_t> bytes(plane);
  for (std::size_t i = 0; i < plane; ++i) {
    const double v = std::clamp(d[lam * plane + i], 0.0, 1.0);
    bytes[i] = static_cast<std::uint8_t>(std::lround(255.0 * v));
  }
  write_png_gray8(path, cube.height(), cube.width(), bytes);
}

// ---------------------------------------------------------------------------
// experiment driver
// ---------------------------------------------------------------------------

struct ExperimentResult {
  std::string run_dir;
  std::string method_label;
  MetricsReport report;           // one row: the method that ran
  ReflectanceReport reflectance;  // per-wavelength RMSE averaged over test scenes
};

namespace detail {

template <class T>
MspdNet<T> build_trained_network(const ExperimentSpec& spec, const PatternSpec& pattern,
                                 const Catalog& catalog, const std::string& run_dir) {
  NetworkConfig cfg = spec.network;
  cfg.num_wavelengths = pattern.num_wavelengths;
  cfg.period_h = pattern.period_h;
  cfg.period_w = pattern.period_w;
  cfg.seed = spec.seed;
  MspdNet<T> net(cfg);

  if (!spec.checkpoint.empty()) {
    stage("load-checkpoint", "", [&] { net.load_checkpoint_file(spec.checkpoint); });
    return net;
  }

  require(!spec.train_scenes.empty(), "spec: training requires train scenes (or a checkpoint)");
  PatchSpec ps;
  ps.patch_size = spec.patch_size;
  ps.stride = spec.stride;
  ps.period_h = pattern.period_h;
  ps.period_w = pattern.period_w;
  ps.train_scenes = spec.train_scenes;
  ps.val_scenes = spec.val_scenes;
  ps.seed = spec.seed;
  auto sets = make_patches(catalog, ps);

  auto materialize = [&](const std::vector<PatchRef>& refs) {
    std::vector<TrainSample<T>> out;
    std::string current;
    ImageCube scene;
    for (const auto& r : refs) {
      if (r.scene != current) {
        current = r.scene;
        scene = stage("load-scene", r.scene, [&] {
          return read_cube(catalog.find(r.scene).path)
              .center_crop_to_multiple(pattern.period_h, pattern.period_w);
        });
      }
      auto truth = scene.crop(r.y, r.x, spec.patch_size, spec.patch_size);
      out.push_back(prepare_sample(mosaic(truth, pattern), truth, net));
    }
    return out;
  };
  auto train_samples = stage("make-patches", "", [&] { return materialize(sets.train); });
  auto val_samples = stage("make-patches", "", [&] { return materialize(sets.val); });

  TrainOptions opt;
  opt.epochs = spec.epochs;
  opt.learning_rate = spec.learning_rate;
  opt.seed = spec.seed;
  auto log = stage("train", "", [&] { return mspd::train(net, train_samples, val_samples, opt); });
  log.save_csv(run_dir + "/training_log.csv");
  net.save_checkpoint_file(run_dir + "/checkpoint.ckpt");
  return net;
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  namespace fs = std::filesystem;
  spec.validate();

  const std::string run_id = spec.run_id.empty()
                                 ? "run-" + detail::timestamp_utc() + "-" + spec.method
                                 : spec.run_id;
  const std::string run_dir = (fs::path(spec.output_dir) / run_id).string();
  fs::create_directories(run_dir);

  Catalog catalog = detail::stage("load-catalog", "", [&] {
    return Catalog::load((fs::path(spec.dataset_dir) / "catalog.json").string());
  });

  PatternSpec pattern = detail::stage("load-pattern", "", [&] {
    if (!spec.pattern_file.empty()) return PatternSpec::load(spec.pattern_file);
    return generate_pattern(spec.network.num_wavelengths, spec.network.period_h,
                            spec.network.period_w, spec.seed);
  });
  pattern.save(run_dir + "/pattern.mpp");
  spec.save(run_dir + "/spec.json");

  // demosaicker construction (training happens here for learned methods)
  std::function<ImageCube(const MosaicImage&, const std::vector<double>&)> demosaic;
  std::string label = spec.method;
  if (spec.method == "bilinear") {
    demosaic = [](const MosaicImage& y, const std::vector<double>& nm) {
      return bilinear_demosaic(y, nm);
    };
  } else if (spec.method == "wiener") {
    require(!spec.train_scenes.empty(), "spec: wiener requires train scenes");
    std::vector<ImageCube> train_cubes;
    for (const auto& name : spec.train_scenes)
      train_cubes.push_back(detail::stage("load-scene", name, [&] {
        return read_cube(catalog.find(name).path)
            .center_crop_to_multiple(pattern.period_h, pattern.period_w);
      }));
    auto op = detail::stage("wiener-train", "", [&] {
      return wiener_train(train_cubes, pattern, spec.wiener_margin_h, spec.wiener_margin_w,
                          spec.wiener_rho);
    });
    op.save(run_dir + "/wiener.mwo");
    demosaic = [op = std::move(op)](const MosaicImage& y, const std::vector<double>& nm) {
      return wiener_demosaic(y, op, nm);
    };
  } else {
    label = std::string("mspdnet-") + variant_name(spec.network.variant);
    const std::int64_t tile = spec.eval_tile > 0 ? spec.eval_tile : spec.patch_size;
    if (spec.precision == "float32") {
      auto net = detail::build_trained_network<float>(spec, pattern, catalog, run_dir);
      demosaic = [net = std::move(net), tile](const MosaicImage& y,
                                              const std::vector<double>& nm) {
        return demosaic_tiled(net, y, nm, tile);
      };
    } else {
      auto net = detail::build_trained_network<double>(spec, pattern, catalog, run_dir);
      demosaic = [net = std::move(net), tile](const MosaicImage& y,
                                              const std::vector<double>& nm) {
        return demosaic_tiled(net, y, nm, tile);
      };
    }
  }

  // evaluation over the test scenes
  ExperimentResult result;
  result.run_dir = run_dir;
  result.method_label = label;
  MethodReport method_report;
  method_report.method = label;
  std::vector<double> rmse_acc;

  for (const auto& name : spec.test_scenes) {
    ImageCube truth = detail::stage("load-scene", name, [&] {
      return read_cube(catalog.find(name).path)
          .center_crop_to_multiple(pattern.period_h, pattern.period_w);
    });
    MosaicImage y = detail::stage("mosaic", name, [&] { return mosaic(truth, pattern); });
    ImageCube recon =
        detail::stage("demosaic", name, [&] { return demosaic(y, truth.wavelengths()); });

    detail::stage("metrics", name, [&] {
      SceneMetrics sm;
      sm.scene = name;
      sm.mspi_psnr = cube_psnr(recon, truth, 1.0, spec.psnr_mode);
      sm.dolp_psnr = dolp_psnr(recon, truth);
      method_report.scenes.push_back(sm);

      auto st = stokes(truth);
      auto sr = stokes(recon);
      auto white = white_reference(st);
      auto rmse = reflectance_rmse(sr, st, white);
      if (rmse_acc.empty()) {
        rmse_acc = rmse;
        result.reflectance.wavelengths_nm = truth.wavelengths();
      } else {
        require(rmse.size() == rmse_acc.size(), "metrics: wavelength count differs per scene");
        for (std::size_t i = 0; i < rmse.size(); ++i) rmse_acc[i] += rmse[i];
      }
      return 0;
    });

    detail::stage("artifacts", name, [&] {
      write_cube(run_dir + "/" + name + "_recon.mpc", recon);
      save_rgb_png(recon, 0, run_dir + "/" + name + "_rgb.png");
      save_rgb_png(truth, 0, run_dir + "/" + name + "_truth_rgb.png");
      const std::int64_t mid = truth.num_wavelengths() / 2;
      save_dolp_png(recon, mid, run_dir + "/" + name + "_dolp.png");
      save_dolp_png(truth, mid, run_dir + "/" + name + "_truth_dolp.png");
      return 0;
    });
  }

  for (double& v : rmse_acc) v /= static_cast<double>(spec.test_scenes.size());
  result.reflectance.methods.push_back({label, rmse_acc});
  result.report.methods.push_back(std::move(method_report));
  result.report.save_csv(run_dir + "/report.csv");
  result.reflectance.save_csv(run_dir + "/reflectance.csv");
  return result;
}

// Runs all five network variants under one spec and writes the combined
// comparison table plus the per-wavelength RMSE table.
inline ExperimentResult ablate(ExperimentSpec spec,
                               const std::map<Variant, int>& epoch_overrides = {}) {
  spec.method = "mspdnet";
  const std::string run_id =
      spec.run_id.empty() ? "run-" + detail::timestamp_utc() + "-ablation" : spec.run_id;
  const std::string base_dir = (std::filesystem::path(spec.output_dir) / run_id).string();

  ExperimentResult combined;
  combined.run_dir = base_dir;
  combined.method_label = "ablation";
  for (Variant v : {Variant::Full, Variant::Net1, Variant::Net2, Variant::Net3, Variant::Net4}) {
    ExperimentSpec vs = spec;
    vs.network.variant = v;
    vs.output_dir = base_dir;
    vs.run_id = variant_name(v);
    if (auto it = epoch_overrides.find(v); it != epoch_overrides.end()) vs.epochs = it->second;
    auto r = run_experiment(vs);
    combined.report.methods.push_back(r.report.methods.front());
    if (combined.reflectance.wavelengths_nm.empty())
      combined.reflectance.wavelengths_nm = r.reflectance.wavelengths_nm;
    combined.reflectance.methods.push_back(r.reflectance.methods.front());
  }
  combined.report.save_csv(base_dir + "/ablation.csv");
  combined.reflectance.save_csv(base_dir + "/ablation_reflectance.csv");
  return combined;
}

}  // namespace mspd

#endif  // MSPD_EXPERIMENT_HPP
