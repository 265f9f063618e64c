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

// mspd: multispectral polarization demosaicking toolbox.
//
// Subcommands: pattern-gen, pattern-validate, synth, ingest, mosaic,
// demosaic, train, eval, ablate, report.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "mspd/experiment.hpp"

namespace fs = std::filesystem;

namespace {

std::string env_data_root() {
  const char* v = std::getenv("MSPD_DATA_ROOT");
  return v ? v : "";
}

std::vector<double> default_wavelengths(const mspd::PatternSpec& p) {
  if (!p.wavelengths_nm.empty()) return p.wavelengths_nm;
  std::vector<double> nm(p.num_wavelengths);
  for (int i = 0; i < p.num_wavelengths; ++i)
    nm[i] = p.num_wavelengths > 1 ? 420.0 + 300.0 * i / (p.num_wavelengths - 1) : 550.0;
  return nm;
}

mspd::ExperimentSpec load_spec(const std::string& spec_file, const std::string& dataset,
                               const std::string& pattern, const std::string& out,
                               const std::string& run_id, const std::string& checkpoint) {
  mspd::ExperimentSpec spec =
      spec_file.empty() ? mspd::ExperimentSpec{} : mspd::ExperimentSpec::load(spec_file);
  if (!dataset.empty()) spec.dataset_dir = dataset;
  if (spec.dataset_dir.empty()) spec.dataset_dir = env_data_root();
  if (!pattern.empty()) spec.pattern_file = pattern;
  if (!out.empty()) spec.output_dir = out;
  if (!run_id.empty()) spec.run_id = run_id;
  if (!checkpoint.empty()) spec.checkpoint = checkpoint;
  return spec;
}

int cmd_pattern_gen(int c, int ph, int pw, std::uint64_t seed, double nm_start, double nm_step,
                    const std::string& out) {
  std::vector<double> nm;
  if (nm_step > 0)
    for (int i = 0; i < c; ++i) nm.push_back(nm_start + nm_step * i);
  auto p = mspd::generate_pattern(c, ph, pw, seed, nm);
  p.save(out);
  std::printf("wrote %s (%dx%d tile, %d wavelengths, seed %llu)\n", out.c_str(), ph, pw, c,
              static_cast<unsigned long long>(seed));
  return 0;
}

int cmd_pattern_validate(const std::string& file) {
  auto p = mspd::PatternSpec::load(file);
  auto violations = mspd::validate_pattern(p);
  if (violations.empty()) {
    std::printf("%s: ok (%dx%d tile, %d wavelengths)\n", file.c_str(), p.period_h, p.period_w,
                p.num_wavelengths);
    return 0;
  }
  for (const auto& v : violations) std::printf("%s\n", v.message.c_str());
  std::printf("%s: %zu violation(s)\n", file.c_str(), violations.size());
  return 1;
}

int cmd_eval_cubes(const std::string& pred_file, const std::string& truth_file, double peak,
                   const std::string& mode, const std::string& refl_out) {
  auto pred = mspd::read_cube(pred_file);
  auto truth = mspd::read_cube(truth_file);
  const auto psnr_mode =
      mode == "per-channel" ? mspd::PsnrMode::PerChannelMean : mspd::PsnrMode::Pooled;
  std::printf("mspi_psnr_db %.4f\n", mspd::cube_psnr(pred, truth, peak, psnr_mode));
  std::printf("dolp_psnr_db %.4f\n", mspd::dolp_psnr(pred, truth));
  auto st = mspd::stokes(truth);
  auto rmse = mspd::reflectance_rmse(mspd::stokes(pred), st, mspd::white_reference(st));
  for (std::size_t l = 0; l < rmse.size(); ++l)
    std::printf("reflectance_rmse %.0fnm %.6g\n", truth.wavelengths()[l], rmse[l]);
  if (!refl_out.empty()) {
    mspd::ReflectanceReport r;
    r.wavelengths_nm = truth.wavelengths();
    r.methods = {{"eval", rmse}};
    r.save_csv(refl_out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multispectral polarization demosaicking toolbox"};
  app.require_subcommand(1);

  // ---- pattern-gen
  auto* gen = app.add_subcommand("pattern-gen", "generate a filter-array tile");
  int gen_c = 16, gen_ph = 8, gen_pw = 8;
  std::uint64_t gen_seed = 0;
  double gen_nm_start = 420.0, gen_nm_step = 0.0;
  std::string gen_out = "pattern.mpp";
  gen->add_option("-c,--wavelengths", gen_c, "number of wavelength bands");
  gen->add_option("--period-h", gen_ph, "tile height");
  gen->add_option("--period-w", gen_pw, "tile width");
  gen->add_option("--seed", gen_seed, "search seed");
  gen->add_option("--wavelength-start", gen_nm_start, "first band center (nm)");
  gen->add_option("--wavelength-step", gen_nm_step, "band spacing (nm); 0 omits the list");
  gen->add_option("-o,--out", gen_out, "output pattern file");

  // ---- pattern-validate
  auto* val = app.add_subcommand("pattern-validate", "check a tile against the design rules");
  std::string val_file;
  val->add_option("pattern", val_file, "pattern file")->required();

  // ---- synth
  auto* synth = app.add_subcommand("synth", "write a synthetic scene catalog");
  int synth_scenes = 4, synth_c = 4;
  std::int64_t synth_h = 64, synth_w = 64;
  std::uint64_t synth_seed = 0;
  std::string synth_out = "synthetic";
  synth->add_option("--scenes", synth_scenes, "number of scenes");
  synth->add_option("--height", synth_h, "scene height");
  synth->add_option("--width", synth_w, "scene width");
  synth->add_option("-c,--wavelengths", synth_c, "wavelength bands");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("-o,--out", synth_out, "output directory");

  // ---- ingest
  auto* ing = app.add_subcommand("ingest", "import scenes into a normalized cube catalog");
  std::string ing_in, ing_out = "catalog";
  int ing_depth = 12;
  double ing_start = 0, ing_end = 0, ing_step = 0;
  ing->add_option("-i,--input", ing_in, "dataset root (default: $MSPD_DATA_ROOT)");
  ing->add_option("-o,--out", ing_out, "catalog output directory");
  ing->add_option("--bit-depth", ing_depth, "source bit depth (PNG planes)");
  ing->add_option("--subset-start", ing_start, "wavelength subset start (nm)");
  ing->add_option("--subset-end", ing_end, "wavelength subset end (nm)");
  ing->add_option("--subset-step", ing_step, "wavelength subset step (nm); 0 keeps all");

  // ---- mosaic
  auto* mos = app.add_subcommand("mosaic", "sample a cube through a pattern");
  std::string mos_cube, mos_pattern, mos_out = "mosaic.mpm";
  mos->add_option("--cube", mos_cube, "ground-truth cube (.mpc)")->required();
  mos->add_option("--pattern", mos_pattern, "pattern file")->required();
  mos->add_option("-o,--out", mos_out, "output mosaic (.mpm)");

  // ---- demosaic
  auto* dem = app.add_subcommand("demosaic", "reconstruct a cube from a mosaic");
  std::string dem_in, dem_out = "recon.mpc", dem_method = "bilinear";
  std::string dem_wiener, dem_ckpt, dem_config;
  std::int64_t dem_tile = 0;
  dem->add_option("--mosaic", dem_in, "input mosaic (.mpm)")->required();
  dem->add_option("--method", dem_method, "bilinear | wiener | mspdnet");
  dem->add_option("--wiener-op", dem_wiener, "trained Wiener operator (.mwo)");
  dem->add_option("--checkpoint", dem_ckpt, "network checkpoint (.ckpt)");
  dem->add_option("--config", dem_config, "network config (.json)");
  dem->add_option("--tile", dem_tile, "evaluation tile for mspdnet (0: whole image)");
  dem->add_option("-o,--out", dem_out, "output cube (.mpc)");

  // ---- train
  auto* tr = app.add_subcommand("train", "train a demosaicker (mspdnet or wiener)");
  std::string tr_spec, tr_dataset, tr_pattern, tr_out = "runs", tr_run;
  tr->add_option("--spec", tr_spec, "experiment spec (.json)");
  tr->add_option("--dataset", tr_dataset, "catalog directory (default: $MSPD_DATA_ROOT)");
  tr->add_option("--pattern", tr_pattern, "pattern file");
  tr->add_option("-o,--output", tr_out, "output root");
  tr->add_option("--run-id", tr_run, "run directory name (default: timestamp)");

  // ---- eval
  auto* ev = app.add_subcommand("eval",
                                "evaluate: either --spec (full experiment) or a cube pair");
  std::string ev_spec, ev_dataset, ev_pattern, ev_out, ev_run, ev_ckpt;
  std::string ev_pred, ev_truth, ev_mode = "pooled", ev_refl;
  double ev_peak = 1.0;
  ev->add_option("--spec", ev_spec, "experiment spec (.json)");
  ev->add_option("--dataset", ev_dataset, "catalog directory (default: $MSPD_DATA_ROOT)");
  ev->add_option("--pattern", ev_pattern, "pattern file override");
  ev->add_option("-o,--output", ev_out, "output root override");
  ev->add_option("--run-id", ev_run, "run directory name");
  ev->add_option("--checkpoint", ev_ckpt, "checkpoint override for learned methods");
  ev->add_option("--pred", ev_pred, "reconstructed cube (.mpc) for pair mode");
  ev->add_option("--truth", ev_truth, "ground-truth cube (.mpc) for pair mode");
  ev->add_option("--peak", ev_peak, "PSNR peak (pair mode)");
  ev->add_option("--psnr-mode", ev_mode, "pooled | per-channel");
  ev->add_option("--reflectance-out", ev_refl, "write reflectance RMSE CSV (pair mode)");

  // ---- ablate
  auto* ab = app.add_subcommand("ablate", "run all five network variants and tabulate");
  std::string ab_spec, ab_dataset, ab_pattern, ab_out, ab_run;
  std::map<std::string, int> ab_epochs;
  ab->add_option("--spec", ab_spec, "experiment spec (.json)")->required();
  ab->add_option("--dataset", ab_dataset, "catalog directory");
  ab->add_option("--pattern", ab_pattern, "pattern file override");
  ab->add_option("-o,--output", ab_out, "output root override");
  ab->add_option("--run-id", ab_run, "run directory name");
  ab->add_option("--epochs-for", ab_epochs,
                 "per-variant epoch override, e.g. --epochs-for net1 200");

  // ---- report
  auto* rep = app.add_subcommand("report", "merge report CSVs (runs and external rows)");
  std::vector<std::string> rep_inputs;
  std::string rep_out = "merged_report.csv";
  rep->add_option("-i,--inputs", rep_inputs, "report.csv files to merge")->required();
  rep->add_option("-o,--out", rep_out, "merged CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen)
      return cmd_pattern_gen(gen_c, gen_ph, gen_pw, gen_seed, gen_nm_start, gen_nm_step,
                             gen_out);

    if (*val) return cmd_pattern_validate(val_file);

    if (*synth) {
      auto catalog = mspd::synthesize_dataset(synth_out, synth_scenes, synth_h, synth_w,
                                              synth_c, synth_seed);
      std::printf("wrote %zu synthetic scenes under %s\n", catalog.entries.size(),
                  synth_out.c_str());
      return 0;
    }

    if (*ing) {
      if (ing_in.empty()) ing_in = env_data_root();
      if (ing_in.empty()) {
        std::fprintf(stderr, "ingest: no --input and MSPD_DATA_ROOT is unset\n");
        return 1;
      }
      mspd::IngestOptions opt;
      opt.bit_depth = ing_depth;
      opt.subset_start_nm = ing_start;
      opt.subset_end_nm = ing_end;
      opt.subset_step_nm = ing_step;
      auto result = mspd::ingest(ing_in, ing_out, opt);
      std::printf("ingested %zu scene(s) into %s\n", result.catalog.entries.size(),
                  ing_out.c_str());
      for (const auto& e : result.errors)
        std::fprintf(stderr, "scene %s failed: %s\n", e.scene.c_str(), e.message.c_str());
      return result.errors.empty() ? 0 : 1;
    }

    if (*mos) {
      auto cube = mspd::read_cube(mos_cube);
      auto pattern = mspd::PatternSpec::load(mos_pattern);
      auto cropped = cube.center_crop_to_multiple(pattern.period_h, pattern.period_w);
      mspd::write_mosaic(mos_out, mspd::mosaic(cropped, pattern));
      std::printf("wrote %s (%lldx%lld)\n", mos_out.c_str(),
                  static_cast<long long>(cropped.height()),
                  static_cast<long long>(cropped.width()));
      return 0;
    }

    if (*dem) {
      auto y = mspd::read_mosaic(dem_in);
      auto nm = default_wavelengths(y.pattern());
      mspd::ImageCube recon;
      if (dem_method == "bilinear") {
        recon = mspd::bilinear_demosaic(y, nm);
      } else if (dem_method == "wiener") {
        if (dem_wiener.empty()) {
          std::fprintf(stderr, "demosaic: --wiener-op required for method wiener\n");
          return 1;
        }
        recon = mspd::wiener_demosaic(y, mspd::WienerOperator::load(dem_wiener), nm);
      } else if (dem_method == "mspdnet") {
        if (dem_ckpt.empty() || dem_config.empty()) {
          std::fprintf(stderr, "demosaic: --checkpoint and --config required for mspdnet\n");
          return 1;
        }
        auto cfg = mspd::NetworkConfig::load(dem_config);
        cfg.num_wavelengths = y.pattern().num_wavelengths;
        cfg.period_h = y.pattern().period_h;
        cfg.period_w = y.pattern().period_w;
        mspd::MspdNet<double> net(cfg);
        net.load_checkpoint_file(dem_ckpt);
        recon = dem_tile > 0 ? mspd::demosaic_tiled(net, y, nm, dem_tile)
                             : net.demosaic(y, nm);
      } else {
        std::fprintf(stderr, "demosaic: unknown method '%s'\n", dem_method.c_str());
        return 1;
      }
      mspd::write_cube(dem_out, recon);
      std::printf("wrote %s\n", dem_out.c_str());
      return 0;
    }

    if (*tr) {
      auto spec = load_spec(tr_spec, tr_dataset, tr_pattern, tr_out, tr_run, "");
      const std::string run_id = spec.run_id.empty()
                                     ? "run-" + mspd::detail::timestamp_utc() + "-train"
                                     : spec.run_id;
      const std::string run_dir = (fs::path(spec.output_dir) / run_id).string();
      fs::create_directories(run_dir);
      auto catalog = mspd::Catalog::load((fs::path(spec.dataset_dir) / "catalog.json").string());
      auto pattern = spec.pattern_file.empty()
                         ? mspd::generate_pattern(spec.network.num_wavelengths,
                                                  spec.network.period_h, spec.network.period_w,
                                                  spec.seed)
                         : mspd::PatternSpec::load(spec.pattern_file);
      pattern.save(run_dir + "/pattern.mpp");
      spec.save(run_dir + "/spec.json");
      if (spec.method == "bilinear") {
        std::fprintf(stderr, "train: bilinear has nothing to train; use eval directly\n");
        return 1;
      }
      if (spec.method == "wiener") {
        std::vector<mspd::ImageCube> cubes;
        for (const auto& name : spec.train_scenes)
          cubes.push_back(mspd::read_cube(catalog.find(name).path)
                              .center_crop_to_multiple(pattern.period_h, pattern.period_w));
        auto op = mspd::wiener_train(cubes, pattern, spec.wiener_margin_h, spec.wiener_margin_w,
                                     spec.wiener_rho);
        op.save(run_dir + "/wiener.mwo");
        std::printf("wrote %s/wiener.mwo (residual %.3g)\n", run_dir.c_str(),
                    op.normal_eq_residual);
      } else {
        if (spec.precision == "float32")
          mspd::detail::build_trained_network<float>(spec, pattern, catalog, run_dir);
        else
          mspd::detail::build_trained_network<double>(spec, pattern, catalog, run_dir);
        std::printf("wrote %s/checkpoint.ckpt and training_log.csv\n", run_dir.c_str());
      }
      return 0;
    }

    if (*ev) {
      if (!ev_pred.empty() || !ev_truth.empty()) {
        if (ev_pred.empty() || ev_truth.empty()) {
          std::fprintf(stderr, "eval: pair mode needs both --pred and --truth\n");
          return 1;
        }
        return cmd_eval_cubes(ev_pred, ev_truth, ev_peak, ev_mode, ev_refl);
      }
      if (ev_spec.empty()) {
        std::fprintf(stderr, "eval: need --spec or a --pred/--truth pair\n");
        return 1;
      }
      auto spec = load_spec(ev_spec, ev_dataset, ev_pattern, ev_out, ev_run, ev_ckpt);
      if (ev_mode == "per-channel") spec.psnr_mode = mspd::PsnrMode::PerChannelMean;
      auto result = mspd::run_experiment(spec);
      std::printf("run directory: %s\n", result.run_dir.c_str());
      const auto& m = result.report.methods.front();
      for (const auto& s : m.scenes)
        std::printf("%s %s: mspi %.4f dB, dolp %.4f dB\n", m.method.c_str(), s.scene.c_str(),
                    s.mspi_psnr, s.dolp_psnr);
      std::printf("%s average: mspi %.4f dB, dolp %.4f dB\n", m.method.c_str(),
                  m.average_mspi(), m.average_dolp());
      return 0;
    }

    if (*ab) {
      auto spec = load_spec(ab_spec, ab_dataset, ab_pattern, ab_out, ab_run, "");
      std::map<mspd::Variant, int> overrides;
      for (const auto& [name, epochs] : ab_epochs)
        overrides[mspd::variant_from_name(name)] = epochs;
      auto result = mspd::ablate(spec, overrides);
      std::printf("wrote %s/ablation.csv\n", result.run_dir.c_str());
      for (const auto& m : result.report.methods)
        std::printf("%-14s average mspi %.4f dB, dolp %.4f dB\n", m.method.c_str(),
                    m.average_mspi(), m.average_dolp());
      return 0;
    }

    if (*rep) {
      mspd::MetricsReport merged;
      for (const auto& f : rep_inputs) {
        auto r = mspd::load_report_csv(f);
        for (auto& m : r.methods) merged.methods.push_back(std::move(m));
      }
      merged.save_csv(rep_out);
      std::printf("wrote %s (%zu method rows)\n", rep_out.c_str(), merged.methods.size());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
