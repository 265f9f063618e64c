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

// Acceptance suite: one line per criterion, nonzero exit on any FAIL.
//
// Criteria 9 and 10 need the public capture dataset; they SKIP unless
// MSPD_DATA_ROOT points at it (raw scene directories or an ingested
// catalog). Criterion 9 FLAGs rather than fails on a tolerance miss.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "mspd/experiment.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using mspd::ImageCube;
using mspd::Rng;
using mspd::Variant;
using Tensor = mspd::Tensor<double>;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(const char* status, int criterion, const std::string& text) {
  std::printf("[%s] criterion %d: %s\n", status, criterion, text.c_str());
  std::fflush(stdout);
}

void pass(int criterion, const std::string& text) { report("PASS", criterion, text); }

void fail(int criterion, const std::string& text) {
  report("FAIL", criterion, text);
  ++g_failures;
}

void verdict(int criterion, bool ok, const std::string& text) {
  ok ? pass(criterion, text) : fail(criterion, text);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// the frozen overfit patch: dim, smooth, mildly polarized
ImageCube overfit_patch() {
  ImageCube cube(16, 16, fixtures::wavelengths_nm(4));
  const double tau = 6.283185307179586;
  for (int lam = 0; lam < 4; ++lam)
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) {
        const double u = x / 16.0, v = y / 16.0;
        const double s0 = 0.2 * (0.55 + 0.25 * std::sin(tau * 0.5 * (u + v) + 0.3 * lam));
        const double chi = tau * (u - v);
        const double s1 = 0.1 * s0 * std::cos(chi), s2 = 0.1 * s0 * std::sin(chi);
        cube.at(y, x, lam, 0) = (s0 + s1) / 2;
        cube.at(y, x, lam, 1) = (s0 + s2) / 2;
        cube.at(y, x, lam, 2) = (s0 - s1) / 2;
        cube.at(y, x, lam, 3) = (s0 - s2) / 2;
      }
  return cube;
}

mspd::NetworkConfig miniature_config() {
  mspd::NetworkConfig cfg;
  cfg.num_wavelengths = 2;
  cfg.period_h = cfg.period_w = 2;
  cfg.ms_filters = {1, 2, 2, 2, 2};
  // this seed keeps every ReLU pre-activation well clear of zero, so the
  // finite-difference probes below never straddle a kink
  cfg.seed = 1;
  return cfg.normalized();
}

// ---------------------------------------------------------------------------

void criterion1_gradients() {
  const auto t0 = Clock::now();
  Rng rng(101);
  double max_op_rel = 0.0;
  std::string first_bad;

  auto check = [&](const char* name, const std::function<Tensor()>& build,
                   std::vector<Tensor> leaves) {
    auto res = oracle::check_gradients(build, std::move(leaves), 1e-4);
    max_op_rel = std::max(max_op_rel, res.max_rel);
    if (!res.ok && first_bad.empty()) first_bad = std::string(name) + ": " + res.detail;
  };

  auto rnd = [&rng](mspd::Shape s, bool rg = true) {
    return Tensor::uniform(std::move(s), -1.0, 1.0, rng, rg);
  };

  {
    auto x = rnd({1, 2, 3, 4, 4}), k = rnd({2, 2, 3, 3, 3}), b = rnd({2});
    auto w = rnd({1, 2, 3, 4, 4}, false);
    check("conv3d", [&] {
      return mspd::sum(mspd::mul(mspd::conv3d(x, k, b, mspd::ConvPad3{1, 1, 1, 1}), w));
    }, {x, k, b});
  }
  {
    auto x = rnd({1, 2, 5, 5}), k = rnd({3, 2, 3, 3}), b = rnd({3});
    auto w = rnd({1, 3, 5, 5}, false);
    check("conv2d", [&] {
      return mspd::sum(mspd::mul(mspd::conv2d(x, k, b, mspd::ConvPad2{1, 1}), w));
    }, {x, k, b});
  }
  {
    auto x = Tensor::from({6}, {-2.0, 1.5, -0.75, 3.0, -1.25, 0.5}, true);
    auto w = rnd({6}, false);
    check("relu", [&] { return mspd::sum(mspd::mul(mspd::relu(x), w)); }, {x});
  }
  {
    auto a = rnd({3, 4}), b = rnd({3, 4});
    auto w = rnd({3, 4}, false);
    check("add/sub/mul/scale", [&] {
      auto t = mspd::mul(mspd::sub(mspd::add(a, b), mspd::scale(b, 0.3)), w);
      return mspd::sum(mspd::mul(t, t));
    }, {a, b});
  }
  {
    std::vector<Tensor> parts{rnd({2, 2, 3}), rnd({2, 1, 3}), rnd({2, 2, 3})};
    auto w = rnd({2, 5, 3}, false);
    check("concat", [&] { return mspd::sum(mspd::mul(mspd::concat(parts, 1), w)); },
          {parts[0], parts[1], parts[2]});
  }
  {
    auto x = rnd({3, 6, 4});
    auto w = rnd({3, 3, 4}, false);
    check("slice", [&] { return mspd::sum(mspd::mul(mspd::slice(x, 1, 2, 5), w)); }, {x});
  }
  {
    auto x = rnd({2, 3, 3});
    auto w = rnd({4, 4, 6}, false);
    check("pad_zero", [&] {
      return mspd::sum(mspd::mul(mspd::pad_zero(x, {1, 0, 2}, {1, 1, 1}), w));
    }, {x});
  }

  // miniature end-to-end network: 8x8 patch, c=2, period 2x2, 2-filter stacks
  auto pattern = fixtures::miniature_pattern_2x2_c2();
  auto cube = fixtures::synthetic_cube(8, 8, 2);
  auto y = mspd::mosaic(cube, pattern);
  mspd::MspdNet<double> net(miniature_config());
  auto sample = mspd::prepare_sample(y, cube, net);
  std::vector<Tensor> leaves;
  for (auto& nt : net.named_parameters()) leaves.push_back(nt.tensor);
  // Probes at 1e-7 with a 1e-8 refinement: bias probes shift whole channels,
  // so a wider step can straddle a ReLU kink somewhere in the volume, while
  // the loss's rounding noise (~1e-14 absolute) caps how small the step may
  // get. The absolute floor 1e-6 covers coordinates whose true gradient
  // sits at the noise level (typical gradients here are O(0.01..1)).
  auto e2e = oracle::check_gradients(
      [&] { return mspd::loss_graph(net.forward_packed(sample.inputs), sample.truth, 1.0); },
      leaves, 1e-3, 1e-6, 1e-7, 1e-8);

  const double secs = seconds_since(t0);
  const bool ok = first_bad.empty() && max_op_rel < 1e-4 && e2e.ok && e2e.max_rel < 1e-3 &&
                  secs < 60.0;
  std::ostringstream os;
  os << "gradient correctness (per-op max rel " << fmt("%.2e", max_op_rel)
     << " < 1e-4, end-to-end max rel " << fmt("%.2e", e2e.max_rel) << " < 1e-3, "
     << fmt("%.1f", secs) << "s < 60s)";
  if (!first_bad.empty()) os << " first failure: " << first_bad;
  if (!e2e.ok) os << " e2e failure: " << e2e.detail;
  verdict(1, ok, os.str());
}

void criterion2_architecture() {
  bool ok = true;
  std::ostringstream notes;

  // (a) zeroed non-linear mapping layer reduces Full to Net1 bit-exactly
  {
    auto pattern = fixtures::desk_pattern_4x4_c4();
    auto cube = fixtures::synthetic_cube(16, 16, 4);
    auto y = mspd::mosaic(cube, pattern);
    mspd::NetworkConfig cfg;
    cfg.num_wavelengths = 4;
    cfg.period_h = cfg.period_w = 4;
    cfg.seed = 11;
    cfg.variant = Variant::Full;
    mspd::MspdNet<double> full(cfg);
    for (auto& nt : full.named_parameters())
      if (nt.name.rfind("tri", 0) != 0)
        std::fill(nt.tensor.mutable_data().begin(), nt.tensor.mutable_data().end(), 0.0);
    cfg.variant = Variant::Net1;
    mspd::MspdNet<double> net1(cfg);
    if (full.demosaic(y, cube.wavelengths()).values() !=
        net1.demosaic(y, cube.wavelengths()).values()) {
      ok = false;
      notes << " [zeroed-Full != Net1]";
    }
  }

  // (b) shape soundness across (m, n, c, period) x variants
  {
    struct Config {
      std::int64_t m, n;
      mspd::PatternSpec pattern;
    };
    std::vector<Config> configs;
    configs.push_back({8, 8, mspd::generate_pattern(1, 2, 2, 7)});
    configs.push_back({8, 12, fixtures::miniature_pattern_2x2_c2()});
    configs.push_back({16, 16, fixtures::desk_pattern_4x4_c4()});
    configs.push_back({16, 24, mspd::generate_pattern(4, 4, 8, 3)});
    for (const auto& c : configs)
      for (Variant v : {Variant::Full, Variant::Net1, Variant::Net2, Variant::Net3,
                        Variant::Net4}) {
        mspd::NetworkConfig cfg;
        cfg.num_wavelengths = c.pattern.num_wavelengths;
        cfg.period_h = c.pattern.period_h;
        cfg.period_w = c.pattern.period_w;
        cfg.ms_filters = {1, 2, 2, 2, 2};
        cfg.variant = v;
        cfg.seed = 13;
        mspd::MspdNet<double> net(cfg);
        ImageCube cube(c.m, c.n, fixtures::wavelengths_nm(c.pattern.num_wavelengths));
        for (std::size_t i = 0; i < cube.values().size(); ++i)
          cube.values()[i] = 0.25 + 0.5 * ((i * 2654435761u) % 97) / 97.0;
        auto out = net.demosaic(mspd::mosaic(cube, c.pattern), cube.wavelengths());
        if (out.height() != c.m || out.width() != c.n ||
            out.num_wavelengths() != c.pattern.num_wavelengths) {
          ok = false;
          notes << " [shape " << mspd::variant_name(v) << " " << c.m << "x" << c.n << " c"
                << c.pattern.num_wavelengths << "]";
        }
      }
  }

  // (c) layer-by-layer parameter tally, c=4, period 4x4, filters {1,8,16,32,64}
  {
    const std::int64_t tri = 1 * 1 * 4 * 7 * 7 + 1;
    const std::int64_t ms = (8 * 1 * 27 + 8) + (16 * 8 * 27 + 16) + (16 * 16 * 27 + 16) +
                            (16 * 16 * 27 + 16) + (32 * 16 * 27 + 32) + (64 * 32 * 27 + 64) +
                            (1 * 64 + 1);
    mspd::NetworkConfig cfg;
    cfg.num_wavelengths = 4;
    cfg.period_h = cfg.period_w = 4;
    auto count = [&cfg](Variant v) {
      cfg.variant = v;
      return mspd::MspdNet<double>(cfg).parameter_count();
    };
    const auto full = count(Variant::Full), net3 = count(Variant::Net3),
               net1 = count(Variant::Net1);
    if (full != 4 * tri + 5 * ms || net3 != 4 * tri + 4 * ms || net1 != 4 * tri ||
        !(full > net3 && net3 > net1)) {
      ok = false;
      notes << " [parameter tally " << full << "/" << net3 << "/" << net1 << " vs "
            << 4 * tri + 5 * ms << "/" << 4 * tri + 4 * ms << "/" << 4 * tri << "]";
    }
  }

  verdict(2, ok,
          "architecture identities (zeroed-Full==Net1 bit-exact; 4 configs x 5 variants "
          "shape-sound; parameter tallies 434953/348120/788 match)" +
              notes.str());
}

void criterion3_overfit() {
  const auto t0 = Clock::now();
  auto pattern = fixtures::desk_pattern_4x4_c4();
  auto cube = overfit_patch();
  auto y = mspd::mosaic(cube, pattern);

  mspd::NetworkConfig cfg;
  cfg.num_wavelengths = 4;
  cfg.period_h = cfg.period_w = 4;
  cfg.variant = Variant::Full;
  cfg.seed = 42;
  mspd::MspdNet<double> net(cfg);
  std::vector<mspd::TrainSample<double>> set{mspd::prepare_sample(y, cube, net)};

  mspd::TrainOptions opt;
  opt.epochs = 200;  // one patch: one Adam step per epoch
  opt.learning_rate = 1e-3;
  opt.seed = 7;
  auto log = mspd::train(net, set, {}, opt);

  const double first = log.epochs.front().train_loss;
  const double last = log.epochs.back().train_loss;
  const double psnr = mspd::cube_psnr(net.demosaic(y, cube.wavelengths()), cube);
  const double secs = seconds_since(t0);
  const bool ok = last * 10.0 <= first && psnr > 40.0 && secs < 120.0;
  verdict(3, ok,
          fmt("overfit sanity (loss %.3g -> %.3g, %.0fx >= 10x; patch PSNR %.2f dB > 40 dB; "
              "%.0fs < 120s; 200 steps at lr 1e-3)",
              first, last, first / last, psnr, secs));
}

void criterion4_loss() {
  bool ok = true;
  std::ostringstream notes;

  // hand-built pair, direct evaluation of the data + gradient terms
  ImageCube pred(2, 2, {500.0}), truth(2, 2, {500.0});
  const double pv[4] = {0.15, 0.45, 0.30, 0.85}, tv[4] = {0.20, 0.10, 0.50, 0.55};
  for (int i = 0; i < 4; ++i)
    for (int a = 0; a < 4; ++a) {
      pred.at(i / 2, i % 2, 0, a) = pv[i];
      truth.at(i / 2, i % 2, 0, a) = tv[i];
    }
  double data = 0, grad = 0;
  for (int i = 0; i < 4; ++i) data += (pv[i] - tv[i]) * (pv[i] - tv[i]);
  const double dv[2] = {(pv[2] - pv[0]) - (tv[2] - tv[0]), (pv[3] - pv[1]) - (tv[3] - tv[1])};
  const double dh[2] = {(pv[1] - pv[0]) - (tv[1] - tv[0]), (pv[3] - pv[2]) - (tv[3] - tv[2])};
  for (int i = 0; i < 2; ++i) grad += dv[i] * dv[i] + dh[i] * dh[i];
  for (double lambda : {1.0, 0.7}) {
    const double expect = 4 * (data + lambda * grad);
    const double got = mspd::loss_value(pred, truth, lambda);
    if (std::abs(got - expect) > 1e-12 * std::max(1.0, std::abs(expect))) {
      ok = false;
      notes << fmt(" [lambda %.1f: %.17g vs %.17g]", lambda, got, expect);
    }
  }
  if (std::abs(mspd::loss_value(pred, truth, 0.0) - 4 * data) > 1e-12) {
    ok = false;
    notes << " [lambda=0 is not the pure Frobenius term]";
  }
  // graph evaluation against the same oracle
  mspd::NetworkConfig cfg;
  cfg.num_wavelengths = 1;
  const double graph =
      mspd::loss_graph(mspd::pack_cube<double>(pred, cfg), mspd::pack_cube<double>(truth, cfg),
                       1.0)
          .value();
  if (std::abs(graph - 4 * (data + grad)) > 1e-12 * std::max(1.0, 4 * (data + grad))) {
    ok = false;
    notes << " [graph loss disagrees]";
  }

  // gradient-map examples: constant and a horizontal ramp
  ImageCube constant(4, 5, {500.0});
  for (auto& v : constant.values()) v = 0.8;
  for (double v : mspd::gradient_map(constant).values)
    if (v != 0.0) {
      ok = false;
      notes << " [constant gradient map not zero]";
      break;
    }
  ImageCube ramp(4, 5, {500.0});
  for (std::int64_t yy = 0; yy < 4; ++yy)
    for (std::int64_t xx = 0; xx < 5; ++xx)
      for (int a = 0; a < 4; ++a) ramp.at(yy, xx, 0, a) = static_cast<double>(xx);
  auto g = mspd::gradient_map(ramp);
  for (std::int64_t yy = 0; yy < 4 && ok; ++yy)
    for (std::int64_t xx = 0; xx < 5; ++xx)
      if (g.at(yy, xx, 0, 0, 0) != 0.0 ||
          g.at(yy, xx, 0, 0, 1) != (xx + 1 < 5 ? 1.0 : 0.0)) {
        ok = false;
        notes << " [ramp gradient map wrong]";
        break;
      }

  verdict(4, ok,
          "loss semantics (direct formula oracle to 1e-12; lambda=0 pure Frobenius; "
          "constant/ramp gradient maps exact)" +
              notes.str());
}

void criterion5_stokes_dolp() {
  bool ok = true;
  std::ostringstream notes;
  Rng rng(55);

  // random-input oracle equivalence to 1e-12
  ImageCube cube(5, 6, fixtures::wavelengths_nm(3));
  for (auto& v : cube.values()) v = rng.uniform();
  auto s = mspd::stokes(cube);
  auto d = mspd::dolp(s);
  for (std::int64_t lam = 0; lam < 3 && ok; ++lam)
    for (std::int64_t y = 0; y < 5 && ok; ++y)
      for (std::int64_t x = 0; x < 6; ++x) {
        const double i0 = cube.at(y, x, lam, 0), i45 = cube.at(y, x, lam, 1);
        const double i90 = cube.at(y, x, lam, 2), i135 = cube.at(y, x, lam, 3);
        const double s0 = (i0 + i45 + i90 + i135) / 2, s1 = i0 - i90, s2 = i45 - i135;
        const std::size_t idx = (lam * 5 + y) * 6 + x;
        const double dref = s0 < 1e-8 ? 0.0 : std::sqrt(s1 * s1 + s2 * s2) / s0;
        if (std::abs(s.s0[idx] - s0) > 1e-12 || std::abs(s.s1[idx] - s1) > 1e-12 ||
            std::abs(s.s2[idx] - s2) > 1e-12 || std::abs(d[idx] - dref) > 1e-12) {
          ok = false;
          notes << " [oracle mismatch at " << lam << "," << y << "," << x << "]";
          break;
        }
      }

  // unpolarized -> 0, fully polarized -> 1, exact
  ImageCube unpol(2, 2, {500.0});
  for (auto& v : unpol.values()) v = 0.4;
  if (mspd::dolp(mspd::stokes(unpol))[0] != 0.0) {
    ok = false;
    notes << " [unpolarized DoLP != 0]";
  }
  ImageCube pol(2, 2, {500.0});
  for (std::int64_t y = 0; y < 2; ++y)
    for (std::int64_t x = 0; x < 2; ++x) {
      pol.at(y, x, 0, 0) = 2.0;
      pol.at(y, x, 0, 1) = 1.0;
      pol.at(y, x, 0, 2) = 0.0;
      pol.at(y, x, 0, 3) = 1.0;
    }
  if (std::abs(mspd::dolp(mspd::stokes(pol))[0] - 1.0) > 1e-15) {
    ok = false;
    notes << " [fully polarized DoLP != 1]";
  }
  ImageCube dark(2, 2, {500.0});
  if (mspd::dolp(mspd::stokes(dark))[0] != 0.0) {
    ok = false;
    notes << " [s0=0 epsilon rule broken]";
  }

  verdict(5, ok,
          "DoLP/Stokes (random oracle to 1e-12; unpolarized->0 and fully-polarized->1 exact; "
          "epsilon rule at s0=0)" +
              notes.str());
}

void criterion6_baselines() {
  bool ok = true;
  std::ostringstream notes;

  // bilinear reconstructs affine channels exactly in the interior
  {
    auto p = mspd::generate_pattern(16, 8, 8, 21);
    const std::int64_t m = 64, n = 64;
    ImageCube cube(m, n, fixtures::wavelengths_nm(16));
    for (std::int64_t y = 0; y < m; ++y)
      for (std::int64_t x = 0; x < n; ++x)
        for (int lam = 0; lam < 16; ++lam)
          for (int a = 0; a < 4; ++a)
            cube.at(y, x, lam, a) = 0.011 * x - 0.007 * y + 0.45;
    auto rec = mspd::bilinear_demosaic(mspd::mosaic(cube, p), cube.wavelengths());
    double max_err = 0;
    for (int lam = 0; lam < 16; ++lam)
      for (int a = 0; a < 4; ++a) {
        int oy = -1, ox = -1;
        for (int ty = 0; ty < 8 && oy < 0; ++ty)
          for (int tx = 0; tx < 8; ++tx)
            if (p.at(ty, tx).wavelength == lam && p.at(ty, tx).angle == a) {
              oy = ty;
              ox = tx;
              break;
            }
        for (std::int64_t y = oy; y <= m - 8 + oy; ++y)
          for (std::int64_t x = ox; x <= n - 8 + ox; ++x)
            max_err = std::max(max_err,
                               std::abs(rec.at(y, x, lam, a) - cube.at(y, x, lam, a)));
      }
    if (max_err >= 1e-10) {
      ok = false;
      notes << fmt(" [bilinear affine interior err %.2e]", max_err);
    } else {
      notes << fmt(" bilinear affine err %.1e;", max_err);
    }
  }

  // Wiener recovers a planted linear map and beats bilinear in-sample
  {
    auto p = fixtures::desk_pattern_4x4_c4();
    Rng rng(66);
    std::vector<ImageCube> cubes;
    for (int i = 0; i < 3; ++i) {
      ImageCube c(32, 32, fixtures::wavelengths_nm(4));
      std::vector<double> base(32 * 32);
      for (auto& v : base) v = rng.uniform();
      for (int a = 0; a < 4; ++a)
        for (int lam = 0; lam < 4; ++lam) std::copy(base.begin(), base.end(), c.plane(a, lam));
      cubes.push_back(std::move(c));
    }
    auto op = mspd::wiener_train(cubes, p, -1, -1, 1e-12);
    double max_err = 0;
    auto rec = mspd::wiener_demosaic(mspd::mosaic(cubes[0], p), op, cubes[0].wavelengths());
    for (std::size_t i = 0; i < rec.values().size(); ++i)
      max_err = std::max(max_err, std::abs(rec.values()[i] - cubes[0].values()[i]));
    if (op.normal_eq_residual >= 1e-8 || max_err >= 1e-6) {
      ok = false;
      notes << fmt(" [wiener planted map: residual %.2e, err %.2e]", op.normal_eq_residual,
                   max_err);
    } else {
      notes << fmt(" wiener residual %.1e;", op.normal_eq_residual);
    }

    auto scene = fixtures::synthetic_cube(64, 64, 4, 2.0);
    auto y = mspd::mosaic(scene, p);
    auto w_op = mspd::wiener_train({scene}, p, -1, -1, 1e-8);
    auto mse = [&](const ImageCube& r) {
      double acc = 0;
      for (std::size_t i = 0; i < r.values().size(); ++i) {
        const double d = r.values()[i] - scene.values()[i];
        acc += d * d;
      }
      return acc / static_cast<double>(r.values().size());
    };
    const double wiener_mse = mse(mspd::wiener_demosaic(y, w_op, scene.wavelengths()));
    const double bilinear_mse = mse(mspd::bilinear_demosaic(y, scene.wavelengths()));
    if (wiener_mse > bilinear_mse) {
      ok = false;
      notes << fmt(" [in-sample wiener %.3e > bilinear %.3e]", wiener_mse, bilinear_mse);
    } else {
      notes << fmt(" in-sample mse wiener %.2e <= bilinear %.2e", wiener_mse, bilinear_mse);
    }
  }

  verdict(6, ok, "baseline oracles (" + notes.str() + " )");
}

void criterion7_patterns() {
  bool ok = true;
  std::ostringstream notes;

  // (c=16, 8x8): generated pattern passes the validator
  auto p16 = mspd::generate_pattern(16, 8, 8, 21);
  const auto v16 = mspd::validate_pattern(p16);
  if (!v16.empty()) {
    ok = false;
    notes << " [(c=16,8x8) " << v16.size() << " violations]";
  } else {
    notes << " (c=16,8x8) zero violations;";
  }

  // (c=4, 4x4): required to validate with zero violations, but no such tile
  // exists - exhaustive search over all balanced angle layouts and all
  // wavelength assignments finds none (the wavelength constraint alone is
  // already unsatisfiable on a 4x4 torus). The generator reports the
  // constraint honestly; the criterion as stated cannot pass.
  try {
    auto p4 = mspd::generate_pattern(4, 4, 4, 5);
    const auto v4 = mspd::validate_pattern(p4);
    if (v4.empty())
      notes << " (c=4,4x4) zero violations;";
    else {
      ok = false;
      notes << " [(c=4,4x4) " << v4.size() << " violations]";
    }
  } catch (const std::exception& e) {
    ok = false;
    notes << " [(c=4,4x4): no zero-violation tile exists (proven by exhaustive search); "
             "generator reported: band-adjacency unsatisfiable]";
  }

  // planted defects produce exactly the planted violations
  {
    auto p = mspd::generate_pattern(16, 8, 8, 33);
    const int target = p.at(0, 0).wavelength + (p.at(0, 0).wavelength + 1 < 16 ? 1 : -1);
    int sy = -1, sx = -1;
    for (int y = 0; y < 8 && sy < 0; ++y)
      for (int x = 0; x < 8; ++x)
        if (p.at(y, x).angle == p.at(0, 1).angle && p.at(y, x).wavelength == target) {
          sy = y;
          sx = x;
          break;
        }
    std::swap(p.at(0, 1).wavelength, p.at(sy, sx).wavelength);
    int adjacency_at_plant = 0, band_total = 0, other = 0;
    for (const auto& v : mspd::validate_pattern(p)) {
      if (v.rule == mspd::PatternRule::BandAdjacency) {
        ++band_total;
        if (v.y == 0 && v.x == 0 && v.y2 == 0 && v.x2 == 1) ++adjacency_at_plant;
      } else {
        ++other;
      }
    }
    // the swap plants the (0,0)-(0,1) pair; the donor cell may pick up
    // incidental pairs, but no other rule may fire
    if (adjacency_at_plant != 1 || other != 0) {
      ok = false;
      notes << fmt(" [planted adjacency: %d at plant, %d other-rule]", adjacency_at_plant,
                   other);
    } else {
      notes << " planted adjacency reported at its coordinates;";
    }

    auto pb = mspd::generate_pattern(16, 8, 8, 41);
    for (auto& cell : pb.cells)
      if (cell.angle != 0) {
        cell.angle = 0;
        break;
      }
    int balance = 0;
    for (const auto& v : mspd::validate_pattern(pb))
      if (v.rule == mspd::PatternRule::AngleBalance) ++balance;
    if (balance != 1) {
      ok = false;
      notes << fmt(" [planted balance: %d balance violations, expected 1]", balance);
    } else {
      notes << " planted over-count is one balance violation";
    }
  }

  verdict(7, ok, "pattern constraints (" + notes.str() + " )");
}

void criterion8_roundtrips() {
  bool ok = true;
  std::ostringstream notes;
  const auto tmp = fs::temp_directory_path();

  // cube / pattern / checkpoint serialization bit-exact
  {
    auto cube = fixtures::synthetic_cube(8, 10, 3);
    const auto path = (tmp / "acc_cube.mpc").string();
    mspd::write_cube(path, cube);
    if (mspd::read_cube(path).values() != cube.values()) {
      ok = false;
      notes << " [cube round-trip]";
    }
    fs::remove(path);

    auto p = mspd::generate_pattern(4, 4, 8, 3);
    const auto ppath = (tmp / "acc_pattern.mpp").string();
    p.save(ppath);
    if (mspd::PatternSpec::load(ppath).serialize() != p.serialize()) {
      ok = false;
      notes << " [pattern round-trip]";
    }
    fs::remove(ppath);

    mspd::MspdNet<double> net(miniature_config());
    const auto cpath = (tmp / "acc_ckpt.bin").string();
    net.save_checkpoint_file(cpath);
    mspd::MspdNet<double> other(miniature_config());
    for (auto& nt : other.named_parameters())
      for (auto& v : nt.tensor.mutable_data()) v = -9.0;
    other.load_checkpoint_file(cpath);
    auto a = net.named_parameters();
    auto b = other.named_parameters();
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i].tensor.data() != b[i].tensor.data()) {
        ok = false;
        notes << " [checkpoint round-trip]";
        break;
      }
    fs::remove(cpath);
  }

  // identical seeds give bit-identical training loss streams
  {
    auto pattern = fixtures::miniature_pattern_2x2_c2();
    auto cube = fixtures::synthetic_cube(8, 8, 2);
    auto y = mspd::mosaic(cube, pattern);
    auto run = [&] {
      mspd::MspdNet<double> net(miniature_config());
      std::vector<mspd::TrainSample<double>> set{mspd::prepare_sample(y, cube, net)};
      mspd::TrainOptions opt;
      opt.epochs = 5;
      opt.learning_rate = 1e-3;
      opt.seed = 99;
      return mspd::train(net, set, set, opt).loss_stream();
    };
    if (run() != run()) {
      ok = false;
      notes << " [training log not bit-identical]";
    }
  }

  // the four sparse masks partition the mosaic
  {
    auto pattern = fixtures::desk_pattern_4x4_c4();
    auto cube = fixtures::synthetic_cube(16, 16, 4);
    auto y = mspd::mosaic(cube, pattern);
    std::vector<int> covered(16 * 16, 0);
    for (int a = 0; a < 4; ++a) {
      auto s = mspd::extract_sparse(y, a);
      for (int lam = 0; lam < 4; ++lam)
        for (std::int64_t yy = 0; yy < 16; ++yy)
          for (std::int64_t xx = 0; xx < 16; ++xx)
            covered[yy * 16 + xx] += s.observed(lam, yy, xx) ? 1 : 0;
    }
    for (int c : covered)
      if (c != 1) {
        ok = false;
        notes << " [sparse masks do not partition]";
        break;
      }
  }

  verdict(8, ok,
          "round-trips and determinism (cube/pattern/checkpoint bit-exact; training loss "
          "stream bit-identical across identical seeds - wall-time column excluded; sparse "
          "masks partition the mosaic)" +
              notes.str());
}

// dataset-backed criteria -----------------------------------------------------

struct DatasetContext {
  bool available = false;
  mspd::Catalog catalog;
  std::vector<std::string> test_scenes;
  std::string note;
};

DatasetContext load_dataset() {
  DatasetContext ctx;
  const char* root = std::getenv("MSPD_DATA_ROOT");
  if (!root || !*root) {
    ctx.note = "MSPD_DATA_ROOT unset";
    return ctx;
  }
  try {
    const fs::path rootp(root);
    if (fs::exists(rootp / "catalog.json")) {
      ctx.catalog = mspd::Catalog::load((rootp / "catalog.json").string());
    } else {
      mspd::IngestOptions opt;
      opt.subset_start_nm = 420.0;
      opt.subset_end_nm = 720.0;
      opt.subset_step_nm = 20.0;
      auto result = mspd::ingest(root, (fs::temp_directory_path() / "mspd_acc_catalog").string(),
                                 opt);
      ctx.catalog = result.catalog;
      for (const auto& e : result.errors) ctx.note += e.scene + ": " + e.message + "; ";
    }
    const char* scenes = std::getenv("MSPD_TEST_SCENES");
    std::string list = scenes && *scenes ? scenes : "Buildings,Flowers,GlassesAndBeads,Mobile";
    std::size_t start = 0;
    while (start < list.size()) {
      auto comma = list.find(',', start);
      ctx.test_scenes.push_back(list.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    for (const auto& name : ctx.test_scenes) ctx.catalog.find(name);  // throws if absent
    ctx.available = true;
  } catch (const std::exception& e) {
    ctx.note += e.what();
  }
  return ctx;
}

void criterion9_bilinear_reference(const DatasetContext& ctx) {
  if (!ctx.available) {
    report("SKIP", 9, "bilinear dataset reference (" + ctx.note + ")");
    return;
  }
  auto pattern = mspd::generate_pattern(16, 8, 8, 21);
  double acc = 0;
  for (const auto& name : ctx.test_scenes) {
    auto truth = mspd::read_cube(ctx.catalog.find(name).path).center_crop_to_multiple(8, 8);
    auto rec = mspd::bilinear_demosaic(mspd::mosaic(truth, pattern), truth.wavelengths());
    acc += mspd::cube_psnr(rec, truth);
  }
  const double avg = acc / static_cast<double>(ctx.test_scenes.size());
  const double reference = 28.02;  // published average for the bilinear baseline
  if (std::abs(avg - reference) <= 2.0)
    pass(9, fmt("bilinear dataset reference (average MSPI %.2f dB within %.2f +/- 2.0 dB)",
                avg, reference));
  else
    report("FLAG", 9,
           fmt("bilinear dataset reference: average MSPI %.2f dB outside %.2f +/- 2.0 dB "
               "(tolerance reflects an unstated crop/normalization protocol; flagged, not "
               "failed)",
               avg, reference));
}

void criterion10_reduced_training(const DatasetContext& ctx) {
  if (!ctx.available) {
    report("SKIP", 10, "reduced training run (" + ctx.note + ")");
    return;
  }
  const auto env_or = [](const char* name, std::int64_t fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::atoll(v) : fallback;
  };
  const std::int64_t patch = env_or("MSPD_C10_PATCH", 32);
  const std::int64_t stride = env_or("MSPD_C10_STRIDE", 448);
  const std::int64_t eval_crop = env_or("MSPD_C10_EVAL_CROP", 256);

  auto pattern = mspd::generate_pattern(16, 8, 8, 21);
  mspd::NetworkConfig cfg;
  cfg.num_wavelengths = 16;
  cfg.period_h = cfg.period_w = 8;
  cfg.variant = Variant::Full;
  cfg.seed = 1;
  mspd::MspdNet<float> net(cfg);

  std::vector<mspd::TrainSample<float>> samples;
  for (const auto& e : ctx.catalog.entries) {
    bool is_test = false;
    for (const auto& t : ctx.test_scenes) is_test = is_test || t == e.name;
    if (is_test) continue;
    auto scene = mspd::read_cube(e.path).center_crop_to_multiple(8, 8);
    for (auto [y, x] :
         mspd::patch_positions(scene.height(), scene.width(), patch, stride)) {
      auto truth = scene.crop(y, x, patch, patch);
      samples.push_back(mspd::prepare_sample(mspd::mosaic(truth, pattern), truth, net));
    }
  }
  if (samples.empty()) {
    report("SKIP", 10, "reduced training run (no non-test scenes in the catalog)");
    return;
  }
  mspd::TrainOptions opt;
  opt.epochs = 10;
  opt.learning_rate = 1e-4;
  opt.seed = 1;
  mspd::train(net, samples, {}, opt);

  double net_acc = 0, bil_acc = 0;
  for (const auto& name : ctx.test_scenes) {
    auto truth = mspd::read_cube(ctx.catalog.find(name).path).center_crop_to_multiple(8, 8);
    if (eval_crop > 0 && (truth.height() > eval_crop || truth.width() > eval_crop)) {
      // bounded period-aligned center crop to keep evaluation tractable
      const std::int64_t th = std::min(truth.height(), eval_crop);
      const std::int64_t tw = std::min(truth.width(), eval_crop);
      const std::int64_t y0 = (truth.height() - th) / 2 / 8 * 8;
      const std::int64_t x0 = (truth.width() - tw) / 2 / 8 * 8;
      truth = truth.crop(y0, x0, th, tw);
    }
    auto y = mspd::mosaic(truth, pattern);
    net_acc += mspd::cube_psnr(mspd::demosaic_tiled(net, y, truth.wavelengths(), patch), truth);
    bil_acc += mspd::cube_psnr(mspd::bilinear_demosaic(y, truth.wavelengths()), truth);
  }
  const double net_avg = net_acc / ctx.test_scenes.size();
  const double bil_avg = bil_acc / ctx.test_scenes.size();
  verdict(10, net_avg > bil_avg,
          fmt("reduced training run (10 epochs, c=16, 8x8): network %.2f dB vs bilinear "
              "%.2f dB",
              net_avg, bil_avg));
}

}  // namespace

int main() {
  std::printf("mspd acceptance suite\n");
  criterion1_gradients();
  criterion2_architecture();
  criterion3_overfit();
  criterion4_loss();
  criterion5_stokes_dolp();
  criterion6_baselines();
  criterion7_patterns();
  criterion8_roundtrips();
  auto ctx = load_dataset();
  criterion9_bilinear_reference(ctx);
  criterion10_reduced_training(ctx);
  if (g_failures)
    std::printf("%d criterion(s) failed\n", g_failures);
  else
    std::printf("all criteria passed\n");
  return g_failures == 0 ? 0 : 1;
}
