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
#ifndef MSPD_BASELINES_HPP
#define MSPD_BASELINES_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "mspd/image.hpp"

namespace mspd {

// ---------------------------------------------------------------------------
// bilinear interpolation baseline
// ---------------------------------------------------------------------------

// One channel of the separable interpolation: scatter this channel's
// observed samples, fill each sampled row by linear interpolation between
// its samples (nearest extension beyond the first/last), then fill every
// column the same way across the sampled rows. Exact for affine planes
// inside the sample hull; the identity when every pixel is observed.
inline std::vector<double> bilinear_channel(const MosaicImage& y, int lam, int ang) {
  const auto& p = y.pattern();
  if (p.occurrences(lam, ang) == 0)
    fail("bilinear: channel (wavelength ", lam, ", angle ", ang,
         ") is never observed by the pattern");
  const std::int64_t m = y.height(), n = y.width();
  std::vector<double> plane(static_cast<std::size_t>(m * n));

  // columns of this channel within one tile row
  std::vector<std::vector<int>> tile_cols(p.period_h);
  for (int ty = 0; ty < p.period_h; ++ty)
    for (int tx = 0; tx < p.period_w; ++tx)
      if (p.at(ty, tx).wavelength == lam && p.at(ty, tx).angle == ang)
        tile_cols[ty].push_back(tx);

  std::vector<std::int64_t> sampled_rows;
  std::vector<std::int64_t> row_samples;
  for (std::int64_t yy = 0; yy < m; ++yy) {
    const auto& cols = tile_cols[yy % p.period_h];
    if (cols.empty()) continue;
    sampled_rows.push_back(yy);
    row_samples.clear();
    for (std::int64_t xb = 0; xb < n; xb += p.period_w)
      for (int tx : cols) row_samples.push_back(xb + tx);

    double* row = plane.data() + yy * n;
    // nearest extension before the first and after the last sample
    for (std::int64_t x = 0; x <= row_samples.front(); ++x)
      row[x] = y.at(yy, row_samples.front());
    for (std::int64_t x = row_samples.back(); x < n; ++x)
      row[x] = y.at(yy, row_samples.back());
    for (std::size_t s = 0; s + 1 < row_samples.size(); ++s) {
      const std::int64_t xl = row_samples[s], xr = row_samples[s + 1];
      const double vl = y.at(yy, xl), vr = y.at(yy, xr);
      row[xl] = vl;
      for (std::int64_t x = xl + 1; x < xr; ++x)
        row[x] = vl + (vr - vl) * static_cast<double>(x - xl) / static_cast<double>(xr - xl);
    }
  }

  // columns: interpolate across the sampled rows
  for (std::int64_t x = 0; x < n; ++x) {
    for (std::int64_t yy = 0; yy < sampled_rows.front(); ++yy)
      plane[yy * n + x] = plane[sampled_rows.front() * n + x];
    for (std::int64_t yy = sampled_rows.back() + 1; yy < m; ++yy)
      plane[yy * n + x] = plane[sampled_rows.back() * n + x];
    for (std::size_t s = 0; s + 1 < sampled_rows.size(); ++s) {
      const std::int64_t yl = sampled_rows[s], yr = sampled_rows[s + 1];
      const double vl = plane[yl * n + x], vr = plane[yr * n + x];
      for (std::int64_t yy = yl + 1; yy < yr; ++yy)
        plane[yy * n + x] =
            vl + (vr - vl) * static_cast<double>(yy - yl) / static_cast<double>(yr - yl);
    }
  }
  return plane;
}

inline ImageCube bilinear_demosaic(const MosaicImage& y,
                                   const std::vector<double>& wavelengths_nm) {
  const auto& p = y.pattern();
  require(static_cast<int>(wavelengths_nm.size()) == p.num_wavelengths,
          "bilinear: wavelength list has ", wavelengths_nm.size(), " entries, pattern expects ",
          p.num_wavelengths);
  ImageCube out(y.height(), y.width(), wavelengths_nm);
  for (int ang = 0; ang < kNumAngles; ++ang)
    for (int lam = 0; lam < p.num_wavelengths; ++lam) {
      auto plane = bilinear_channel(y, lam, ang);
      std::copy(plane.begin(), plane.end(), out.plane(ang, lam));
    }
  return out;
}

// ---------------------------------------------------------------------------
// Wiener (linear minimum-MSE) baseline
// ---------------------------------------------------------------------------

// Blockwise linear estimator: for every tile-aligned position, the full
// (h x w x c x 4) cube block is predicted from the mosaic context window
// (the tile plus a margin on each side) by W = R_xy (R_yy + rho I)^-1,
// estimated from empirical second moments over the training cubes.
struct WienerOperator {
  PatternSpec pattern;
  int margin_h = 0;
  int margin_w = 0;
  double rho = 0.0;                  // absolute ridge weight used in the solve
  double normal_eq_residual = 0.0;   // relative residual recorded at training time
  Eigen::MatrixXd weights;           // block_dim x ctx_dim

  std::int64_t ctx_h() const { return pattern.period_h + 2 * margin_h; }
  std::int64_t ctx_w() const { return pattern.period_w + 2 * margin_w; }
  std::int64_t ctx_dim() const { return ctx_h() * ctx_w(); }
  std::int64_t block_dim() const {
    return static_cast<std::int64_t>(pattern.period_h) * pattern.period_w *
           pattern.num_wavelengths * kNumAngles;
  }

  void save(const std::string& path) const {
    require_little_endian();
    std::ofstream os(path, std::ios::binary);
    if (!os) fail("wiener: cannot open ", path, " for writing");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", rho);
    os << "MSPD-WIENER 1\n";
    os << "margin " << margin_h << " " << margin_w << "\n";
    os << "rho " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", normal_eq_residual);
    os << "residual " << buf << "\n";
    os << "pattern_hash " << pattern.hash() << "\n";
    os << pattern.serialize();
    os << "DATA\n";
    os.write(reinterpret_cast<const char*>(weights.data()),
             static_cast<std::streamsize>(sizeof(double) * weights.size()));
    if (!os) fail("wiener: short write to ", path);
  }

  static WienerOperator load(const std::string& path) {
    require_little_endian();
    std::ifstream is(path, std::ios::binary);
    if (!is) fail("wiener: cannot open ", path);
    std::string line, word;
    std::getline(is, line);
    if (line != "MSPD-WIENER 1") fail("wiener: bad magic in ", path);
    WienerOperator op;
    std::uint64_t stored_hash = 0;
    is >> word >> op.margin_h >> op.margin_w;
    if (word != "margin") fail("wiener: malformed header in ", path);
    is >> word >> op.rho;
    if (word != "rho") fail("wiener: malformed header in ", path);
    is >> word >> op.normal_eq_residual;
    if (word != "residual") fail("wiener: malformed header in ", path);
    is >> word >> stored_hash;
    if (word != "pattern_hash") fail("wiener: malformed header in ", path);
    is.get();
    op.pattern = PatternSpec::parse(is, path);
    if (op.pattern.hash() != stored_hash)
      fail("wiener: pattern hash mismatch in ", path, " (file corrupted?)");
    detail::expect_data_marker(is, path);
    op.weights.resize(op.block_dim(), op.ctx_dim());
    is.read(reinterpret_cast<char*>(op.weights.data()),
            static_cast<std::streamsize>(sizeof(double) * op.weights.size()));
    if (!is) fail("wiener: truncated weight matrix in ", path);
    return op;
  }
};

namespace detail {

inline void gather_context(const MosaicImage& mos, std::int64_t ty, std::int64_t tx,
                           std::int64_t ctx_h, std::int64_t ctx_w, std::int64_t margin_h,
                           std::int64_t margin_w, Eigen::VectorXd& out) {
  const std::int64_t m = mos.height(), n = mos.width();
  std::int64_t idx = 0;
  for (std::int64_t ry = 0; ry < ctx_h; ++ry) {
    const std::int64_t yy = std::clamp(ty - margin_h + ry, std::int64_t(0), m - 1);
    for (std::int64_t rx = 0; rx < ctx_w; ++rx) {
      const std::int64_t xx = std::clamp(tx - margin_w + rx, std::int64_t(0), n - 1);
      out[idx++] = mos.at(yy, xx);
    }
  }
}

}  // namespace detail

// margin defaults to one tile period per side; rho_relative scales the mean
// diagonal of R_yy.
inline WienerOperator wiener_train(const std::vector<ImageCube>& training_cubes,
                                   const PatternSpec& pattern, int margin_h = -1,
                                   int margin_w = -1, double rho_relative = 1e-4) {
  require(!training_cubes.empty(), "wiener: no training cubes");
  WienerOperator op;
  op.pattern = pattern;
  op.margin_h = margin_h < 0 ? pattern.period_h : margin_h;
  op.margin_w = margin_w < 0 ? pattern.period_w : margin_w;

  const std::int64_t bd = op.block_dim(), cd = op.ctx_dim();
  Eigen::MatrixXd ryy = Eigen::MatrixXd::Zero(cd, cd);
  Eigen::MatrixXd rxy = Eigen::MatrixXd::Zero(bd, cd);
  Eigen::VectorXd ctx(cd), blk(bd);
  std::int64_t samples = 0;

  const int h = pattern.period_h, w = pattern.period_w, c = pattern.num_wavelengths;
  for (const auto& cube : training_cubes) {
    require(static_cast<int>(cube.num_wavelengths()) == c, "wiener: cube has ",
            cube.num_wavelengths(), " wavelengths, pattern expects ", c);
    require(cube.height() % h == 0 && cube.width() % w == 0, "wiener: cube ", cube.height(),
            "x", cube.width(), " is not tile-aligned to ", h, "x", w);
    auto mos = mosaic(cube, pattern);
    for (std::int64_t ty = 0; ty < cube.height(); ty += h)
      for (std::int64_t tx = 0; tx < cube.width(); tx += w) {
        detail::gather_context(mos, ty, tx, op.ctx_h(), op.ctx_w(), op.margin_h, op.margin_w,
                               ctx);
        std::int64_t idx = 0;
        for (int ang = 0; ang < kNumAngles; ++ang)
          for (int lam = 0; lam < c; ++lam)
            for (int dy = 0; dy < h; ++dy)
              for (int dx = 0; dx < w; ++dx) blk[idx++] = cube.at(ty + dy, tx + dx, lam, ang);
        ryy.selfadjointView<Eigen::Lower>().rankUpdate(ctx);
        rxy.noalias() += blk * ctx.transpose();
        ++samples;
      }
  }
  require(samples > 0, "wiener: training cubes contain no tile positions");
  Eigen::MatrixXd ryy_full = ryy.selfadjointView<Eigen::Lower>();
  ryy = ryy_full;

  op.rho = rho_relative * ryy.diagonal().mean();
  Eigen::MatrixXd reg = ryy + op.rho * Eigen::MatrixXd::Identity(cd, cd);
  auto ldlt = reg.ldlt();
  if (ldlt.info() != Eigen::Success)
    fail("wiener: regularized normal equations are not solvable (rho=", op.rho,
         ", context dim ", cd, ", ", samples, " samples); increase rho or training data");
  Eigen::MatrixXd wt = ldlt.solve(rxy.transpose());
  op.weights = wt.transpose();
  if (!op.weights.allFinite())
    fail("wiener: solve produced non-finite weights (rho=", op.rho, ", context dim ", cd,
         "); the system is ill-conditioned");

  const double scale = std::max(rxy.norm(), 1e-300);
  op.normal_eq_residual = (reg * wt - rxy.transpose()).norm() / scale;
  return op;
}

inline ImageCube wiener_demosaic(const MosaicImage& y, const WienerOperator& op,
                                 const std::vector<double>& wavelengths_nm) {
  require(y.pattern().hash() == op.pattern.hash(),
          "wiener: mosaic pattern does not match the operator's pattern (hash ",
          y.pattern().hash(), " vs ", op.pattern.hash(), ")");
  require(static_cast<int>(wavelengths_nm.size()) == op.pattern.num_wavelengths,
          "wiener: wavelength list has ", wavelengths_nm.size(), " entries, pattern expects ",
          op.pattern.num_wavelengths);
  const int h = op.pattern.period_h, w = op.pattern.period_w, c = op.pattern.num_wavelengths;
  ImageCube out(y.height(), y.width(), wavelengths_nm);
  Eigen::VectorXd ctx(op.ctx_dim());
  for (std::int64_t ty = 0; ty < y.height(); ty += h)
    for (std::int64_t tx = 0; tx < y.width(); tx += w) {
      detail::gather_context(y, ty, tx, op.ctx_h(), op.ctx_w(), op.margin_h, op.margin_w, ctx);
      Eigen::VectorXd blk = op.weights * ctx;
      std::int64_t idx = 0;
      for (int ang = 0; ang < kNumAngles; ++ang)
        for (int lam = 0; lam < c; ++lam)
          for (int dy = 0; dy < h; ++dy)
            for (int dx = 0; dx < w; ++dx) out.at(ty + dy, tx + dx, lam, ang) = blk[idx++];
    }
  return out;
}

}  // namespace mspd

#endif  // MSPD_BASELINES_HPP
