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
#ifndef MSPD_TESTS_SUPPORT_FIXTURES_HPP
#define MSPD_TESTS_SUPPORT_FIXTURES_HPP

#include <cmath>
#include <vector>

#include "mspd/image.hpp"
#include "mspd/pattern.hpp"

namespace fixtures {

inline std::vector<double> wavelengths_nm(int c, double start = 420.0, double step = 20.0) {
  std::vector<double> nm(c);
  for (int i = 0; i < c; ++i) nm[i] = start + step * i;
  return nm;
}

// 4x4 / c=4 desk tile: perfect angle layout and full pair coverage. A tile
// this small cannot also avoid consecutive-band adjacency (no such grid
// exists), so this fixture carries the provably minimal four adjacency
// pairs and is used where only a pattern's routing matters.
inline mspd::PatternSpec desk_pattern_4x4_c4() {
  mspd::PatternSpec p;
  p.period_h = p.period_w = 4;
  p.num_wavelengths = 4;
  p.wavelengths_nm = wavelengths_nm(4);
  const int lam[4][4] = {{0, 2, 1, 3}, {0, 2, 1, 3}, {2, 0, 3, 1}, {2, 0, 3, 1}};
  p.cells.resize(16);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) p.at(y, x) = {lam[y][x], 2 * (y % 2) + (x % 2)};
  p.check_structure();
  return p;
}

// 2x2 / c=2 miniature: four cells cannot cover all eight (wavelength, angle)
// pairs, which the pattern type permits below the coverage threshold.
inline mspd::PatternSpec miniature_pattern_2x2_c2() {
  mspd::PatternSpec p;
  p.period_h = p.period_w = 2;
  p.num_wavelengths = 2;
  p.wavelengths_nm = wavelengths_nm(2, 460.0, 160.0);
  p.cells = {{0, 0}, {1, 1}, {1, 2}, {0, 3}};
  p.check_structure();
  return p;
}

// Smooth, physically consistent multispectral polarization scene built from
// Stokes fields: I_theta = (S0 + S1 cos 2theta + S2 sin 2theta) / 2 with
// |S1,S2| bounded by S0, so all intensities are non-negative and DoLP <= 1.
inline mspd::ImageCube synthetic_cube(std::int64_t m, std::int64_t n, int c,
                                      double detail_scale = 1.0) {
  mspd::ImageCube cube(m, n, wavelengths_nm(c));
  const double tau = 6.283185307179586;
  for (int lam = 0; lam < c; ++lam) {
    const double phase = tau * lam / std::max(1, c);
    for (std::int64_t y = 0; y < m; ++y)
      for (std::int64_t x = 0; x < n; ++x) {
        const double u = static_cast<double>(x) / static_cast<double>(n);
        const double v = static_cast<double>(y) / static_cast<double>(m);
        const double s0 =
            0.55 + 0.25 * std::sin(tau * detail_scale * u + phase) *
                       std::cos(tau * detail_scale * v - 0.5 * phase);
        const double rho = 0.3 + 0.25 * std::sin(tau * (u + v) + phase);  // degree in [0.05,0.55]
        const double chi = tau * (u - v) + phase;                          // polarization angle
        const double s1 = rho * s0 * std::cos(chi);
        const double s2 = rho * s0 * std::sin(chi);
        const double intensities[4] = {(s0 + s1) / 2.0, (s0 + s2) / 2.0, (s0 - s1) / 2.0,
                                       (s0 - s2) / 2.0};
        for (int a = 0; a < 4; ++a) cube.at(y, x, lam, a) = intensities[a];
      }
  }
  return cube;
}

}  // namespace fixtures

#endif  // MSPD_TESTS_SUPPORT_FIXTURES_HPP
