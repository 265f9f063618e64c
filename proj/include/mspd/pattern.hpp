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
#ifndef MSPD_PATTERN_HPP
#define MSPD_PATTERN_HPP

#include <array>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mspd/common.hpp"

namespace mspd {

// One cell of the periodic filter-array tile: which wavelength band and
// which polarization angle this pixel observes.
struct PatternCell {
  int wavelength = 0;  // index in [0, num_wavelengths)
  int angle = 0;       // index into kAngleDegrees
};

inline constexpr int kNumAngles = 4;
inline constexpr std::array<double, kNumAngles> kAngleDegrees{0.0, 45.0, 90.0, 135.0};

// Periodic h x w tile assigning one (wavelength, angle) band-pass filter to
// each pixel. The tile repeats over the sensor, so neighborhoods are toroidal.
struct PatternSpec {
  int period_h = 0;
  int period_w = 0;
  int num_wavelengths = 0;
  std::vector<PatternCell> cells;       // period_h * period_w, row-major
  std::vector<double> wavelengths_nm;   // optional metadata, empty or size num_wavelengths

  const PatternCell& at(int y, int x) const { return cells[y * period_w + x]; }
  PatternCell& at(int y, int x) { return cells[y * period_w + x]; }

  // cell seen by absolute sensor position (y, x)
  const PatternCell& sample(std::int64_t y, std::int64_t x) const {
    return cells[static_cast<std::size_t>((y % period_h) * period_w + (x % period_w))];
  }

  int occurrences(int wavelength, int angle) const {
    int n = 0;
    for (const auto& c : cells) n += (c.wavelength == wavelength && c.angle == angle);
    return n;
  }

  void check_structure() const {
    require(period_h > 0 && period_w > 0, "pattern: period must be positive, got ", period_h,
            "x", period_w);
    require(num_wavelengths > 0, "pattern: wavelength count must be positive");
    require(cells.size() == static_cast<std::size_t>(period_h) * period_w, "pattern: expected ",
            period_h * period_w, " cells, got ", cells.size());
    for (int y = 0; y < period_h; ++y)
      for (int x = 0; x < period_w; ++x) {
        const auto& c = at(y, x);
        require(c.wavelength >= 0 && c.wavelength < num_wavelengths, "pattern: cell (", y, ",",
                x, ") wavelength index ", c.wavelength, " out of [0,", num_wavelengths, ")");
        require(c.angle >= 0 && c.angle < kNumAngles, "pattern: cell (", y, ",", x,
                ") angle index ", c.angle, " out of [0,", kNumAngles, ")");
      }
    require(wavelengths_nm.empty() ||
                wavelengths_nm.size() == static_cast<std::size_t>(num_wavelengths),
            "pattern: wavelength list length ", wavelengths_nm.size(), " != ", num_wavelengths);
  }

  std::string serialize() const {
    std::ostringstream os;
    os << "MSPD-PATTERN 1\n";
    os << "period " << period_h << " " << period_w << "\n";
    os << "wavelengths " << num_wavelengths << "\n";
    if (!wavelengths_nm.empty()) {
      os << "wavelengths_nm";
      for (double nm : wavelengths_nm) os << " " << nm;
      os << "\n";
    }
    os << "cells\n";
    for (int y = 0; y < period_h; ++y) {
      for (int x = 0; x < period_w; ++x)
        os << (x ? " " : "") << at(y, x).wavelength << ":" << at(y, x).angle;
      os << "\n";
    }
    return os.str();
  }

  static PatternSpec parse(std::istream& is, const std::string& origin = "<stream>") {
    PatternSpec p;
    std::string line;
    std::getline(is, line);
    if (line != "MSPD-PATTERN 1") fail("pattern: bad magic in ", origin, ": '", line, "'");
    std::string word;
    while (is >> word) {
      if (word == "period") {
        is >> p.period_h >> p.period_w;
      } else if (word == "wavelengths") {
        is >> p.num_wavelengths;
      } else if (word == "wavelengths_nm") {
        if (p.num_wavelengths <= 0)
          fail("pattern: wavelengths_nm before the wavelength count in ", origin);
        p.wavelengths_nm.resize(p.num_wavelengths);
        for (auto& nm : p.wavelengths_nm) is >> nm;
      } else if (word == "cells") {
        p.cells.resize(static_cast<std::size_t>(p.period_h) * p.period_w);
        for (auto& c : p.cells) {
          std::string tok;
          is >> tok;
          const auto colon = tok.find(':');
          if (colon == std::string::npos) fail("pattern: malformed cell '", tok, "' in ", origin);
          c.wavelength = std::stoi(tok.substr(0, colon));
          c.angle = std::stoi(tok.substr(colon + 1));
        }
        break;
      } else {
        fail("pattern: unknown field '", word, "' in ", origin);
      }
    }
    if (!is) fail("pattern: truncated file ", origin);
    p.check_structure();
    return p;
  }

  void save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) fail("pattern: cannot open ", path, " for writing");
    os << serialize();
  }

  static PatternSpec load(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail("pattern: cannot open ", path);
    return parse(is, path);
  }

  // stable content hash, used to pin derived operators to their pattern
  std::uint64_t hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char ch : serialize()) h = (h ^ static_cast<unsigned char>(ch)) * 0x100000001b3ULL;
    return h;
  }
};

// ---------------------------------------------------------------------------
// validation
// ---------------------------------------------------------------------------

enum class PatternRule { AngleBalance, AngleBlock, PairCoverage, BandAdjacency };

inline const char* pattern_rule_name(PatternRule r) {
  switch (r) {
    case PatternRule::AngleBalance: return "angle-balance";
    case PatternRule::AngleBlock: return "angle-block";
    case PatternRule::PairCoverage: return "pair-coverage";
    case PatternRule::BandAdjacency: return "band-adjacency";
  }
  return "?";
}

struct PatternViolation {
  PatternRule rule;
  int y = -1, x = -1;    // primary cell, when applicable
  int y2 = -1, x2 = -1;  // second cell for adjacency pairs
  std::string message;
};

// Checks the generator's postconditions plus pair coverage:
//  - each angle appears exactly h*w/4 times;
//  - every toroidal 2x2 window contains all four angles;
//  - no toroidal 4-neighbors carry consecutive wavelength indices;
//  - when h*w >= 4c, every (wavelength, angle) pair occurs in the tile.
inline std::vector<PatternViolation> validate_pattern(const PatternSpec& p) {
  p.check_structure();
  std::vector<PatternViolation> out;
  const int h = p.period_h, w = p.period_w, c = p.num_wavelengths;

  std::array<int, kNumAngles> angle_count{};
  for (const auto& cell : p.cells) ++angle_count[cell.angle];
  for (int a = 0; a < kNumAngles; ++a)
    if (4 * angle_count[a] > h * w)
      out.push_back({PatternRule::AngleBalance, -1, -1, -1, -1,
                     detail::cat("angle-balance: angle ", a, " (", kAngleDegrees[a],
                                 " deg) appears ", angle_count[a], " times, expected ",
                                 h * w / 4)});

  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::array<bool, kNumAngles> seen{};
      seen[p.at(y, x).angle] = true;
      seen[p.at(y, (x + 1) % w).angle] = true;
      seen[p.at((y + 1) % h, x).angle] = true;
      seen[p.at((y + 1) % h, (x + 1) % w).angle] = true;
      if (!(seen[0] && seen[1] && seen[2] && seen[3]))
        out.push_back({PatternRule::AngleBlock, y, x, -1, -1,
                       detail::cat("angle-block: 2x2 window at (", y, ",", x,
                                   ") is missing a polarization angle")});
    }

  // each unordered toroidal edge visited once (right and down neighbors)
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (auto [dy, dx] : {std::pair{0, 1}, std::pair{1, 0}}) {
        const int y2 = (y + dy) % h, x2 = (x + dx) % w;
        const int li = p.at(y, x).wavelength, lj = p.at(y2, x2).wavelength;
        if (li - lj == 1 || lj - li == 1)
          out.push_back({PatternRule::BandAdjacency, y, x, y2, x2,
                         detail::cat("band-adjacency: consecutive bands ", li, " and ", lj,
                                     " at (", y, ",", x, ")-(", y2, ",", x2, ")")});
      }

  if (h * w >= 4 * c) {
    for (int lam = 0; lam < c; ++lam)
      for (int a = 0; a < kNumAngles; ++a)
        if (p.occurrences(lam, a) == 0)
          out.push_back({PatternRule::PairCoverage, -1, -1, -1, -1,
                         detail::cat("pair-coverage: (wavelength ", lam, ", angle ", a,
                                     ") never occurs in the tile")});
  }
  return out;
}

// ---------------------------------------------------------------------------
// generation
// ---------------------------------------------------------------------------

namespace detail {

inline int adjacency_violations_at(const std::vector<int>& lam, int h, int w, int y, int x) {
  const int li = lam[y * w + x];
  int v = 0;
  for (auto [dy, dx] : {std::pair{0, 1}, std::pair{1, 0}, std::pair{0, -1}, std::pair{-1, 0}}) {
    const int lj = lam[((y + dy + h) % h) * w + (x + dx + w) % w];
    v += (li - lj == 1 || lj - li == 1);
  }
  return v;
}

inline int adjacency_violations_total(const std::vector<int>& lam, int h, int w) {
  int v = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (auto [dy, dx] : {std::pair{0, 1}, std::pair{1, 0}}) {
        const int lj = lam[((y + dy) % h) * w + (x + dx) % w];
        const int li = lam[y * w + x];
        v += (li - lj == 1 || lj - li == 1);
      }
  return v;
}

}  // namespace detail

// Randomized greedy search with swap repair and bounded restarts.
// Deterministic for a fixed seed. Throws when the constraint family cannot
// be satisfied within the restart budget, naming the constraint.
inline PatternSpec generate_pattern(int num_wavelengths, int period_h, int period_w,
                                    std::uint64_t seed,
                                    const std::vector<double>& wavelengths_nm = {}) {
  const int c = num_wavelengths, h = period_h, w = period_w;
  require(c > 0 && h > 0 && w > 0, "generate_pattern: c/period must be positive");
  require((static_cast<std::int64_t>(h) * w) % (4 * c) == 0,
          "generate_pattern: period area ", h * w, " must be a multiple of 4*c = ", 4 * c);
  if (h % 2 != 0 || w % 2 != 0)
    fail("generate_pattern: angle-block constraint unsatisfiable for odd period ", h, "x", w,
         ": toroidal 2x2 windows cannot all contain four distinct angles");

  Rng rng(seed);
  const int per_pair = (h * w) / (4 * c);
  const int max_restarts = 40;
  const long max_iters = 600L * h * w;
  int best_violations = -1;

  for (int restart = 0; restart < max_restarts; ++restart) {
    Rng r = rng.fork(restart + 1);

    // angles on the 2x2 parity lattice (any permutation keeps every toroidal
    // 2x2 window complete and each angle at exactly h*w/4 occurrences)
    std::vector<int> angle_of_parity{0, 1, 2, 3};
    r.shuffle(angle_of_parity);
    std::vector<int> angle(static_cast<std::size_t>(h) * w);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) angle[y * w + x] = angle_of_parity[2 * (y % 2) + (x % 2)];

    // wavelengths: per parity class, a shuffled multiset with each band
    // exactly per_pair times; repaired by same-class swaps
    std::vector<std::vector<int>> class_cells(4);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) class_cells[2 * (y % 2) + (x % 2)].push_back(y * w + x);
    std::vector<int> lam(static_cast<std::size_t>(h) * w, 0);
    for (auto& cells : class_cells) {
      std::vector<int> bag;
      for (int l = 0; l < c; ++l) bag.insert(bag.end(), per_pair, l);
      r.shuffle(bag);
      for (std::size_t i = 0; i < cells.size(); ++i) lam[cells[i]] = bag[i];
    }

    int total = detail::adjacency_violations_total(lam, h, w);
    for (long it = 0; it < max_iters && total > 0; ++it) {
      auto& cells = class_cells[r.index(4)];
      const int a = cells[r.index(cells.size())];
      const int b = cells[r.index(cells.size())];
      if (a == b || lam[a] == lam[b]) continue;
      const int ay = a / w, ax = a % w, by = b / w, bx = b % w;
      // same-parity cells are never 4-neighbors, so their incident edge sets
      // are disjoint and the delta is local
      const int before = detail::adjacency_violations_at(lam, h, w, ay, ax) +
                         detail::adjacency_violations_at(lam, h, w, by, bx);
      std::swap(lam[a], lam[b]);
      const int after = detail::adjacency_violations_at(lam, h, w, ay, ax) +
                        detail::adjacency_violations_at(lam, h, w, by, bx);
      if (after > before || (after == before && r.uniform() < 0.5)) {
        std::swap(lam[a], lam[b]);  // reject
      } else {
        total += after - before;
      }
    }

    if (best_violations < 0 || total < best_violations) best_violations = total;
    if (total == 0) {
      PatternSpec p;
      p.period_h = h;
      p.period_w = w;
      p.num_wavelengths = c;
      p.wavelengths_nm = wavelengths_nm;
      p.cells.resize(static_cast<std::size_t>(h) * w);
      for (int i = 0; i < h * w; ++i) p.cells[i] = {lam[i], angle[i]};
      p.check_structure();
      return p;
    }
  }

  fail("generate_pattern: band-adjacency constraint unsatisfied for c=", c, ", period ", h, "x",
       w, " after ", max_restarts, " restarts (best attempt left ", best_violations,
       " adjacent consecutive-band pairs); no two toroidal 4-neighbors may carry wavelength "
       "indices differing by 1");
}

}  // namespace mspd

#endif  // MSPD_PATTERN_HPP
