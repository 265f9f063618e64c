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
#ifndef MSPD_COMMON_HPP
#define MSPD_COMMON_HPP

#include <bit>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mspd {

namespace detail {

template <class... Args>
std::string cat(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

}  // namespace detail

template <class... Args>
[[noreturn]] void fail(Args&&... args) {
  throw std::runtime_error(detail::cat(std::forward<Args>(args)...));
}

template <class... Args>
void require(bool cond, Args&&... args) {
  if (!cond) throw std::invalid_argument(detail::cat(std::forward<Args>(args)...));
}

// Serialized buffers are little-endian by contract; refuse to run elsewhere
// rather than silently writing swapped files.
inline void require_little_endian() {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  if constexpr (std::endian::native != std::endian::little)
    throw std::runtime_error("mspd: file formats require a little-endian host");
}

// Deterministic RNG. The standard distributions are implementation-defined,
// so uniform draws are derived from raw mt19937_64 output directly: the same
// seed gives the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // uniform in [0, 1) with 53-bit resolution
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // unbiased uniform index in [0, n)
  std::size_t index(std::size_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
  }

  // independent stream for a named substream (parameter init, split, ...)
  Rng fork(std::uint64_t salt) {
    std::uint64_t x = gen_() ^ (salt * 0x9e3779b97f4a7c15ULL);
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return Rng(x ^ (x >> 31));
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace mspd

#endif  // MSPD_COMMON_HPP
