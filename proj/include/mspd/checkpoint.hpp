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
#ifndef MSPD_CHECKPOINT_HPP
#define MSPD_CHECKPOINT_HPP

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "mspd/tensor.hpp"

namespace mspd {

// Parameter checkpoint: a text manifest (names, shapes, dtype) followed by
// the raw little-endian buffers back to back, in manifest order.
//
//   MSPD-CHECKPOINT 1
//   dtype float64
//   tensors <count>
//   tensor <name> <ndim> <d0> <d1> ...
//   ...
//   DATA
//   <raw bytes>
//
// Round-trips are bit-exact.

template <class T>
struct NamedTensor {
  std::string name;
  Tensor<T> tensor;
};

namespace detail {

template <class T>
const char* dtype_name() {
  if constexpr (std::is_same_v<T, double>)
    return "float64";
  else if constexpr (std::is_same_v<T, float>)
    return "float32";
  else
    static_assert(sizeof(T) == 0, "unsupported checkpoint dtype");
}

}  // namespace detail

template <class T>
void save_checkpoint(const std::string& path, const std::vector<NamedTensor<T>>& tensors) {
  require_little_endian();
  std::ofstream os(path, std::ios::binary);
  if (!os) fail("checkpoint: cannot open ", path, " for writing");
  os << "MSPD-CHECKPOINT 1\n";
  os << "dtype " << detail::dtype_name<T>() << "\n";
  os << "tensors " << tensors.size() << "\n";
  for (const auto& nt : tensors) {
    require(nt.name.find_first_of(" \t\n") == std::string::npos,
            "checkpoint: tensor name contains whitespace: '", nt.name, "'");
    os << "tensor " << nt.name << " " << nt.tensor.ndim();
    for (auto d : nt.tensor.shape()) os << " " << d;
    os << "\n";
  }
  os << "DATA\n";
  for (const auto& nt : tensors)
    os.write(reinterpret_cast<const char*>(nt.tensor.data().data()),
             static_cast<std::streamsize>(nt.tensor.data().size() * sizeof(T)));
  if (!os) fail("checkpoint: short write to ", path);
}

template <class T>
std::vector<NamedTensor<T>> load_checkpoint(const std::string& path) {
  require_little_endian();
  std::ifstream is(path, std::ios::binary);
  if (!is) fail("checkpoint: cannot open ", path);
  std::string line;
  std::getline(is, line);
  if (line != "MSPD-CHECKPOINT 1") fail("checkpoint: bad magic in ", path, ": '", line, "'");
  std::string word, dtype;
  std::size_t count = 0;
  is >> word >> dtype;
  if (word != "dtype" || dtype != detail::dtype_name<T>())
    fail("checkpoint: dtype mismatch in ", path, ": file holds ", dtype, ", expected ",
         detail::dtype_name<T>());
  is >> word >> count;
  if (word != "tensors") fail("checkpoint: malformed manifest in ", path);

  std::vector<NamedTensor<T>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::string name;
    std::size_t ndim = 0;
    is >> word >> name >> ndim;
    if (word != "tensor") fail("checkpoint: malformed tensor entry ", i, " in ", path);
    Shape shape(ndim);
    for (auto& d : shape) is >> d;
    out.push_back({name, Tensor<T>::zeros(std::move(shape))});
  }
  is >> word;
  std::getline(is, line);  // consume newline after DATA
  if (word != "DATA") fail("checkpoint: missing DATA section in ", path);
  for (auto& nt : out) {
    is.read(reinterpret_cast<char*>(nt.tensor.mutable_data().data()),
            static_cast<std::streamsize>(nt.tensor.data().size() * sizeof(T)));
    if (!is) fail("checkpoint: truncated buffer for tensor ", nt.name, " in ", path);
  }
  return out;
}

}  // namespace mspd

#endif  // MSPD_CHECKPOINT_HPP
