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
#ifndef MSPD_ADAM_HPP
#define MSPD_ADAM_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mspd/tensor.hpp"

namespace mspd {

template <class T>
struct AdamState {
  std::int64_t step = 0;
  T alpha = T(1e-4);
  T beta1 = T(0.9);
  T beta2 = T(0.999);
  T epsilon = T(1e-8);
  std::vector<std::vector<T>> first_moment;
  std::vector<std::vector<T>> second_moment;

  static AdamState init(const std::vector<std::size_t>& param_sizes, T alpha, T beta1 = T(0.9),
                        T beta2 = T(0.999), T epsilon = T(1e-8)) {
    require(beta1 > T(0) && beta1 < T(1) && beta2 > T(0) && beta2 < T(1),
            "adam: decay rates must lie in (0,1)");
    require(epsilon > T(0), "adam: epsilon must be positive");
    AdamState st;
    st.alpha = alpha;
    st.beta1 = beta1;
    st.beta2 = beta2;
    st.epsilon = epsilon;
    for (auto n : param_sizes) {
      st.first_moment.emplace_back(n, T(0));
      st.second_moment.emplace_back(n, T(0));
    }
    return st;
  }
};

// One Adam update with bias correction over flat parameter buffers.
// `names`, when given, is used in the NaN-gradient diagnostic.
template <class T>
void adam_step(std::vector<std::vector<T>*> params, const std::vector<const std::vector<T>*>& grads,
               AdamState<T>& state, const std::vector<std::string>* names = nullptr) {
  require(params.size() == grads.size() && params.size() == state.first_moment.size(),
          "adam: got ", params.size(), " parameters, ", grads.size(), " gradients, state for ",
          state.first_moment.size());
  ++state.step;
  const T bc1 = T(1) - std::pow(state.beta1, static_cast<T>(state.step));
  const T bc2 = T(1) - std::pow(state.beta2, static_cast<T>(state.step));
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto& w = *params[p];
    const auto& g = *grads[p];
    auto& m = state.first_moment[p];
    auto& v = state.second_moment[p];
    require(w.size() == g.size() && w.size() == m.size(), "adam: parameter ", p,
            " buffer sizes disagree (", w.size(), "/", g.size(), "/", m.size(), ")");
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (std::isnan(g[i]))
        fail("adam: NaN gradient in parameter ",
             names && p < names->size() ? (*names)[p] : std::to_string(p), " at index ", i,
             " (step ", state.step, ")");
      m[i] = state.beta1 * m[i] + (T(1) - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (T(1) - state.beta2) * g[i] * g[i];
      const T mhat = m[i] / bc1;
      const T vhat = v[i] / bc2;
      w[i] -= state.alpha * mhat / (std::sqrt(vhat) + state.epsilon);
    }
  }
}

// convenience wrapper over parameter tensors carrying attached gradients
template <class T>
void adam_step(std::vector<Tensor<T>>& params, AdamState<T>& state,
               const std::vector<std::string>* names = nullptr) {
  std::vector<std::vector<T>*> ws;
  std::vector<const std::vector<T>*> gs;
  for (auto& p : params) {
    require(p.has_grad(), "adam: parameter ", ws.size(), " has no gradient attached");
    ws.push_back(&p.mutable_data());
    gs.push_back(&p.grad());
  }
  adam_step(std::move(ws), gs, state, names);
}

}  // namespace mspd

#endif  // MSPD_ADAM_HPP
