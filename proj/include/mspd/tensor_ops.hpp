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
#ifndef MSPD_TENSOR_OPS_HPP
#define MSPD_TENSOR_OPS_HPP

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "mspd/tensor.hpp"

namespace mspd {

namespace detail {

template <class T>
Tensor<T> make_op(Shape shape, std::vector<T> data, std::vector<Tensor<T>> parents,
                  std::function<void(TensorNode<T>&)> backprop) {
  auto node = std::make_shared<TensorNode<T>>();
  node->shape = std::move(shape);
  node->data = std::move(data);
  bool rg = false;
  if (grad_enabled())
    for (const auto& p : parents) rg = rg || p.requires_grad();
  node->requires_grad = rg;
  if (rg) {
    node->parents = std::move(parents);
    node->backprop = std::move(backprop);
  }
  return Tensor<T>(std::move(node));
}

template <class T>
void accumulate(TensorNode<T>* n, std::size_t offset, const T* g, std::size_t count) {
  n->ensure_grad();
  T* dst = n->grad.data() + offset;
  for (std::size_t i = 0; i < count; ++i) dst[i] += g[i];
}

}  // namespace detail

// ---------------------------------------------------------------------------
// elementwise ops
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> relu(const Tensor<T>& x) {
  std::vector<T> out(x.data().size());
  const auto& in = x.data();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > T(0) ? in[i] : T(0);
  return detail::make_op<T>(x.shape(), std::move(out), {x}, [](TensorNode<T>& self) {
    auto* p = self.parents[0].node();
    if (!p->requires_grad) return;
    p->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i)
      if (p->data[i] > T(0)) p->grad[i] += self.grad[i];
  });
}

template <class T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  require(a.shape() == b.shape(), "add: shape mismatch ", shape_str(a.shape()), " vs ",
          shape_str(b.shape()));
  std::vector<T> out(a.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return detail::make_op<T>(a.shape(), std::move(out), {a, b}, [](TensorNode<T>& self) {
    for (int k = 0; k < 2; ++k) {
      auto* p = self.parents[k].node();
      if (p->requires_grad) detail::accumulate(p, 0, self.grad.data(), self.grad.size());
    }
  });
}

template <class T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  require(a.shape() == b.shape(), "sub: shape mismatch ", shape_str(a.shape()), " vs ",
          shape_str(b.shape()));
  std::vector<T> out(a.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
  return detail::make_op<T>(a.shape(), std::move(out), {a, b}, [](TensorNode<T>& self) {
    auto* pa = self.parents[0].node();
    auto* pb = self.parents[1].node();
    if (pa->requires_grad) detail::accumulate(pa, 0, self.grad.data(), self.grad.size());
    if (pb->requires_grad) {
      pb->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) pb->grad[i] -= self.grad[i];
    }
  });
}

template <class T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  require(a.shape() == b.shape(), "mul: shape mismatch ", shape_str(a.shape()), " vs ",
          shape_str(b.shape()));
  std::vector<T> out(a.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  return detail::make_op<T>(a.shape(), std::move(out), {a, b}, [](TensorNode<T>& self) {
    auto* pa = self.parents[0].node();
    auto* pb = self.parents[1].node();
    if (pa->requires_grad) {
      pa->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) pa->grad[i] += self.grad[i] * pb->data[i];
    }
    if (pb->requires_grad) {
      pb->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) pb->grad[i] += self.grad[i] * pa->data[i];
    }
  });
}

template <class T>
Tensor<T> scale(const Tensor<T>& x, T factor) {
  std::vector<T> out(x.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.data()[i] * factor;
  return detail::make_op<T>(x.shape(), std::move(out), {x}, [factor](TensorNode<T>& self) {
    auto* p = self.parents[0].node();
    if (!p->requires_grad) return;
    p->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) p->grad[i] += factor * self.grad[i];
  });
}

template <class T>
Tensor<T> sum(const Tensor<T>& x) {
  T acc = 0;
  for (T v : x.data()) acc += v;
  return detail::make_op<T>(Shape{}, std::vector<T>{acc}, {x}, [](TensorNode<T>& self) {
    auto* p = self.parents[0].node();
    if (!p->requires_grad) return;
    p->ensure_grad();
    const T g = self.grad[0];
    for (auto& gi : p->grad) gi += g;
  });
}

// ---------------------------------------------------------------------------
// structural ops
// ---------------------------------------------------------------------------

template <class T>
Tensor<T> concat(const std::vector<Tensor<T>>& parts, std::size_t axis) {
  require(!parts.empty(), "concat: no parts");
  const Shape& s0 = parts[0].shape();
  require(axis < s0.size(), "concat: axis ", axis, " out of range for rank ", s0.size());
  std::int64_t axis_total = 0;
  for (const auto& p : parts) {
    require(p.ndim() == s0.size(), "concat: rank mismatch ", shape_str(p.shape()), " vs ",
            shape_str(s0));
    for (std::size_t d = 0; d < s0.size(); ++d)
      require(d == axis || p.shape()[d] == s0[d], "concat: dim ", d, " mismatch ",
              shape_str(p.shape()), " vs ", shape_str(s0));
    axis_total += p.shape()[axis];
  }
  Shape out_shape = s0;
  out_shape[axis] = axis_total;

  std::int64_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= s0[d];
  for (std::size_t d = axis + 1; d < s0.size(); ++d) inner *= s0[d];

  std::vector<T> out(static_cast<std::size_t>(shape_numel(out_shape)));
  std::int64_t off = 0;
  for (const auto& p : parts) {
    const std::int64_t block = p.shape()[axis] * inner;
    for (std::int64_t o = 0; o < outer; ++o)
      std::copy_n(p.data().data() + o * block, block,
                  out.data() + o * axis_total * inner + off * inner);
    off += p.shape()[axis];
  }

  auto bp = [axis, outer, inner, axis_total](TensorNode<T>& self) {
    std::int64_t off = 0;
    for (auto& parent : self.parents) {
      auto* p = parent.node();
      const std::int64_t extent = p->shape[axis];
      const std::int64_t block = extent * inner;
      if (p->requires_grad) {
        p->ensure_grad();
        for (std::int64_t o = 0; o < outer; ++o) {
          const T* g = self.grad.data() + o * axis_total * inner + off * inner;
          T* dst = p->grad.data() + o * block;
          for (std::int64_t i = 0; i < block; ++i) dst[i] += g[i];
        }
      }
      off += extent;
    }
  };
  return detail::make_op<T>(std::move(out_shape), std::move(out), parts, std::move(bp));
}

template <class T>
Tensor<T> slice(const Tensor<T>& x, std::size_t axis, std::int64_t start, std::int64_t stop) {
  const Shape& s = x.shape();
  require(axis < s.size(), "slice: axis ", axis, " out of range for rank ", s.size());
  require(0 <= start && start < stop && stop <= s[axis], "slice: range [", start, ",", stop,
          ") invalid for dim ", axis, " extent ", s[axis]);
  Shape out_shape = s;
  out_shape[axis] = stop - start;

  std::int64_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= s[d];
  for (std::size_t d = axis + 1; d < s.size(); ++d) inner *= s[d];
  const std::int64_t in_block = s[axis] * inner;
  const std::int64_t out_block = (stop - start) * inner;

  std::vector<T> out(static_cast<std::size_t>(shape_numel(out_shape)));
  for (std::int64_t o = 0; o < outer; ++o)
    std::copy_n(x.data().data() + o * in_block + start * inner, out_block,
                out.data() + o * out_block);

  auto bp = [outer, inner, in_block, out_block, start](TensorNode<T>& self) {
    auto* p = self.parents[0].node();
    if (!p->requires_grad) return;
    p->ensure_grad();
    for (std::int64_t o = 0; o < outer; ++o) {
      const T* g = self.grad.data() + o * out_block;
      T* dst = p->grad.data() + o * in_block + start * inner;
      for (std::int64_t i = 0; i < out_block; ++i) dst[i] += g[i];
    }
  };
  return detail::make_op<T>(std::move(out_shape), std::move(out), {x}, std::move(bp));
}

// zero padding with independent low/high amounts per axis
template <class T>
Tensor<T> pad_zero(const Tensor<T>& x, const std::vector<std::int64_t>& lo,
                   const std::vector<std::int64_t>& hi) {
  const Shape& s = x.shape();
  require(lo.size() == s.size() && hi.size() == s.size(), "pad_zero: expected ", s.size(),
          " pad pairs, got ", lo.size(), "/", hi.size());
  Shape out_shape(s.size());
  for (std::size_t d = 0; d < s.size(); ++d) {
    require(lo[d] >= 0 && hi[d] >= 0, "pad_zero: negative pad on dim ", d);
    out_shape[d] = s[d] + lo[d] + hi[d];
  }

  const std::size_t rank = s.size();
  require(rank > 0, "pad_zero: scalar input has no axes to pad");

  std::vector<std::int64_t> out_stride(rank, 1);
  for (std::size_t d = rank - 1; d > 0; --d) out_stride[d - 1] = out_stride[d] * out_shape[d];
  const std::int64_t row_len = s[rank - 1];
  const std::int64_t rows = shape_numel(s) / row_len;

  // output offset of input row r (rows enumerate all axes but the last)
  auto row_offset = [s, lo, out_stride, rank](std::int64_t r) {
    std::int64_t off = lo[rank - 1];
    for (std::size_t d = rank - 1; d-- > 0;) {
      off += (r % s[d] + lo[d]) * out_stride[d];
      r /= s[d];
    }
    return off;
  };

  std::vector<T> out(static_cast<std::size_t>(shape_numel(out_shape)), T(0));
  for (std::int64_t r = 0; r < rows; ++r)
    std::copy_n(x.data().data() + r * row_len, row_len, out.data() + row_offset(r));

  auto bp = [rows, row_len, row_offset](TensorNode<T>& self) {
    auto* p = self.parents[0].node();
    if (!p->requires_grad) return;
    p->ensure_grad();
    for (std::int64_t r = 0; r < rows; ++r) {
      const T* g = self.grad.data() + row_offset(r);
      T* dst = p->grad.data() + r * row_len;
      for (std::int64_t i = 0; i < row_len; ++i) dst[i] += g[i];
    }
  };
  return detail::make_op<T>(std::move(out_shape), std::move(out), {x}, std::move(bp));
}

// ---------------------------------------------------------------------------
// convolution (cross-correlation, stride 1)
// ---------------------------------------------------------------------------

struct ConvPad3 {
  std::int64_t depth_lo = 0, depth_hi = 0, height = 0, width = 0;
};

struct ConvPad2 {
  std::int64_t height = 0, width = 0;
};

namespace detail::conv {

struct Extents {
  std::int64_t n, c, d, h, w;
  std::int64_t volume() const { return d * h * w; }
};

// zero-pad the three trailing axes of src[n,c,d,h,w]
template <class T>
std::vector<T> pad_input(const T* src, Extents e, std::int64_t dlo, std::int64_t dhi,
                         std::int64_t hlo, std::int64_t hhi, std::int64_t wlo, std::int64_t whi) {
  const std::int64_t Dp = e.d + dlo + dhi, Hp = e.h + hlo + hhi, Wp = e.w + wlo + whi;
  std::vector<T> dst(static_cast<std::size_t>(e.n * e.c * Dp * Hp * Wp), T(0));
  for (std::int64_t nc = 0; nc < e.n * e.c; ++nc)
    for (std::int64_t z = 0; z < e.d; ++z)
      for (std::int64_t y = 0; y < e.h; ++y) {
        const T* s = src + ((nc * e.d + z) * e.h + y) * e.w;
        T* t = dst.data() + ((nc * Dp + z + dlo) * Hp + y + hlo) * Wp + wlo;
        std::copy_n(s, e.w, t);
      }
  return dst;
}

// The convolution passes are expressed as matrix products over im2col
// buffers (kernel-rows x output-volume), evaluated by Eigen. The reduction
// order inside a product is fixed, so results are deterministic.
template <class T>
using MatRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using MapRM = Eigen::Map<MatRM<T>>;
template <class T>
using CMapRM = Eigen::Map<const MatRM<T>>;

struct ConvGeom {
  std::int64_t Ci, Dp, Hp, Wp;  // padded input extents
  std::int64_t Co, kd, kh, kw;
  std::int64_t Do() const { return Dp - kd + 1; }
  std::int64_t Ho() const { return Hp - kh + 1; }
  std::int64_t Wo() const { return Wp - kw + 1; }
  std::int64_t out_vol() const { return Do() * Ho() * Wo(); }
  std::int64_t rows() const { return Ci * kd * kh * kw; }
  bool unit_kernel() const { return kd == 1 && kh == 1 && kw == 1; }
};

// column v = output (zo,yo,xo); row r = (ci,kz,ky,kx):
// cols(r, v) = in_pad[ci, zo+kz, yo+ky, xo+kx]
template <class T>
void im2col(const T* in_pad, const ConvGeom& g, T* cols) {
  const std::int64_t Do = g.Do(), Ho = g.Ho(), Wo = g.Wo();
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < g.rows(); ++r) {
    const std::int64_t kx = r % g.kw;
    const std::int64_t ky = (r / g.kw) % g.kh;
    const std::int64_t kz = (r / (g.kw * g.kh)) % g.kd;
    const std::int64_t ci = r / (g.kw * g.kh * g.kd);
    T* dst = cols + r * g.out_vol();
    for (std::int64_t zo = 0; zo < Do; ++zo)
      for (std::int64_t yo = 0; yo < Ho; ++yo) {
        const T* src = in_pad + ((ci * g.Dp + zo + kz) * g.Hp + yo + ky) * g.Wp + kx;
        std::copy_n(src, Wo, dst);
        dst += Wo;
      }
  }
}

// transpose of im2col: scatter-add rows back into the padded input layout
template <class T>
void col2im_add(const T* cols, const ConvGeom& g, T* in_pad) {
  const std::int64_t Do = g.Do(), Ho = g.Ho(), Wo = g.Wo();
  const std::int64_t per_ci = g.kd * g.kh * g.kw;
  // one thread owns all rows of a channel: writes never collide
#pragma omp parallel for schedule(static)
  for (std::int64_t ci = 0; ci < g.Ci; ++ci)
    for (std::int64_t k = 0; k < per_ci; ++k) {
      const std::int64_t r = ci * per_ci + k;
      const std::int64_t kx = k % g.kw;
      const std::int64_t ky = (k / g.kw) % g.kh;
      const std::int64_t kz = k / (g.kw * g.kh);
      const T* src = cols + r * g.out_vol();
      for (std::int64_t zo = 0; zo < Do; ++zo)
        for (std::int64_t yo = 0; yo < Ho; ++yo) {
          T* dst = in_pad + ((ci * g.Dp + zo + kz) * g.Hp + yo + ky) * g.Wp + kx;
          for (std::int64_t xo = 0; xo < Wo; ++xo) dst[xo] += src[xo];
          src += Wo;
        }
    }
}

// out[n,co,:] = w x im2col(in_pad[n]) + bias
template <class T>
void forward(const T* in_pad, const T* w, const T* bias, std::int64_t N, const ConvGeom& g,
             T* out, std::vector<T>& scratch) {
  const std::int64_t vol = g.out_vol();
  CMapRM<T> wm(w, g.Co, g.rows());
  for (std::int64_t n = 0; n < N; ++n) {
    const T* ip = in_pad + n * g.Ci * g.Dp * g.Hp * g.Wp;
    const T* cols = ip;
    if (!g.unit_kernel()) {
      scratch.resize(static_cast<std::size_t>(g.rows() * vol));
      im2col(ip, g, scratch.data());
      cols = scratch.data();
    }
    MapRM<T> om(out + n * g.Co * vol, g.Co, vol);
    om.noalias() = wm * CMapRM<T>(cols, g.rows(), vol);
    if (bias)
      for (std::int64_t co = 0; co < g.Co; ++co) om.row(co).array() += bias[co];
  }
}

// gw += gout x im2col(in_pad)^T
template <class T>
void weight_grad(const T* in_pad, const T* gout, std::int64_t N, const ConvGeom& g, T* gw,
                 std::vector<T>& scratch) {
  const std::int64_t vol = g.out_vol();
  MapRM<T> gwm(gw, g.Co, g.rows());
  for (std::int64_t n = 0; n < N; ++n) {
    const T* ip = in_pad + n * g.Ci * g.Dp * g.Hp * g.Wp;
    const T* cols = ip;
    if (!g.unit_kernel()) {
      scratch.resize(static_cast<std::size_t>(g.rows() * vol));
      im2col(ip, g, scratch.data());
      cols = scratch.data();
    }
    gwm.noalias() += CMapRM<T>(gout + n * g.Co * vol, g.Co, vol) *
                     CMapRM<T>(cols, g.rows(), vol).transpose();
  }
}

// gin_pad += col2im(w^T x gout)
template <class T>
void input_grad(const T* w, const T* gout, std::int64_t N, const ConvGeom& g, T* gin_pad,
                std::vector<T>& scratch) {
  const std::int64_t vol = g.out_vol();
  CMapRM<T> wm(w, g.Co, g.rows());
  for (std::int64_t n = 0; n < N; ++n) {
    const T* gm = gout + n * g.Co * vol;
    T* gp = gin_pad + n * g.Ci * g.Dp * g.Hp * g.Wp;
    if (g.unit_kernel()) {
      MapRM<T>(gp, g.rows(), vol).noalias() +=
          wm.transpose() * CMapRM<T>(gm, g.Co, vol);
    } else {
      scratch.resize(static_cast<std::size_t>(g.rows() * vol));
      MapRM<T>(scratch.data(), g.rows(), vol).noalias() =
          wm.transpose() * CMapRM<T>(gm, g.Co, vol);
      col2im_add(scratch.data(), g, gp);
    }
  }
}

}  // namespace detail::conv

namespace detail {

// Shared 5D implementation behind conv3d/conv2d (conv2d runs with a
// singleton depth axis; the memory layouts coincide).
template <class T>
Tensor<T> conv_impl(const Tensor<T>& input, const Tensor<T>& kernel, const Tensor<T>& bias,
                    const std::array<std::int64_t, 4>& pad, bool is_3d) {
  namespace cv = detail::conv;
  const char* op = is_3d ? "conv3d" : "conv2d";
  const std::size_t rank = is_3d ? 5 : 4;
  require(input.ndim() == rank, op, ": input must be rank ", rank, " (got ",
          shape_str(input.shape()), ")");
  require(kernel.ndim() == rank, op, ": kernel must be rank ", rank, " (got ",
          shape_str(kernel.shape()), ")");

  const auto& is = input.shape();
  const auto& ks = kernel.shape();
  const std::int64_t N = is[0], Ci = is[1];
  const std::int64_t D = is_3d ? is[2] : 1, H = is[rank - 2], W = is[rank - 1];
  const std::int64_t Co = ks[0];
  const std::int64_t kd = is_3d ? ks[2] : 1, kh = ks[rank - 2], kw = ks[rank - 1];
  require(ks[1] == Ci, op, ": kernel input-channel extent ", ks[1],
          " != input channel extent ", Ci);
  require(bias.ndim() == 1 && bias.dim(0) == Co, op, ": bias must have shape [", Co, "], got ",
          shape_str(bias.shape()));

  const std::int64_t dlo = pad[0], dhi = pad[1], ph = pad[2], pw = pad[3];
  const std::int64_t Dp = D + dlo + dhi, Hp = H + 2 * ph, Wp = W + 2 * pw;
  require(kd <= Dp && kh <= Hp && kw <= Wp, op, ": kernel extent (", kd, ",", kh, ",", kw,
          ") exceeds padded input extent (", Dp, ",", Hp, ",", Wp, ")");
  const cv::ConvGeom geom{Ci, Dp, Hp, Wp, Co, kd, kh, kw};
  const std::int64_t Do = geom.Do(), Ho = geom.Ho(), Wo = geom.Wo();

  auto in_pad = std::make_shared<std::vector<T>>(
      cv::pad_input(input.data().data(), {N, Ci, D, H, W}, dlo, dhi, ph, ph, pw, pw));
  std::vector<T> out(static_cast<std::size_t>(N * Co * Do * Ho * Wo));
  {
    std::vector<T> scratch;
    cv::forward(in_pad->data(), kernel.data().data(), bias.data().data(), N, geom, out.data(),
                scratch);
  }

  Shape out_shape = is_3d ? Shape{N, Co, Do, Ho, Wo} : Shape{N, Co, Ho, Wo};

  const bool need_in_pad = kernel.requires_grad() && grad_enabled();
  if (!need_in_pad) in_pad.reset();
  auto bp = [=, cache = need_in_pad ? in_pad : nullptr](TensorNode<T>& self) {
    auto* in_node = self.parents[0].node();
    auto* k_node = self.parents[1].node();
    auto* b_node = self.parents[2].node();
    const T* gout = self.grad.data();
    std::vector<T> scratch;

    if (b_node->requires_grad) {
      b_node->ensure_grad();
      const std::int64_t vol = Do * Ho * Wo;
      for (std::int64_t n = 0; n < N; ++n)
        for (std::int64_t co = 0; co < Co; ++co) {
          T acc = 0;
          const T* g = gout + (n * Co + co) * vol;
          for (std::int64_t i = 0; i < vol; ++i) acc += g[i];
          b_node->grad[co] += acc;
        }
    }
    if (k_node->requires_grad) {
      k_node->ensure_grad();
      cv::weight_grad(cache->data(), gout, N, geom, k_node->grad.data(), scratch);
    }
    if (in_node->requires_grad) {
      in_node->ensure_grad();
      std::vector<T> gin_pad(static_cast<std::size_t>(N * Ci * Dp * Hp * Wp), T(0));
      cv::input_grad(k_node->data.data(), gout, N, geom, gin_pad.data(), scratch);
      // crop away the original zero padding while accumulating
      for (std::int64_t nc = 0; nc < N * Ci; ++nc)
        for (std::int64_t z = 0; z < D; ++z)
          for (std::int64_t y = 0; y < H; ++y) {
            const T* g = gin_pad.data() + ((nc * Dp + z + dlo) * Hp + y + ph) * Wp + pw;
            T* dst = in_node->grad.data() + ((nc * D + z) * H + y) * W;
            for (std::int64_t x = 0; x < W; ++x) dst[x] += g[x];
          }
    }
  };
  return make_op<T>(std::move(out_shape), std::move(out), {input, kernel, bias}, std::move(bp));
}

}  // namespace detail

// input [N,Cin,D,H,W], kernel [Cout,Cin,kd,kh,kw], bias [Cout].
// Depth padding may be asymmetric; spatial padding is symmetric.
template <class T>
Tensor<T> conv3d(const Tensor<T>& input, const Tensor<T>& kernel, const Tensor<T>& bias,
                 ConvPad3 pad) {
  return detail::conv_impl(input, kernel, bias,
                           {pad.depth_lo, pad.depth_hi, pad.height, pad.width}, true);
}

// input [N,Cin,H,W], kernel [Cout,Cin,kh,kw], bias [Cout]
template <class T>
Tensor<T> conv2d(const Tensor<T>& input, const Tensor<T>& kernel, const Tensor<T>& bias,
                 ConvPad2 pad) {
  return detail::conv_impl(input, kernel, bias, {0, 0, pad.height, pad.width}, false);
}

}  // namespace mspd

#endif  // MSPD_TENSOR_OPS_HPP
