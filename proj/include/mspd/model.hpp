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
#ifndef MSPD_MODEL_HPP
#define MSPD_MODEL_HPP

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mspd/checkpoint.hpp"
#include "mspd/image.hpp"
#include "mspd/tensor_ops.hpp"

namespace mspd {

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

enum class Variant { Full, Net1, Net2, Net3, Net4 };
enum class ConvMode { Conv3D, Conv2D };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Full: return "full";
    case Variant::Net1: return "net1";
    case Variant::Net2: return "net2";
    case Variant::Net3: return "net3";
    case Variant::Net4: return "net4";
  }
  return "?";
}

inline Variant variant_from_name(const std::string& s) {
  for (Variant v : {Variant::Full, Variant::Net1, Variant::Net2, Variant::Net3, Variant::Net4})
    if (s == variant_name(v)) return v;
  if (s == "mspdnet") return Variant::Full;
  fail("unknown network variant '", s, "' (expected full|net1|net2|net3|net4)");
}

// Declarative description of one network instance. The ablations force
// their defining fields in normalize():
//   net1 drops the non-linear mapping layer, net2 runs 2D convolutions,
//   net3 drops the final joint module, net4 trains without gradient loss.
struct NetworkConfig {
  int num_wavelengths = 4;
  int period_h = 4;
  int period_w = 4;
  Variant variant = Variant::Full;
  std::vector<int> ms_filters{1, 8, 16, 32, 64};
  ConvMode conv_mode = ConvMode::Conv3D;
  double gradient_loss_weight = 1.0;
  std::uint64_t seed = 0;

  NetworkConfig normalized() const {
    NetworkConfig c = *this;
    if (c.variant == Variant::Net2) c.conv_mode = ConvMode::Conv2D;
    if (c.variant == Variant::Net4) c.gradient_loss_weight = 0.0;
    require(c.num_wavelengths > 0, "config: wavelength count must be positive");
    require(c.period_h > 0 && c.period_w > 0, "config: period must be positive");
    require(c.ms_filters.size() == 5, "config: ms_filters must list five widths, got ",
            c.ms_filters.size());
    require(c.ms_filters[0] == 1, "config: ms_filters[0] is the volume width and must be 1");
    for (int f : c.ms_filters) require(f >= 1, "config: filter widths must be >= 1");
    require(c.gradient_loss_weight >= 0.0, "config: gradient loss weight must be >= 0");
    return c;
  }

  bool has_branch_modules() const { return variant != Variant::Net1; }
  bool has_joint_module() const {
    return variant != Variant::Net1 && variant != Variant::Net3;
  }

  nlohmann::json to_json() const {
    return {{"num_wavelengths", num_wavelengths},
            {"period_h", period_h},
            {"period_w", period_w},
            {"variant", variant_name(variant)},
            {"ms_filters", ms_filters},
            {"conv_mode", conv_mode == ConvMode::Conv3D ? "3d" : "2d"},
            {"gradient_loss_weight", gradient_loss_weight},
            {"seed", seed}};
  }

  static NetworkConfig from_json(const nlohmann::json& j) {
    NetworkConfig c;
    c.num_wavelengths = j.value("num_wavelengths", c.num_wavelengths);
    c.period_h = j.value("period_h", c.period_h);
    c.period_w = j.value("period_w", c.period_w);
    if (j.contains("variant")) c.variant = variant_from_name(j.at("variant"));
    if (j.contains("ms_filters")) c.ms_filters = j.at("ms_filters").get<std::vector<int>>();
    if (j.contains("conv_mode")) {
      const std::string m = j.at("conv_mode");
      require(m == "3d" || m == "2d", "config: conv_mode must be 3d or 2d, got ", m);
      c.conv_mode = m == "3d" ? ConvMode::Conv3D : ConvMode::Conv2D;
    }
    c.gradient_loss_weight = j.value("gradient_loss_weight", c.gradient_loss_weight);
    c.seed = j.value("seed", c.seed);
    return c.normalized();
  }

  void save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) fail("config: cannot open ", path, " for writing");
    os << to_json().dump(2) << "\n";
  }

  static NetworkConfig load(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail("config: cannot open ", path);
    nlohmann::json j;
    is >> j;
    return from_json(j);
  }
};

// ---------------------------------------------------------------------------
// layers
// ---------------------------------------------------------------------------

namespace detail {

// One convolution layer in either mode. In 2D mode the depth axis is folded
// into the channel axis, so a (f_in -> f_out over depth d) 3D layer becomes
// a (f_in*d -> f_out*d) 2D layer.
template <class T>
struct ConvLayer {
  Tensor<T> weight;
  Tensor<T> bias;
  ConvMode mode = ConvMode::Conv3D;
  ConvPad3 pad3;
  ConvPad2 pad2;

  Tensor<T> apply(const Tensor<T>& x) const {
    return mode == ConvMode::Conv3D ? conv3d(x, weight, bias, pad3)
                                    : conv2d(x, weight, bias, pad2);
  }
  std::int64_t parameter_count() const { return weight.numel() + bias.numel(); }
};

template <class T>
ConvLayer<T> make_conv(ConvMode mode, int f_in, int f_out, int depth, std::int64_t kd,
                       std::int64_t kh, std::int64_t kw, ConvPad3 pad, Rng& rng) {
  ConvLayer<T> layer;
  layer.mode = mode;
  layer.pad3 = pad;
  layer.pad2 = ConvPad2{pad.height, pad.width};
  Shape wshape;
  std::int64_t fan_in;
  if (mode == ConvMode::Conv3D) {
    wshape = {f_out, f_in, kd, kh, kw};
    fan_in = static_cast<std::int64_t>(f_in) * kd * kh * kw;
  } else {
    wshape = {static_cast<std::int64_t>(f_out) * depth, static_cast<std::int64_t>(f_in) * depth,
              kh, kw};
    fan_in = static_cast<std::int64_t>(f_in) * depth * kh * kw;
  }
  const T bound = static_cast<T>(std::sqrt(1.0 / static_cast<double>(fan_in)));
  layer.weight = Tensor<T>::uniform(wshape, -bound, bound, rng, true);
  layer.bias = Tensor<T>::zeros({mode == ConvMode::Conv3D ? f_out : f_out * depth}, true);
  return layer;
}

}  // namespace detail

// Learned trilinear interpolation: one wide convolution whose kernel spans
// (2h-1) x (2w-1) spatially and the full wavelength depth, padded to
// preserve the volume extents.
template <class T>
class TriModule {
 public:
  TriModule() = default;

  TriModule(const NetworkConfig& cfg, Rng& rng) {
    const int c = cfg.num_wavelengths;
    const std::int64_t kh = 2 * cfg.period_h - 1, kw = 2 * cfg.period_w - 1;
    // depth kernel c over a depth-c volume: total pad c-1, split low/high
    const ConvPad3 pad{(c - 1) / 2, c - (c - 1) / 2 - 1, cfg.period_h - 1, cfg.period_w - 1};
    conv_ = detail::make_conv<T>(cfg.conv_mode, 1, 1, c, c, kh, kw, pad, rng);
  }

  Tensor<T> apply(const Tensor<T>& sparse_volume) const { return conv_.apply(sparse_volume); }

  detail::ConvLayer<T>& conv() { return conv_; }
  const detail::ConvLayer<T>& conv() const { return conv_; }
  std::int64_t parameter_count() const { return conv_.parameter_count(); }

 private:
  detail::ConvLayer<T> conv_;
};

// Residual 3D-conv stack refining an interpolated volume: widths
// {1,8,16,32,64}, 3x3x3 kernels with a 1x1x1 head back to width 1, one
// inner residual pair at width 16, and a global shortcut from input to
// output. Shape-preserving for any depth.
template <class T>
class MsModule {
 public:
  MsModule() = default;

  MsModule(const NetworkConfig& cfg, int depth, Rng& rng) {
    const auto& f = cfg.ms_filters;
    const ConvPad3 p1{1, 1, 1, 1};
    const ConvPad3 p0{0, 0, 0, 0};
    auto mk = [&](int fi, int fo, std::int64_t k, ConvPad3 pad) {
      return detail::make_conv<T>(cfg.conv_mode, fi, fo, depth, k, k, k, pad, rng);
    };
    layers_ = {mk(f[0], f[1], 3, p1), mk(f[1], f[2], 3, p1), mk(f[2], f[2], 3, p1),
               mk(f[2], f[2], 3, p1), mk(f[2], f[3], 3, p1), mk(f[3], f[4], 3, p1),
               mk(f[4], f[0], 1, p0)};
  }

  Tensor<T> apply(const Tensor<T>& x) const {
    auto a = relu(layers_[0].apply(x));
    auto b = relu(layers_[1].apply(a));
    auto r = relu(add(layers_[3].apply(relu(layers_[2].apply(b))), b));
    auto c = relu(layers_[4].apply(r));
    auto d = relu(layers_[5].apply(c));
    return add(layers_[6].apply(d), x);  // global shortcut
  }

  std::array<detail::ConvLayer<T>, 7>& layers() { return layers_; }
  const std::array<detail::ConvLayer<T>, 7>& layers() const { return layers_; }

  std::int64_t parameter_count() const {
    std::int64_t n = 0;
    for (const auto& l : layers_) n += l.parameter_count();
    return n;
  }

 private:
  std::array<detail::ConvLayer<T>, 7> layers_;
};

// ---------------------------------------------------------------------------
// the network
// ---------------------------------------------------------------------------

template <class T>
class MspdNet {
 public:
  explicit MspdNet(const NetworkConfig& cfg) : cfg_(cfg.normalized()) {
    Rng rng(cfg_.seed);
    for (int a = 0; a < kNumAngles; ++a) tri_[a] = TriModule<T>(cfg_, rng);
    if (cfg_.has_branch_modules())
      for (int a = 0; a < kNumAngles; ++a)
        branch_.emplace_back(cfg_, cfg_.num_wavelengths, rng);
    if (cfg_.has_joint_module())
      joint_.emplace(cfg_, 4 * cfg_.num_wavelengths, rng);
  }

  const NetworkConfig& config() const { return cfg_; }

  // sparse volume as a network input tensor:
  //   3D mode [1,1,c,m,n], 2D mode [1,c,m,n]; same memory order either way
  Tensor<T> pack_sparse(const SparseImage& s) const {
    require(s.num_wavelengths == cfg_.num_wavelengths, "forward: sparse image has ",
            s.num_wavelengths, " wavelengths, config expects ", cfg_.num_wavelengths);
    std::vector<T> data(s.values.begin(), s.values.end());
    Shape shape = cfg_.conv_mode == ConvMode::Conv3D
                      ? Shape{1, 1, s.num_wavelengths, s.height, s.width}
                      : Shape{1, s.num_wavelengths, s.height, s.width};
    return Tensor<T>::from(std::move(shape), std::move(data));
  }

  std::array<Tensor<T>, kNumAngles> make_inputs(const MosaicImage& y) const {
    std::array<Tensor<T>, kNumAngles> in;
    for (int a = 0; a < kNumAngles; ++a) in[a] = pack_sparse(extract_sparse(y, a));
    return in;
  }

  // Packed estimate with the four angles stacked wavelength-wise in angle
  // order: [1,1,4c,m,n] (3D) or [1,4c,m,n] (2D). The memory layout matches
  // ImageCube's [angle][wavelength][row][col] planes.
  Tensor<T> forward_packed(const std::array<Tensor<T>, kNumAngles>& inputs) const {
    const std::size_t depth_axis = cfg_.conv_mode == ConvMode::Conv3D ? 2 : 1;
    std::vector<Tensor<T>> parts;
    parts.reserve(kNumAngles);
    for (int a = 0; a < kNumAngles; ++a) {
      auto i = tri_[a].apply(inputs[a]);
      parts.push_back(cfg_.has_branch_modules() ? branch_[a].apply(i) : i);
    }
    auto packed = concat(parts, depth_axis);
    if (joint_) packed = joint_->apply(packed);
    return packed;
  }

  ImageCube unpack(const Tensor<T>& packed, const std::vector<double>& wavelengths_nm) const {
    const auto& s = packed.shape();
    const std::int64_t m = s[s.size() - 2], n = s[s.size() - 1];
    require(static_cast<int>(wavelengths_nm.size()) == cfg_.num_wavelengths,
            "unpack: wavelength list has ", wavelengths_nm.size(), " entries, config expects ",
            cfg_.num_wavelengths);
    ImageCube cube(m, n, wavelengths_nm);
    for (std::size_t i = 0; i < cube.values().size(); ++i)
      cube.values()[i] = static_cast<double>(packed.data()[i]);
    return cube;
  }

  // evaluation path: no graph construction
  ImageCube demosaic(const MosaicImage& y, const std::vector<double>& wavelengths_nm) const {
    NoGradGuard ng;
    return unpack(forward_packed(make_inputs(y)), wavelengths_nm);
  }

  std::vector<NamedTensor<T>> named_parameters() {
    std::vector<NamedTensor<T>> out;
    auto push = [&out](const std::string& prefix, detail::ConvLayer<T>& l) {
      out.push_back({prefix + ".weight", l.weight});
      out.push_back({prefix + ".bias", l.bias});
    };
    for (int a = 0; a < kNumAngles; ++a) push("tri" + std::to_string(a), tri_[a].conv());
    for (std::size_t b = 0; b < branch_.size(); ++b)
      for (std::size_t l = 0; l < branch_[b].layers().size(); ++l)
        push("branch" + std::to_string(b) + ".conv" + std::to_string(l), branch_[b].layers()[l]);
    if (joint_)
      for (std::size_t l = 0; l < joint_->layers().size(); ++l)
        push("joint.conv" + std::to_string(l), joint_->layers()[l]);
    return out;
  }

  std::int64_t parameter_count() const {
    std::int64_t n = 0;
    for (const auto& t : tri_) n += t.parameter_count();
    for (const auto& b : branch_) n += b.parameter_count();
    if (joint_) n += joint_->parameter_count();
    return n;
  }

  void save_checkpoint_file(const std::string& path) {
    save_checkpoint(path, named_parameters());
  }

  void load_checkpoint_file(const std::string& path) {
    auto loaded = load_checkpoint<T>(path);
    auto params = named_parameters();
    require(loaded.size() == params.size(), "checkpoint: ", path, " holds ", loaded.size(),
            " tensors, model has ", params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      require(loaded[i].name == params[i].name, "checkpoint: tensor ", i, " is '",
              loaded[i].name, "', model expects '", params[i].name, "'");
      require(loaded[i].tensor.shape() == params[i].tensor.shape(),
              "checkpoint: shape mismatch for ", loaded[i].name);
      params[i].tensor.mutable_data() = loaded[i].tensor.data();
    }
  }

 private:
  NetworkConfig cfg_;
  std::array<TriModule<T>, kNumAngles> tri_;
  std::vector<MsModule<T>> branch_;  // empty for net1
  std::optional<MsModule<T>> joint_;
};

// ---------------------------------------------------------------------------
// gradient map and loss
// ---------------------------------------------------------------------------

// First-order forward differences per channel and angle; vertical slice 0,
// horizontal slice 1; trailing row/column zero.
struct GradientMap {
  std::int64_t height = 0, width = 0, num_wavelengths = 0;
  std::vector<double> values;  // [angle][wavelength][direction][row][col]

  double at(std::int64_t y, std::int64_t x, std::int64_t lam, std::int64_t ang,
            int direction) const {
    return values[((((ang * num_wavelengths) + lam) * 2 + direction) * height + y) * width + x];
  }
};

inline GradientMap gradient_map(const ImageCube& x) {
  GradientMap g;
  g.height = x.height();
  g.width = x.width();
  g.num_wavelengths = x.num_wavelengths();
  g.values.assign(static_cast<std::size_t>(4 * g.num_wavelengths * 2 * g.height * g.width), 0.0);
  for (std::int64_t a = 0; a < kNumAngles; ++a)
    for (std::int64_t l = 0; l < g.num_wavelengths; ++l) {
      const double* pl = x.plane(a, l);
      double* gv = g.values.data() + (((a * g.num_wavelengths + l) * 2 + 0) * g.height) * g.width;
      double* gh = g.values.data() + (((a * g.num_wavelengths + l) * 2 + 1) * g.height) * g.width;
      for (std::int64_t y = 0; y < g.height; ++y)
        for (std::int64_t xx = 0; xx < g.width; ++xx) {
          if (y + 1 < g.height)
            gv[y * g.width + xx] = pl[(y + 1) * g.width + xx] - pl[y * g.width + xx];
          if (xx + 1 < g.width)
            gh[y * g.width + xx] = pl[y * g.width + xx + 1] - pl[y * g.width + xx];
        }
    }
  return g;
}

// Squared-Frobenius data term plus weighted squared-Frobenius gradient-map
// term, averaged over the batch (here a single pair).
inline double loss_value(const ImageCube& pred, const ImageCube& truth,
                         double gradient_loss_weight) {
  require(pred.height() == truth.height() && pred.width() == truth.width() &&
              pred.num_wavelengths() == truth.num_wavelengths(),
          "loss: shape mismatch ", pred.height(), "x", pred.width(), "x",
          pred.num_wavelengths(), " vs ", truth.height(), "x", truth.width(), "x",
          truth.num_wavelengths());
  double data_term = 0.0;
  for (std::size_t i = 0; i < pred.values().size(); ++i) {
    const double d = pred.values()[i] - truth.values()[i];
    data_term += d * d;
  }
  if (gradient_loss_weight == 0.0) return data_term;
  auto gp = gradient_map(pred);
  auto gt = gradient_map(truth);
  double grad_term = 0.0;
  for (std::size_t i = 0; i < gp.values.size(); ++i) {
    const double d = gp.values[i] - gt.values[i];
    grad_term += d * d;
  }
  return data_term + gradient_loss_weight * grad_term;
}

namespace detail {

template <class T>
Tensor<T> sum_squares(const Tensor<T>& x) {
  return sum(mul(x, x));
}

}  // namespace detail

// Differentiable loss over packed estimates. The gradient-map difference of
// pred and truth equals the gradient map of their difference (both are
// linear), and the zero trailing row/column contributes nothing to the
// Frobenius sum, so the graph works on the difference volume directly.
template <class T>
Tensor<T> loss_graph(const Tensor<T>& pred_packed, const Tensor<T>& truth_packed,
                     double gradient_loss_weight) {
  require(pred_packed.shape() == truth_packed.shape(), "loss: shape mismatch ",
          shape_str(pred_packed.shape()), " vs ", shape_str(truth_packed.shape()));
  auto diff = sub(pred_packed, truth_packed);
  auto total = detail::sum_squares(diff);
  if (gradient_loss_weight != 0.0) {
    const std::size_t h_axis = diff.ndim() - 2, w_axis = diff.ndim() - 1;
    const std::int64_t m = diff.shape()[h_axis], n = diff.shape()[w_axis];
    Tensor<T> grad_term;
    if (m > 1) {
      auto dv = sub(slice(diff, h_axis, 1, m), slice(diff, h_axis, 0, m - 1));
      grad_term = detail::sum_squares(dv);
    }
    if (n > 1) {
      auto dh = sub(slice(diff, w_axis, 1, n), slice(diff, w_axis, 0, n - 1));
      auto hterm = detail::sum_squares(dh);
      grad_term = grad_term.valid() ? add(grad_term, hterm) : hterm;
    }
    if (grad_term.valid())
      total = add(total, scale(grad_term, static_cast<T>(gradient_loss_weight)));
  }
  return total;
}

}  // namespace mspd

#endif  // MSPD_MODEL_HPP
